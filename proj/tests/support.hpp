#pragma once

// Hand-rolled generators shared by the test suites.

#include <cstdint>
#include <random>
#include <vector>

#include "qfib/gfp.hpp"
#include "qfib/matrix.hpp"

namespace qfib::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return rng_() % n; }
  std::int64_t in(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  Elem elem(const PrimeField& f) { return below(f.p()); }
  Elem nonzero(const PrimeField& f) { return 1 + below(f.p() - 1); }

  std::vector<Elem> vec(std::size_t n, const PrimeField& f) {
    std::vector<Elem> v(n);
    for (auto& x : v) x = elem(f);
    return v;
  }
  std::vector<Elem> nonzero_vec(std::size_t n, const PrimeField& f) {
    while (true) {
      auto v = vec(n, f);
      for (auto x : v) {
        if (x != 0) return v;
      }
    }
  }

  ModMatrix symmetric(std::size_t n, const PrimeField& f) {
    ModMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = elem(f);
    }
    return m;
  }
  IntMatrix int_symmetric(std::size_t n, std::int64_t box) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = in(-box, box);
    }
    return m;
  }
  ModMatrix invertible(std::size_t n, const PrimeField& f) {
    while (true) {
      ModMatrix a(n, n);
      for (auto& x : a.data()) x = elem(f);
      if (linalg::determinant(a, f) != 0) return a;
    }
  }
  /// Symmetric matrix of the requested rank: congruent image of a random
  /// diagonal form.
  ModMatrix symmetric_of_rank(std::size_t n, std::size_t r, const PrimeField& f) {
    ModMatrix d(n, n);
    for (std::size_t i = 0; i < r; ++i) d(i, i) = nonzero(f);
    return linalg::congruence(d, invertible(n, f), f);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace qfib::testing
