#pragma once

// Prime fields F_p (p odd) and canonical enumeration of P^n(F_p).

#include <cstdint>
#include <string>
#include <vector>

#include "qfib/errors.hpp"

namespace qfib {

using Elem = std::uint64_t;

class PrimeField {
 public:
  explicit PrimeField(std::uint64_t p) : p_(p) {
    if (p < 3 || p >= (1ULL << 31) || !is_prime(p)) {
      throw InputError("field characteristic must be an odd prime below 2^31, got " +
                       std::to_string(p));
    }
  }

  static bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
      if (n % d == 0) return false;
    }
    return true;
  }

  std::uint64_t p() const { return p_; }

  Elem reduce(std::int64_t x) const {
    const auto sp = static_cast<std::int64_t>(p_);
    std::int64_t r = x % sp;
    return static_cast<Elem>(r < 0 ? r + sp : r);
  }
  Elem add(Elem a, Elem b) const {
    Elem s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p_ - b; }
  Elem neg(Elem a) const { return a == 0 ? 0 : p_ - a; }
  Elem mul(Elem a, Elem b) const { return (a * b) % p_; }

  Elem pow(Elem base, std::uint64_t e) const {
    Elem result = 1;
    base %= p_;
    while (e > 0) {
      if (e & 1U) result = mul(result, base);
      base = mul(base, base);
      e >>= 1U;
    }
    return result;
  }

  Elem inv(Elem a) const {
    if (a % p_ == 0) throw PreconditionError("inverse of zero in F_p");
    return pow(a, p_ - 2);
  }

  /// Quadratic character via Euler's criterion: 0, +1 or -1.
  int legendre(Elem a) const {
    a %= p_;
    if (a == 0) return 0;
    return pow(a, (p_ - 1) / 2) == 1 ? 1 : -1;
  }

  bool operator==(const PrimeField& other) const { return p_ == other.p_; }

 private:
  std::uint64_t p_;
};

inline int legendre_character(std::int64_t a, const PrimeField& f) {
  return f.legendre(f.reduce(a));
}

/// (p^(k+1) - 1) / (p - 1), i.e. #P^k(F_p); 0 for k < 0.
inline std::uint64_t proj_count(int k, std::uint64_t p) {
  std::uint64_t total = 0;
  std::uint64_t pw = 1;
  for (int i = 0; i <= k; ++i) {
    total += pw;
    pw *= p;
  }
  return total;
}

inline std::uint64_t ipow(std::uint64_t base, unsigned e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= base;
  return r;
}

/// Point of P^n with leftmost nonzero coordinate equal to 1.
struct ProjPoint {
  std::vector<Elem> coords;

  std::size_t size() const { return coords.size(); }
  Elem operator[](std::size_t i) const { return coords[i]; }

  std::size_t pivot() const {
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (coords[i] != 0) return i;
    }
    throw PreconditionError("zero vector is not a projective point");
  }

  bool operator==(const ProjPoint&) const = default;
  auto operator<=>(const ProjPoint&) const = default;
};

/// Scales a nonzero vector so that its leftmost nonzero entry is 1.
inline ProjPoint canonicalize(std::vector<Elem> v, const PrimeField& f) {
  std::size_t lead = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] %= f.p();
    if (v[i] != 0 && lead == v.size()) lead = i;
  }
  if (lead == v.size()) throw PreconditionError("zero vector is not a projective point");
  const Elem s = f.inv(v[lead]);
  for (auto& x : v) x = f.mul(x, s);
  return ProjPoint{std::move(v)};
}

/// Canonical enumeration of P^n(F_p).
///
/// Points are indexed 0..size()-1: first the p^n points with leading 1 in
/// coordinate 0, then the p^(n-1) with leading 1 in coordinate 1, and so on;
/// inside a block the trailing coordinates are read as base-p digits with the
/// last coordinate least significant. Index ranges partition the space, which
/// is what the parallel counting loops rely on.
class ProjectiveSpace {
 public:
  ProjectiveSpace(int n, const PrimeField& f) : n_(n), field_(f) {
    if (n < 0) throw InputError("projective dimension must be nonnegative");
    size_ = proj_count(n, f.p());
  }

  int dim() const { return n_; }
  std::uint64_t size() const { return size_; }
  const PrimeField& field() const { return field_; }

  ProjPoint at(std::uint64_t index) const {
    if (index >= size_) throw InputError("projective point index out of range");
    const std::uint64_t p = field_.p();
    std::vector<Elem> c(static_cast<std::size_t>(n_) + 1, 0);
    int lead = 0;
    std::uint64_t block = ipow(p, static_cast<unsigned>(n_));
    while (index >= block) {
      index -= block;
      ++lead;
      block /= p;
    }
    c[static_cast<std::size_t>(lead)] = 1;
    for (int i = n_; i > lead; --i) {
      c[static_cast<std::size_t>(i)] = index % p;
      index /= p;
    }
    return ProjPoint{std::move(c)};
  }

  /// Calls fn(const ProjPoint&) for indices [begin, end) in index order.
  template <typename Fn>
  void for_each(std::uint64_t begin, std::uint64_t end, Fn&& fn) const {
    if (begin >= end) return;
    ProjPoint pt = at(begin);
    for (std::uint64_t i = begin; i < end; ++i) {
      fn(pt);
      if (i + 1 < end) advance(pt);
    }
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for_each(0, size_, std::forward<Fn>(fn));
  }

  std::vector<ProjPoint> points() const {
    std::vector<ProjPoint> out;
    out.reserve(size_);
    for_each([&](const ProjPoint& pt) { out.push_back(pt); });
    return out;
  }

 private:
  // Successor in index order.
  void advance(ProjPoint& pt) const {
    const std::uint64_t p = field_.p();
    auto& c = pt.coords;
    const std::size_t lead = pt.pivot();
    for (std::size_t i = c.size(); i-- > lead + 1;) {
      if (++c[i] < p) return;
      c[i] = 0;
    }
    // Block exhausted: move the leading 1 one step right.
    c[lead] = 0;
    c[lead + 1] = 1;
  }

  int n_;
  PrimeField field_;
  std::uint64_t size_;
};

inline std::vector<ProjPoint> enumerate_projective(int n, const PrimeField& f) {
  return ProjectiveSpace(n, f).points();
}

}  // namespace qfib
