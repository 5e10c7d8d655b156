#pragma once

// Seeded rejection sampling of integer nets, cubics containing a plane and
// bidegree (2,2) forms. All randomness comes from one mt19937_64 seed.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qfib/errors.hpp"
#include "qfib/gfp.hpp"
#include "qfib/matrix.hpp"
#include "qfib/mpoly.hpp"
#include "qfib/netfib/net.hpp"
#include "qfib/netfib/recipes.hpp"

namespace qfib::netfib {

/// Uniform integers in [-box, box]. The modulo reduction is done by hand so
/// that sequences do not depend on the standard library's distributions.
class BoxSampler {
 public:
  BoxSampler(std::uint64_t seed, std::int64_t box) : rng_(seed), box_(box) {
    if (box < 0) throw InputError("sampling box must be nonnegative");
  }
  std::int64_t operator()() {
    const auto width = static_cast<std::uint64_t>(2 * box_ + 1);
    return static_cast<std::int64_t>(rng_() % width) - box_;
  }
  std::int64_t small(std::int64_t bound) {
    const auto width = static_cast<std::uint64_t>(2 * bound + 1);
    return static_cast<std::int64_t>(rng_() % width) - bound;
  }

 private:
  std::mt19937_64 rng_;
  std::int64_t box_;
};

inline const std::vector<std::uint64_t>& default_primes() {
  static const std::vector<std::uint64_t> primes{3, 5, 7, 11, 13};
  return primes;
}

struct NetSearchOptions {
  std::int64_t box = 9;                 // entries in [-box, box]
  std::int64_t point_box = 2;           // planted point (1, r_1, ..., r_{n+1}), |r_i| <= point_box
  std::uint64_t attempts = 10'000;
  std::vector<std::uint64_t> validation_primes = default_primes();
  bool force_diagonal = false;
};

struct NetSearchResult {
  QuadricNet net;
  std::vector<std::int64_t> point;
  std::uint64_t attempts = 0;
};

/// Acceptance test at one prime: no rational regularity violation, no fiber
/// of corank >= 2, P on X with a nondegenerate section and no rational line.
inline bool net_accepted_at(const QuadricNet& net, const std::vector<std::int64_t>& point, const PrimeField& f) {
  std::vector<Elem> v;
  for (auto x : point) v.push_back(f.reduce(x));
  if (!on_all_quadrics(reduced_matrices(net, f), v, f)) return false;
  if (!section_nondegenerate(net, v, f)) return false;
  const RegularityReport reg = regularity_check(net, f);
  if (!reg.regular() || reg.corank_ge2 != 0) return false;
  return lines_through_point(net, v, f).empty();
}

/// Samples nets with a planted integer point P = (1, r) on X: the (0,0)
/// entry of each matrix is solved for so that P^T M_i P = 0 over Z.
inline NetSearchResult random_net_search(int n, int m, const PrimeField& f, std::uint64_t seed,
                                         const NetSearchOptions& opt = {}) {
  if (n < 0 || m < 1) throw InputError("search needs n >= 0 and m >= 1");
  const std::size_t size = static_cast<std::size_t>(n) + 2;
  std::vector<std::uint64_t> primes{f.p()};
  for (auto p : opt.validation_primes) {
    if (p != f.p()) primes.push_back(p);
  }
  std::vector<PrimeField> fields;
  for (auto p : primes) fields.emplace_back(p);

  BoxSampler rng(seed, opt.box);
  for (std::uint64_t attempt = 1; attempt <= opt.attempts; ++attempt) {
    std::vector<std::int64_t> point(size, 1);
    for (std::size_t i = 1; i < size; ++i) point[i] = rng.small(opt.point_box);
    std::vector<IntMatrix> mats;
    for (int k = 0; k <= m; ++k) {
      IntMatrix a(size, size);
      for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = i; j < size; ++j) {
          if (opt.force_diagonal && i != j) continue;
          a(i, j) = a(j, i) = rng();
        }
      }
      std::int64_t rest = 0;
      for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
          if (i != 0 || j != 0) rest += point[i] * a(i, j) * point[j];
        }
      }
      a(0, 0) = -rest;
      mats.push_back(std::move(a));
    }
    QuadricNet net = QuadricNet::make(n, m, std::move(mats));
    bool ok = true;
    for (const auto& fp : fields) {
      if (!net_accepted_at(net, point, fp)) {
        ok = false;
        break;
      }
    }
    if (ok) return NetSearchResult{std::move(net), std::move(point), attempt};
  }
  throw BudgetExceeded("no net accepted within " + std::to_string(opt.attempts) + " attempts");
}

struct RecipeSearchOptions {
  std::int64_t box = 3;
  std::uint64_t attempts = 2'000;
};

/// Random cubic x3 Q3 + x4 Q4 + x5 Q5 accepted when, at every prime, the
/// residual family has corank <= 1 and the cubic is not singular along the
/// plane.
inline CubicWithPlane random_cubic_search(const std::vector<std::uint64_t>& primes, std::uint64_t seed,
                                          const RecipeSearchOptions& opt = {}) {
  BoxSampler rng(seed, opt.box);
  for (std::uint64_t attempt = 1; attempt <= opt.attempts; ++attempt) {
    HomPoly form(6, 3);
    for (std::uint16_t j = 3; j < 6; ++j) {
      for (std::uint16_t a = 0; a < 6; ++a) {
        for (std::uint16_t b = a; b < 6; ++b) {
          const std::int64_t c = rng();
          if (c == 0) continue;
          Exponents e(6, 0);
          ++e[j];
          ++e[a];
          ++e[b];
          form.add_term(e, c);
        }
      }
    }
    if (form.is_zero()) continue;
    const CubicWithPlane cubic = CubicWithPlane::make(form);
    bool ok = true;
    for (auto p : primes) {
      const PrimeField f(p);
      auto gram_at = [&](const ProjPoint& y) { return cubic_residual_gram(cubic, y, f); };
      if (family_corank_histogram(2, 4, gram_at, f).at_least(2) > 0) {
        ok = false;
        break;
      }
      bool singular = false;
      ProjectiveSpace(2, f).for_each([&](const ProjPoint& x) {
        const std::vector<Elem> u{x[0], x[1], x[2], 0, 0, 0};
        bool all_zero = true;
        for (const auto& s : cubic.doubled) all_zero = all_zero && linalg::bilinear(reduce_mod(s, f), u, u, f) == 0;
        singular = singular || all_zero;
      });
      if (singular) {
        ok = false;
        break;
      }
    }
    if (ok) return cubic;
  }
  throw BudgetExceeded("no cubic accepted within " + std::to_string(opt.attempts) + " attempts");
}

/// Random bidegree (2,2) form (one coefficient per monomial s_a s_b t_c t_d,
/// a <= b, c <= d) accepted when both fibrations have corank <= 1 at every
/// prime.
inline VerraForm random_verra_search(const std::vector<std::uint64_t>& primes, std::uint64_t seed,
                                     const RecipeSearchOptions& opt = {}) {
  BoxSampler rng(seed, opt.box);
  for (std::uint64_t attempt = 1; attempt <= opt.attempts; ++attempt) {
    VerraForm g;
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a; b < 3; ++b)
        for (std::size_t c = 0; c < 3; ++c)
          for (std::size_t d = c; d < 3; ++d) g.tensor[VerraForm::index(a, b, c, d)] = rng();
    const VerraForm h = g.swapped();
    bool ok = true;
    for (auto p : primes) {
      const PrimeField f(p);
      auto g1 = [&](const ProjPoint& s) { return verra_fiber_gram(g, s, f); };
      auto g2 = [&](const ProjPoint& t) { return verra_fiber_gram(h, t, f); };
      if (family_corank_histogram(2, 4, g1, f).at_least(2) > 0 ||
          family_corank_histogram(2, 4, g2, f).at_least(2) > 0) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw BudgetExceeded("no (2,2) form accepted within " + std::to_string(opt.attempts) + " attempts");
}

}  // namespace qfib::netfib
