#pragma once

// Rank-2 lattice arithmetic for degree-8 K3 pairs: the discriminant
// d = (C.H)^2 - 8 C^2, the d = 1 (mod 8) parity criterion, and exact
// solvability of a^2 - d b^2 = +-8.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qfib/bigint.hpp"
#include "qfib/errors.hpp"
#include "qfib/parallel.hpp"

namespace qfib::lattice {

struct NSData {
  std::int64_t CH = 0;
  std::int64_t C2 = 0;
  std::int64_t d = 0;
};

inline std::int64_t discriminant(std::int64_t ch, std::int64_t c2) { return ch * ch - 8 * c2; }

inline NSData make_ns_data(std::int64_t ch, std::int64_t c2) { return {ch, c2, discriminant(ch, c2)}; }

inline bool brauer_vanishes(std::int64_t d) { return ((d % 8) + 8) % 8 == 1; }

struct PellSolution {
  BigInt a;  // a >= 0
  BigInt b;  // b >= 0
  bool operator==(const PellSolution&) const = default;
};

namespace detail {

inline std::int64_t isqrt(std::int64_t n) {
  if (n < 0) return -1;
  auto r = static_cast<std::int64_t>(boost::multiprecision::sqrt(BigInt(n)));
  return r;
}

inline bool is_square(std::int64_t n) {
  if (n < 0) return false;
  const auto r = isqrt(n);
  return r * r == n;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline BigInt abs_big(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

/// Smaller |b| first, then smaller |a|.
inline bool better(const PellSolution& x, const PellSolution& y) {
  if (x.b != y.b) return x.b < y.b;
  return x.a < y.a;
}

inline PellSolution normalized(const BigInt& a, const BigInt& b) { return {abs_big(a), abs_big(b)}; }

/// PQa continued-fraction expansion of (P0 + sqrt(d)) / Q0 for non-square d.
class PQa {
 public:
  PQa(std::int64_t p0, std::int64_t q0, std::int64_t d) : d_(d), s_(isqrt(d)), p_(p0), q_(q0), g2_(-p0), g1_(q0) {}

  /// Advances one step; afterwards g_prev()/b_prev() are G_i, B_i and
  /// p()/q() are P_(i+1), Q_(i+1).
  void step() {
    const std::int64_t a = q_ > 0 ? floor_div(p_ + s_, q_) : -(floor_div(p_ + s_, -q_) + 1);
    const BigInt g = BigInt(a) * g1_ + g2_;
    const BigInt b = BigInt(a) * b1_ + b2_;
    g2_ = g1_;
    g1_ = g;
    b2_ = b1_;
    b1_ = b;
    const std::int64_t pn = a * q_ - p_;
    q_ = (d_ - pn * pn) / q_;
    p_ = pn;
  }
  std::int64_t p() const { return p_; }
  std::int64_t q() const { return q_; }
  const BigInt& g_prev() const { return g1_; }
  const BigInt& b_prev() const { return b1_; }

 private:
  std::int64_t d_, s_, p_, q_;
  BigInt g2_, g1_;
  BigInt b2_ = 1, b1_ = 0;
};

/// Fundamental solutions (t, u) of t^2 - d u^2 = -1 (if any) and = +1.
struct Units {
  std::optional<std::pair<BigInt, BigInt>> negative;
  std::pair<BigInt, BigInt> positive;
};

inline Units fundamental_units(std::int64_t d) {
  PQa cf(0, 1, d);
  std::size_t period = 0;
  std::vector<std::pair<BigInt, BigInt>> convergents;
  do {
    cf.step();
    convergents.emplace_back(cf.g_prev(), cf.b_prev());
    ++period;
  } while (cf.q() != 1);
  Units u;
  if (period % 2 == 1) {
    const auto& [t, v] = convergents.back();
    u.negative = std::make_pair(t, v);
    // Square of the negative unit.
    u.positive = {BigInt(t * t + BigInt(d) * v * v), BigInt(2 * t * v)};
  } else {
    u.positive = convergents.back();
  }
  return u;
}

/// Minimises |b| over the orbit of (a, b) under the unit group.
inline PellSolution reduce_in_class(BigInt a, BigInt b, std::int64_t d, const std::pair<BigInt, BigInt>& unit) {
  const BigInt D(d);
  const auto& [t, u] = unit;
  using Pair = std::pair<BigInt, BigInt>;
  auto forward = [&](const BigInt& x, const BigInt& y) { return Pair(x * t + D * y * u, x * u + y * t); };
  auto backward = [&](const BigInt& x, const BigInt& y) { return Pair(x * t - D * y * u, y * t - x * u); };
  PellSolution best = normalized(a, b);
  for (int dir = 0; dir < 2; ++dir) {
    BigInt x = a, y = b;
    while (true) {
      auto [nx, ny] = dir == 0 ? forward(x, y) : backward(x, y);
      const PellSolution cand = normalized(nx, ny);
      if (!better(cand, normalized(x, y))) break;
      x = nx;
      y = ny;
      if (better(cand, best)) best = cand;
    }
  }
  return best;
}

inline std::optional<PellSolution> solve_square_case(std::int64_t e, std::int64_t n) {
  std::optional<PellSolution> best;
  const std::int64_t an = n < 0 ? -n : n;
  for (std::int64_t u = 1; u <= an; ++u) {
    if (an % u != 0) continue;
    for (std::int64_t su : {u, -u}) {
      const std::int64_t v = n / su;
      if ((su + v) % 2 != 0 || (v - su) % (2 * e) != 0) continue;
      const PellSolution cand = normalized(BigInt((su + v) / 2), BigInt((v - su) / (2 * e)));
      if (!best || better(cand, *best)) best = cand;
    }
  }
  return best;
}

}  // namespace detail

/// Exact decision of a^2 - d b^2 = n (n = +-8, or any nonzero n with
/// |n| small), returning the solution with least b >= 0, then least a >= 0.
inline std::optional<PellSolution> solve_pell_like(std::int64_t d, std::int64_t n) {
  if (d <= 0) throw InputError("d must be positive");
  if (n == 0) throw InputError("right-hand side must be nonzero");
  if (detail::is_square(d)) return detail::solve_square_case(detail::isqrt(d), n);

  const detail::Units units = detail::fundamental_units(d);
  std::optional<PellSolution> best;
  const std::int64_t an = n < 0 ? -n : n;
  for (std::int64_t f = 1; f * f <= an; ++f) {
    if (n % (f * f) != 0) continue;
    const std::int64_t m = n / (f * f);
    const std::int64_t am = m < 0 ? -m : m;
    for (std::int64_t z = -((am - 1) / 2); z <= am / 2; ++z) {
      if (((z * z - d) % am + am) % am != 0) continue;
      detail::PQa cf(z, am, d);
      std::set<std::pair<std::int64_t, std::int64_t>> seen;
      std::optional<std::pair<BigInt, BigInt>> found;
      while (seen.insert({cf.p(), cf.q()}).second) {
        cf.step();
        if (cf.q() == 1 || cf.q() == -1) {
          found = std::make_pair(cf.g_prev(), cf.b_prev());
          break;
        }
      }
      if (!found) continue;
      BigInt x = found->first, y = found->second;
      const BigInt value = x * x - BigInt(d) * y * y;
      if (value == -m) {
        if (!units.negative) continue;
        const auto& [t, u] = *units.negative;
        const BigInt nx = x * t + BigInt(d) * y * u;
        const BigInt ny = x * u + y * t;
        x = nx;
        y = ny;
      } else if (value != m) {
        continue;
      }
      const PellSolution cand = detail::reduce_in_class(BigInt(f) * x, BigInt(f) * y, d, units.positive);
      if (!best || detail::better(cand, *best)) best = cand;
    }
  }
  return best;
}

enum class Classification { Isomorphic, NontriviallyLEquivalent, BrauerObstructed };

inline std::string to_string(Classification c) {
  switch (c) {
    case Classification::Isomorphic:
      return "isomorphic";
    case Classification::NontriviallyLEquivalent:
      return "nontrivially-L-equivalent";
    case Classification::BrauerObstructed:
      return "brauer-obstructed";
  }
  return "?";
}

struct DiscriminantVerdict {
  std::int64_t d = 0;
  bool brauer_vanishes = false;
  std::optional<PellSolution> pell_solution;
  int pell_sign = 0;  // +8 or -8 when a solution is present
  Classification classification = Classification::BrauerObstructed;
};

inline DiscriminantVerdict classify_discriminant(std::int64_t d) {
  if (d <= 0) throw InputError("d must be positive");
  DiscriminantVerdict v;
  v.d = d;
  v.brauer_vanishes = brauer_vanishes(d);
  for (int sign : {8, -8}) {
    if (auto s = solve_pell_like(d, sign)) {
      v.pell_solution = *s;
      v.pell_sign = sign;
      break;
    }
  }
  if (v.pell_solution) {
    v.classification = Classification::Isomorphic;
  } else if (v.brauer_vanishes) {
    v.classification = Classification::NontriviallyLEquivalent;
  } else {
    v.classification = Classification::BrauerObstructed;
  }
  return v;
}

/// Verdicts for lo..hi, in order.
inline std::vector<DiscriminantVerdict> classify_range(std::int64_t lo, std::int64_t hi, Parallelism par = {}) {
  if (lo < 1 || hi < lo) throw InputError("range must satisfy 1 <= lo <= hi");
  const auto total = static_cast<std::uint64_t>(hi - lo + 1);
  auto parts = parallel_map_ranges<std::vector<DiscriminantVerdict>>(total, par, [&](std::uint64_t b, std::uint64_t e) {
    std::vector<DiscriminantVerdict> out;
    for (std::uint64_t i = b; i < e; ++i) out.push_back(classify_discriminant(lo + static_cast<std::int64_t>(i)));
    return out;
  });
  std::vector<DiscriminantVerdict> out;
  for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

inline std::vector<std::int64_t> enumerate_nontrivial(std::int64_t limit, Parallelism par = {}) {
  if (limit < 1) throw InputError("limit must be at least 1");
  std::vector<std::int64_t> out;
  for (const auto& v : classify_range(1, limit, par)) {
    if (v.classification == Classification::NontriviallyLEquivalent) out.push_back(v.d);
  }
  return out;
}

}  // namespace qfib::lattice
