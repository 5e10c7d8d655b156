#pragma once

// Per-prime point-count checks of the relations between X, Q, Qbar_P and Y
// for (n, m) = (4, 2) nets and (2, 1) pencils.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfib/errors.hpp"
#include "qfib/gfp.hpp"
#include "qfib/netfib/cover.hpp"
#include "qfib/netfib/net.hpp"
#include "qfib/netfib/reduce.hpp"
#include "qfib/parallel.hpp"
#include "qfib/quadform.hpp"

namespace qfib::netfib {

struct Residual {
  std::string name;
  std::int64_t value = 0;
  bool operator==(const Residual&) const = default;
};

struct ReportFlags {
  bool corank2_found = false;
  bool regularity_violation = false;
  bool line_through_P_found = false;
  bool no_rational_point = false;
  bool point_not_on_X = false;
  bool degenerate_section = false;

  bool any() const {
    return corank2_found || regularity_violation || line_through_P_found || no_rational_point ||
           point_not_on_X || degenerate_section;
  }
  bool operator==(const ReportFlags&) const = default;
};

struct CountReport {
  std::uint64_t p = 0;
  int n = 0;
  int m = 0;
  std::int64_t X = 0;
  std::int64_t Q = 0;
  std::int64_t Y = 0;
  std::optional<std::int64_t> Qbar;  // absent when no point P is available
  std::optional<ProjPoint> point;
  CorankHistogram corank;
  std::vector<Residual> residuals;
  ReportFlags flags;

  bool residuals_zero() const {
    for (const auto& r : residuals) {
      if (r.value != 0) return false;
    }
    return true;
  }
  /// A prime with raised flags is reported but not counted as a failure.
  bool skipped() const { return flags.any(); }
  bool passed() const { return residuals_zero() && !flags.any(); }
  std::optional<std::int64_t> residual(const std::string& name) const {
    for (const auto& r : residuals) {
      if (r.name == name) return r.value;
    }
    return std::nullopt;
  }
};

struct RelationOptions {
  std::uint64_t budget = kDefaultEnumerationBudget;
  Parallelism par{};
};

inline void check_relation_shape(const QuadricNet& net) {
  const bool net42 = net.n == 4 && net.m == 2;
  const bool pencil = net.n == 2 && net.m == 1;
  if (!net42 && !pencil) {
    throw InputError("relations are defined for (n, m) = (4, 2) or (2, 1), got (" + std::to_string(net.n) +
                     ", " + std::to_string(net.m) + ")");
  }
}

namespace detail {

inline std::vector<Elem> reduce_point(const std::vector<std::int64_t>& pt, const PrimeField& f) {
  std::vector<Elem> out;
  out.reserve(pt.size());
  for (auto x : pt) out.push_back(f.reduce(x));
  return out;
}

inline bool is_zero_vector(const std::vector<Elem>& v) {
  for (auto x : v) {
    if (x != 0) return false;
  }
  return true;
}

}  // namespace detail

/// Single-prime report. `given_point`, when present, is an integer point of X
/// reduced mod p; otherwise the first rational point of X with a
/// nondegenerate section and no rational line through it is used.
inline CountReport count_report(const QuadricNet& net, const PrimeField& f,
                                const std::optional<std::vector<std::int64_t>>& given_point = std::nullopt,
                                const RelationOptions& opt = {}) {
  check_relation_shape(net);
  if (given_point && given_point->size() != net.gram_size()) throw InputError("point has wrong dimension");
  const std::int64_t p = static_cast<std::int64_t>(f.p());
  auto P = [&](int k) { return static_cast<std::int64_t>(proj_count(k, f.p())); };

  CountReport rep;
  rep.p = f.p();
  rep.n = net.n;
  rep.m = net.m;
  rep.corank = corank_stratification(net, f, opt.par);
  rep.flags.corank2_found = rep.corank.at_least(2) > 0;
  rep.flags.regularity_violation = !regularity_check(net, f).regular();

  const auto xs = points_on_X(net, f, opt.budget, opt.par);
  rep.X = static_cast<std::int64_t>(xs.size());
  rep.Q = count_total_space(net, f, opt.par);
  rep.Y = count_double_cover(net, f, opt.par);

  std::optional<ProjPoint> chosen;
  if (given_point) {
    const auto v = detail::reduce_point(*given_point, f);
    if (detail::is_zero_vector(v) || !on_all_quadrics(reduced_matrices(net, f), v, f)) {
      rep.flags.point_not_on_X = true;
    } else {
      chosen = canonicalize(v, f);
    }
  } else if (xs.empty()) {
    rep.flags.no_rational_point = true;
  } else {
    for (const auto& x : xs) {
      if (section_nondegenerate(net, x.coords, f) && lines_through_point(net, x.coords, f).empty()) {
        chosen = x;
        break;
      }
    }
    if (!chosen) chosen = xs.front();
  }
  if (chosen) {
    rep.point = chosen;
    rep.flags.degenerate_section = !section_nondegenerate(net, chosen->coords, f);
    rep.flags.line_through_P_found = !lines_through_point(net, chosen->coords, f).empty();
    rep.Qbar = count_reduced_family(reduce_at_point(net, chosen->coords, f), f, opt.par);
  }

  const std::int64_t pm = net.m == 2 ? p * p : p;
  if (net.m == 2) {
    rep.residuals.push_back({"R1", rep.Q - (P(5) * P(1) + rep.X * pm)});
    if (rep.Qbar) {
      rep.residuals.push_back({"R2", *rep.Qbar - (P(4) + p * p + rep.X * p)});
      rep.residuals.push_back({"R3", *rep.Qbar - (P(2) * (1 + p * p) + rep.Y * p)});
    }
    rep.residuals.push_back({"R4", rep.X - rep.Y});
    if (rep.Qbar) rep.residuals.push_back({"Rhyp", rep.Q - (P(2) * (1 + p * p * p * p) + p * *rep.Qbar)});
  } else {
    rep.residuals.push_back({"R1'", rep.Q - (P(3) + rep.X * p)});
    rep.residuals.push_back({"R3'", rep.Q - (P(1) * (1 + p * p) + rep.Y * p)});
    rep.residuals.push_back({"R4'", rep.X - rep.Y});
    if (rep.Qbar) {
      rep.residuals.push_back({"Rbar'", *rep.Qbar - rep.Y});
      rep.residuals.push_back({"Rhyp", rep.Q - (P(1) * (1 + p * p) + p * *rep.Qbar)});
    }
  }
  return rep;
}

inline std::vector<CountReport> verify_relations(const QuadricNet& net, const std::vector<std::uint64_t>& primes,
                                                 const std::optional<std::vector<std::int64_t>>& point = std::nullopt,
                                                 const RelationOptions& opt = {}) {
  check_relation_shape(net);
  std::vector<CountReport> out;
  out.reserve(primes.size());
  for (auto p : primes) out.push_back(count_report(net, PrimeField(p), point, opt));
  return out;
}

}  // namespace qfib::netfib
