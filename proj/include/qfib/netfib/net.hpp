#pragma once

// Nets of quadrics: Q -> P(W) given by integer symmetric matrices M_0..M_m of
// size n + 2, fiber over s equal to M(s) = sum_i s_i M_i.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfib/errors.hpp"
#include "qfib/gfp.hpp"
#include "qfib/matrix.hpp"
#include "qfib/mpoly.hpp"
#include "qfib/parallel.hpp"
#include "qfib/quadform.hpp"

namespace qfib::netfib {

struct QuadricNet {
  int n = 0;  // fiber quadric dimension
  int m = 0;  // base dimension
  std::vector<IntMatrix> matrices;

  static QuadricNet make(int n, int m, std::vector<IntMatrix> mats) {
    if (n < 0 || m < 0) throw InputError("net dimensions must be nonnegative");
    if (mats.size() != static_cast<std::size_t>(m) + 1) {
      throw InputError("expected " + std::to_string(m + 1) + " matrices, got " +
                       std::to_string(mats.size()));
    }
    const auto size = static_cast<std::size_t>(n) + 2;
    for (std::size_t i = 0; i < mats.size(); ++i) {
      if (mats[i].rows() != size || mats[i].cols() != size) {
        throw InputError("matrix " + std::to_string(i) + " is not " + std::to_string(size) + "x" +
                         std::to_string(size));
      }
      if (!mats[i].is_symmetric()) throw InputError("matrix " + std::to_string(i) + " is not symmetric");
    }
    return QuadricNet{n, m, std::move(mats)};
  }

  std::size_t gram_size() const { return static_cast<std::size_t>(n) + 2; }
  LinearFormMatrix linear_matrix() const { return LinearFormMatrix::from_matrices(matrices); }
};

inline GramMatrix fiber_matrix(const QuadricNet& net, const ProjPoint& s, const PrimeField& f) {
  if (s.size() != net.matrices.size()) throw InputError("base point has wrong dimension");
  const std::size_t n = net.gram_size();
  GramMatrix out(n, n);
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == 0) continue;
    const IntMatrix& mk = net.matrices[k];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out(i, j) = f.add(out(i, j), f.mul(s[k], f.reduce(mk(i, j))));
    }
  }
  return out;
}

/// The m + 1 fiber-independent Gram matrices reduced mod p.
inline std::vector<GramMatrix> reduced_matrices(const QuadricNet& net, const PrimeField& f) {
  std::vector<GramMatrix> out;
  out.reserve(net.matrices.size());
  for (const auto& mk : net.matrices) out.push_back(reduce_mod(mk, f));
  return out;
}

/// counts[c] = number of points of P^m(F_p) whose fiber has corank c.
struct CorankHistogram {
  std::vector<std::uint64_t> counts;

  std::uint64_t at_least(std::size_t c) const {
    std::uint64_t total = 0;
    for (std::size_t i = c; i < counts.size(); ++i) total += counts[i];
    return total;
  }
  /// Flatness: no fiber is the zero form.
  bool flat() const { return counts.empty() || counts.back() == 0; }
  bool operator==(const CorankHistogram&) const = default;
};

/// Histogram over P^m of a family given by gram_at(const ProjPoint&).
template <typename GramAt>
CorankHistogram family_corank_histogram(int base_dim, std::size_t gram_size, GramAt&& gram_at,
                                        const PrimeField& f, Parallelism par = {}) {
  const ProjectiveSpace base(base_dim, f);
  auto parts = parallel_map_ranges<std::vector<std::uint64_t>>(
      base.size(), par, [&](std::uint64_t b, std::uint64_t e) {
        std::vector<std::uint64_t> h(gram_size + 1, 0);
        base.for_each(b, e, [&](const ProjPoint& s) { ++h[classify(gram_at(s), f).corank]; });
        return h;
      });
  CorankHistogram hist{std::vector<std::uint64_t>(gram_size + 1, 0)};
  for (const auto& h : parts) {
    for (std::size_t i = 0; i < h.size(); ++i) hist.counts[i] += h[i];
  }
  return hist;
}

inline CorankHistogram corank_stratification(const QuadricNet& net, const PrimeField& f,
                                             Parallelism par = {}) {
  return family_corank_histogram(
      net.m, net.gram_size(), [&](const ProjPoint& s) { return fiber_matrix(net, s, f); }, f, par);
}

inline bool on_all_quadrics(const std::vector<GramMatrix>& mats, const std::vector<Elem>& v,
                            const PrimeField& f) {
  for (const auto& mk : mats) {
    if (linalg::bilinear(mk, v, v, f) != 0) return false;
  }
  return true;
}

inline void check_budget(std::uint64_t points, std::uint64_t budget, const std::string& what) {
  if (points > budget) {
    throw BudgetExceeded(what + " needs " + std::to_string(points) + " points, budget is " +
                         std::to_string(budget));
  }
}

/// X(F_p) = common zeros of all M_i in P^(n+1), in canonical enumeration order.
inline std::vector<ProjPoint> points_on_X(const QuadricNet& net, const PrimeField& f,
                                          std::uint64_t budget = kDefaultEnumerationBudget,
                                          Parallelism par = {}) {
  const ProjectiveSpace space(net.n + 1, f);
  check_budget(space.size(), budget, "enumerating X");
  const auto mats = reduced_matrices(net, f);
  auto parts = parallel_map_ranges<std::vector<ProjPoint>>(
      space.size(), par, [&](std::uint64_t b, std::uint64_t e) {
        std::vector<ProjPoint> found;
        space.for_each(b, e, [&](const ProjPoint& v) {
          if (on_all_quadrics(mats, v.coords, f)) found.push_back(v);
        });
        return found;
      });
  std::vector<ProjPoint> out;
  for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

inline std::int64_t count_X(const QuadricNet& net, const PrimeField& f,
                            std::uint64_t budget = kDefaultEnumerationBudget, Parallelism par = {}) {
  const ProjectiveSpace space(net.n + 1, f);
  check_budget(space.size(), budget, "counting X");
  const auto mats = reduced_matrices(net, f);
  return parallel_sum(space.size(), par, [&](std::uint64_t b, std::uint64_t e) {
    std::int64_t c = 0;
    space.for_each(b, e, [&](const ProjPoint& v) {
      if (on_all_quadrics(mats, v.coords, f)) ++c;
    });
    return c;
  });
}

/// #Q(F_p) = sum over the base of the fiber quadric counts.
inline std::int64_t count_total_space(const QuadricNet& net, const PrimeField& f, Parallelism par = {}) {
  const ProjectiveSpace base(net.m, f);
  return parallel_sum(base.size(), par, [&](std::uint64_t b, std::uint64_t e) {
    std::int64_t c = 0;
    base.for_each(b, e, [&](const ProjPoint& s) {
      c += static_cast<std::int64_t>(count_projective_points(fiber_matrix(net, s, f), f));
    });
    return c;
  });
}

/// Outcome of the F_p-rational regularity test. HEURISTIC: it certifies the
/// absence of rational violations only; geometric smoothness is not certified.
struct RegularityReport {
  static constexpr bool heuristic = true;
  std::uint64_t violations = 0;                       // (s, u): u in ker M(s) and u in X
  std::optional<std::pair<ProjPoint, ProjPoint>> witness;  // first (s, u) found
  std::uint64_t corank_ge2 = 0;                       // fibers of corank >= 2
  std::uint64_t discriminant_singular_points = 0;     // rational singular points of det M(s) = 0

  bool regular() const { return violations == 0; }
  bool discriminant_smooth() const { return violations == 0 && corank_ge2 == 0; }
};

/// Checks every rational radical vector of every degenerate fiber against X,
/// and locates rational singular points of the discriminant via the Jacobian
/// of det M(s).
inline RegularityReport regularity_check(const QuadricNet& net, const PrimeField& f) {
  RegularityReport rep;
  const auto mats = reduced_matrices(net, f);
  const HomPoly disc = determinant_of_linear_matrix(net.linear_matrix());
  const CompiledPoly disc_eval(disc, f);
  std::vector<CompiledPoly> grads;
  for (std::size_t i = 0; i < disc.num_vars(); ++i) grads.emplace_back(partial_derivative(disc, i), f);

  ProjectiveSpace(net.m, f).for_each([&](const ProjPoint& s) {
    const GramMatrix fib = fiber_matrix(net, s, f);
    const ModMatrix radical = linalg::kernel_basis(fib, f);
    const std::size_t c = radical.cols();
    if (c >= 2) ++rep.corank_ge2;
    if (c >= 1) {
      ProjectiveSpace(static_cast<int>(c) - 1, f).for_each([&](const ProjPoint& lambda) {
        std::vector<Elem> u = linalg::apply(radical, lambda.coords, f);
        if (on_all_quadrics(mats, u, f)) {
          ++rep.violations;
          if (!rep.witness) rep.witness = std::make_pair(s, canonicalize(u, f));
        }
      });
    }
    if (disc_eval(s.coords) == 0) {
      bool singular = true;
      for (const auto& g : grads) singular = singular && g(s.coords) == 0;
      if (singular) ++rep.discriminant_singular_points;
    }
  });
  return rep;
}

/// True when the functionals b_i(P, .) are linearly independent, i.e. P is
/// outside the radical of every fiber (the constant section at P is
/// nondegenerate).
inline bool section_nondegenerate(const QuadricNet& net, const std::vector<Elem>& point,
                                  const PrimeField& f) {
  const auto mats = reduced_matrices(net, f);
  ModMatrix rows(mats.size(), net.gram_size());
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const auto r = linalg::apply(mats[i], point, f);
    for (std::size_t j = 0; j < r.size(); ++j) rows(i, j) = r[j];
  }
  return linalg::rank(rows, f) == mats.size();
}

/// F_p-rational lines through P inside X. Each line is reported by its second
/// point v'' (canonical, zero in P's pivot coordinate): b_i(P, v'') = 0 and
/// q_i(v'') = 0 for all i. HEURISTIC for the geometric condition: lines
/// defined only over an extension are not seen.
inline std::vector<ProjPoint> lines_through_point(const QuadricNet& net, const std::vector<Elem>& point,
                                                  const PrimeField& f) {
  const std::size_t size = net.gram_size();
  if (point.size() != size) throw InputError("point has wrong dimension");
  const ProjPoint pc = canonicalize(point, f);
  const auto mats = reduced_matrices(net, f);
  if (!on_all_quadrics(mats, pc.coords, f)) throw PreconditionError("point is not on X");
  const std::size_t pivot = pc.pivot();
  std::vector<std::vector<Elem>> polar;
  for (const auto& mk : mats) polar.push_back(linalg::apply(mk, pc.coords, f));

  std::vector<ProjPoint> lines;
  std::vector<Elem> lift(size, 0);
  ProjectiveSpace(static_cast<int>(size) - 2, f).for_each([&](const ProjPoint& vp) {
    for (std::size_t j = 0, k = 0; j < size; ++j) lift[j] = j == pivot ? 0 : vp[k++];
    for (std::size_t i = 0; i < mats.size(); ++i) {
      Elem b = 0;
      for (std::size_t j = 0; j < size; ++j) b = f.add(b, f.mul(polar[i][j], lift[j]));
      if (b != 0) return;
    }
    if (on_all_quadrics(mats, lift, f)) lines.push_back(ProjPoint{lift});
  });
  return lines;
}

}  // namespace qfib::netfib
