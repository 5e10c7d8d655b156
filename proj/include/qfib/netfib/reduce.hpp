#pragma once

// Hyperbolic reduction of a net along a constant isotropic subspace U, in the
// complete-intersection model inside P(W) x P(V/U): k + 1 bilinear (1,1)
// conditions B_j(w, v') = u_j^T M(w) v'' and one (1,2) condition
// v''^T M(w) v'' = 0, where v'' lifts v' by zeros in the pivot coordinates of U.

#include <cstdint>
#include <string>
#include <vector>

#include "qfib/bigint.hpp"
#include "qfib/errors.hpp"
#include "qfib/gfp.hpp"
#include "qfib/matrix.hpp"
#include "qfib/netfib/cover.hpp"
#include "qfib/netfib/net.hpp"
#include "qfib/parallel.hpp"
#include "qfib/quadform.hpp"

namespace qfib::netfib {

struct ReducedFamily {
  int n = 0;                       // fiber dimension of the original family
  int m = 0;                       // base dimension
  int k = 0;                       // the section is a family of P^k's
  std::uint64_t modulus = 0;       // 0: data over Z; p: data over F_p
  std::vector<std::size_t> pivots;       // coordinates deleted to realise V/U
  std::vector<std::size_t> complement;   // coordinates kept (n - k + 1 of them)
  std::vector<IntMatrix> bilinear_forms; // k + 1 matrices, (m + 1) x (n - k + 1)
  std::vector<IntMatrix> quad_forms;     // m + 1 symmetric (n - k + 1)^2 matrices

  std::size_t ambient_size() const { return complement.size(); }         // dim V/U
  std::size_t reduced_gram_size() const { return static_cast<std::size_t>(n - 2 * k); }
};

namespace detail {

// Pivot columns of the echelon form of the rows of `basis` over Q (modulus 0)
// or F_p. Fraction-free elimination keeps the Q case exact.
inline std::vector<std::size_t> echelon_pivots(const std::vector<std::vector<std::int64_t>>& basis,
                                               std::size_t cols, std::uint64_t modulus) {
  std::vector<std::vector<BigInt>> a;
  for (const auto& row : basis) {
    std::vector<BigInt> r(row.begin(), row.end());
    if (modulus != 0) {
      for (auto& x : r) {
        x %= modulus;
        if (x < 0) x += modulus;
      }
    }
    a.push_back(std::move(r));
  }
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
    std::size_t piv = row;
    while (piv < a.size() && a[piv][col] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[piv], a[row]);
    for (std::size_t i = row + 1; i < a.size(); ++i) {
      if (a[i][col] == 0) continue;
      const BigInt lead = a[row][col];
      const BigInt factor = a[i][col];
      for (std::size_t j = 0; j < cols; ++j) {
        a[i][j] = lead * a[i][j] - factor * a[row][j];
        if (modulus != 0) {
          a[i][j] %= modulus;
          if (a[i][j] < 0) a[i][j] += modulus;
        }
      }
    }
    pivots.push_back(col);
    ++row;
  }
  if (pivots.size() != a.size()) throw PreconditionError("section basis vectors are linearly dependent");
  return pivots;
}

inline BigInt reduce_big(const BigInt& x, std::uint64_t modulus) {
  if (modulus == 0) return x;
  BigInt r = x % modulus;
  if (r < 0) r += modulus;
  return r;
}

}  // namespace detail

/// Builds the reduced family for U = span(U_basis). Isotropy is checked
/// exactly: over Z when modulus == 0, over F_p otherwise. Nondegeneracy is a
/// per-fiber property and is checked when fibers are formed.
inline ReducedFamily hyperbolic_reduce_family(const QuadricNet& net,
                                              const std::vector<std::vector<std::int64_t>>& u_basis,
                                              std::uint64_t modulus = 0) {
  const std::size_t size = net.gram_size();
  if (u_basis.empty()) throw InputError("section basis is empty");
  if (modulus != 0) PrimeField check(modulus);
  for (const auto& u : u_basis) {
    if (u.size() != size) throw InputError("section vector has wrong dimension");
  }
  const std::size_t k1 = u_basis.size();
  if (2 * k1 > size) throw PreconditionError("isotropic subspace too large for the fiber form");

  for (const auto& mk : net.matrices) {
    for (std::size_t a = 0; a < k1; ++a) {
      for (std::size_t b = a; b < k1; ++b) {
        BigInt acc = 0;
        for (std::size_t i = 0; i < size; ++i) {
          for (std::size_t j = 0; j < size; ++j) acc += BigInt(u_basis[a][i]) * mk(i, j) * u_basis[b][j];
        }
        if (detail::reduce_big(acc, modulus) != 0) {
          throw PreconditionError("section basis is not isotropic for every quadric of the family");
        }
      }
    }
  }

  ReducedFamily red;
  red.n = net.n;
  red.m = net.m;
  red.k = static_cast<int>(k1) - 1;
  red.modulus = modulus;
  red.pivots = detail::echelon_pivots(u_basis, size, modulus);
  for (std::size_t j = 0, pi = 0; j < size; ++j) {
    if (pi < red.pivots.size() && red.pivots[pi] == j) {
      ++pi;
    } else {
      red.complement.push_back(j);
    }
  }
  const std::size_t amb = red.complement.size();
  for (std::size_t a = 0; a < k1; ++a) {
    IntMatrix b(net.matrices.size(), amb);
    for (std::size_t i = 0; i < net.matrices.size(); ++i) {
      for (std::size_t c = 0; c < amb; ++c) {
        BigInt acc = 0;
        for (std::size_t r = 0; r < size; ++r) acc += BigInt(u_basis[a][r]) * net.matrices[i](r, red.complement[c]);
        b(i, c) = detail::reduce_big(acc, modulus).convert_to<std::int64_t>();
      }
    }
    red.bilinear_forms.push_back(std::move(b));
  }
  for (const auto& mk : net.matrices) {
    IntMatrix q(amb, amb);
    for (std::size_t r = 0; r < amb; ++r) {
      for (std::size_t c = 0; c < amb; ++c) {
        q(r, c) = detail::reduce_big(mk(red.complement[r], red.complement[c]), modulus).convert_to<std::int64_t>();
      }
    }
    red.quad_forms.push_back(std::move(q));
  }
  return red;
}

/// Constant k = 0 section at a point of X(F_p) (coordinates mod p).
inline ReducedFamily reduce_at_point(const QuadricNet& net, const std::vector<Elem>& point,
                                     const PrimeField& f) {
  std::vector<std::int64_t> u(point.begin(), point.end());
  return hyperbolic_reduce_family(net, {u}, f.p());
}

inline void check_field(const ReducedFamily& red, const PrimeField& f) {
  if (red.modulus != 0 && red.modulus != f.p()) {
    throw InputError("reduced family was built over F_" + std::to_string(red.modulus) +
                     ", cannot count over F_" + std::to_string(f.p()));
  }
}

/// Linear conditions B(s) ((k+1) x dim V/U) and quadratic part Q(s) at s.
struct ReducedFiberData {
  ModMatrix conditions;
  GramMatrix quad;
};

inline ReducedFiberData reduced_fiber_data(const ReducedFamily& red, const ProjPoint& s,
                                           const PrimeField& f) {
  check_field(red, f);
  const std::size_t amb = red.ambient_size();
  ReducedFiberData d{ModMatrix(red.bilinear_forms.size(), amb), GramMatrix(amb, amb)};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 0) continue;
    for (std::size_t j = 0; j < red.bilinear_forms.size(); ++j) {
      for (std::size_t c = 0; c < amb; ++c) {
        d.conditions(j, c) = f.add(d.conditions(j, c), f.mul(s[i], f.reduce(red.bilinear_forms[j](i, c))));
      }
    }
    for (std::size_t r = 0; r < amb; ++r) {
      for (std::size_t c = 0; c < amb; ++c) {
        d.quad(r, c) = f.add(d.quad(r, c), f.mul(s[i], f.reduce(red.quad_forms[i](r, c))));
      }
    }
  }
  return d;
}

/// The quadric of the fiber over s restricted to {B(s, .) = 0}, in a kernel
/// basis. Its size is n - 2k exactly when the section is nondegenerate at s.
inline GramMatrix reduced_fiber(const ReducedFamily& red, const ProjPoint& s, const PrimeField& f) {
  const ReducedFiberData d = reduced_fiber_data(red, s, f);
  const ModMatrix basis = linalg::kernel_basis(d.conditions, f);
  return linalg::congruence(d.quad, basis, f);
}

/// Same as reduced_fiber but refuses fibers where the section degenerates.
inline GramMatrix reduced_fiber_checked(const ReducedFamily& red, const ProjPoint& s, const PrimeField& f) {
  GramMatrix g = reduced_fiber(red, s, f);
  if (g.rows() != red.reduced_gram_size()) {
    throw PreconditionError("section is degenerate over a rational point of the base");
  }
  return g;
}

/// #Qbar(F_p) counted over the base P^m: each fiber is a quadric inside the
/// linear space {B(s, .) = 0} of P(V/U).
inline std::int64_t count_reduced_family(const ReducedFamily& red, const PrimeField& f, Parallelism par = {}) {
  check_field(red, f);
  const ProjectiveSpace base(red.m, f);
  return parallel_sum(base.size(), par, [&](std::uint64_t b, std::uint64_t e) {
    std::int64_t c = 0;
    base.for_each(b, e, [&](const ProjPoint& s) {
      const GramMatrix g = reduced_fiber(red, s, f);
      if (g.rows() > 0) c += static_cast<std::int64_t>(count_projective_points(g, f));
    });
    return c;
  });
}

/// #Qbar(F_p) counted over P(V/U) instead: the fiber over v' is the linear
/// subspace of P^m cut out by the k + 2 linear forms s -> B_j(s, v'),
/// s -> q(s)(v', v').
inline std::int64_t count_reduced_family_dual(const ReducedFamily& red, const PrimeField& f,
                                              Parallelism par = {}) {
  check_field(red, f);
  const std::size_t amb = red.ambient_size();
  const std::size_t base_vars = static_cast<std::size_t>(red.m) + 1;
  std::vector<ModMatrix> bil;
  for (const auto& b : red.bilinear_forms) bil.push_back(reduce_mod(b, f));
  std::vector<GramMatrix> quads;
  for (const auto& q : red.quad_forms) quads.push_back(reduce_mod(q, f));
  const ProjectiveSpace fiber_space(static_cast<int>(amb) - 1, f);
  return parallel_sum(fiber_space.size(), par, [&](std::uint64_t b, std::uint64_t e) {
    std::int64_t c = 0;
    ModMatrix forms(bil.size() + 1, base_vars);
    fiber_space.for_each(b, e, [&](const ProjPoint& v) {
      for (std::size_t j = 0; j < bil.size(); ++j) {
        const auto row = linalg::apply(bil[j], v.coords, f);
        for (std::size_t i = 0; i < base_vars; ++i) forms(j, i) = row[i];
      }
      for (std::size_t i = 0; i < base_vars; ++i) forms(bil.size(), i) = linalg::bilinear(quads[i], v.coords, v.coords, f);
      const auto r = linalg::rank(forms, f);
      c += static_cast<std::int64_t>(proj_count(red.m - static_cast<int>(r), f.p()));
    });
    return c;
  });
}

inline CorankHistogram reduced_corank_stratification(const ReducedFamily& red, const PrimeField& f,
                                                     Parallelism par = {}) {
  return family_corank_histogram(
      red.m, red.reduced_gram_size(), [&](const ProjPoint& s) { return reduced_fiber_checked(red, s, f); }, f,
      par);
}

/// Determinant double cover of the reduced family (reduced Gram size even).
inline std::int64_t count_double_cover(const ReducedFamily& red, const PrimeField& f, Parallelism par = {}) {
  return family_double_cover(
      red.m, red.reduced_gram_size(), [&](const ProjPoint& s) { return reduced_fiber_checked(red, s, f); }, f,
      par);
}

}  // namespace qfib::netfib
