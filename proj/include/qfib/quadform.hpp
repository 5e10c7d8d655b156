#pragma once

// Single quadratic forms over F_p. Convention: q(v) = v^T M v, b(u, v) = u^T M v.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qfib/errors.hpp"
#include "qfib/gfp.hpp"
#include "qfib/matrix.hpp"

namespace qfib {

using GramMatrix = ModMatrix;

struct Diagonalization {
  std::vector<Elem> diagonal;  // entries of D = A^T M A
  ModMatrix transform;         // A, invertible

  ModMatrix matrix() const {
    ModMatrix d(diagonal.size(), diagonal.size());
    for (std::size_t i = 0; i < diagonal.size(); ++i) d(i, i) = diagonal[i];
    return d;
  }
};

/// rank + corank = size. For rank r = 2t or 2t + 1 the signed discriminant is
/// (-1)^t * det(nondegenerate part); its quadratic character is recorded for
/// every rank (only the even-rank value enters point counts).
struct FormInvariants {
  std::size_t rank = 0;
  std::size_t corank = 0;
  int signed_disc_character = 1;

  bool operator==(const FormInvariants&) const = default;
};

namespace detail {

// Symmetric Gaussian elimination by congruence. Pivot choice: first nonzero
// diagonal entry in row order; otherwise the first nonzero off-diagonal entry
// (i, j) in row order, made diagonal by e_i <- e_i + e_j (needs p odd).
inline std::vector<Elem> diagonal_entries(ModMatrix s, const PrimeField& f, ModMatrix* transform) {
  const std::size_t n = s.rows();
  if (s.cols() != n) throw InputError("Gram matrix must be square");

  auto swap_basis = [&](std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t c = 0; c < n; ++c) std::swap(s(i, c), s(k, c));
    for (std::size_t r = 0; r < n; ++r) std::swap(s(r, i), s(r, k));
    if (transform) {
      for (std::size_t r = 0; r < n; ++r) std::swap((*transform)(r, i), (*transform)(r, k));
    }
  };
  // e_j <- e_j + c * e_k
  auto add_basis = [&](std::size_t j, std::size_t k, Elem c) {
    for (std::size_t col = 0; col < n; ++col) s(j, col) = f.add(s(j, col), f.mul(c, s(k, col)));
    for (std::size_t row = 0; row < n; ++row) s(row, j) = f.add(s(row, j), f.mul(c, s(row, k)));
    if (transform) {
      for (std::size_t row = 0; row < n; ++row) {
        (*transform)(row, j) = f.add((*transform)(row, j), f.mul(c, (*transform)(row, k)));
      }
    }
  };

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = n;
    for (std::size_t i = k; i < n; ++i) {
      if (s(i, i) != 0) {
        piv = i;
        break;
      }
    }
    if (piv == n) {
      for (std::size_t i = k; i < n && piv == n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (s(i, j) != 0) {
            add_basis(i, j, 1);
            piv = i;
            break;
          }
        }
      }
    }
    if (piv == n) break;  // remaining block is zero
    swap_basis(piv, k);
    const Elem inv = f.inv(s(k, k));
    for (std::size_t j = k + 1; j < n; ++j) {
      if (s(k, j) == 0) continue;
      add_basis(j, k, f.neg(f.mul(s(k, j), inv)));
    }
  }
  std::vector<Elem> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = s(i, i);
  return diag;
}

inline FormInvariants invariants_from_diagonal(const std::vector<Elem>& diag, const PrimeField& f) {
  FormInvariants inv;
  Elem det = 1;
  for (Elem d : diag) {
    if (d == 0) continue;
    ++inv.rank;
    det = f.mul(det, d);
  }
  inv.corank = diag.size() - inv.rank;
  if ((inv.rank / 2) % 2 == 1) det = f.neg(det);
  inv.signed_disc_character = f.legendre(det);
  return inv;
}

}  // namespace detail

inline Diagonalization diagonalize(const GramMatrix& m, const PrimeField& f) {
  Diagonalization out;
  out.transform = ModMatrix::identity(m.rows());
  out.diagonal = detail::diagonal_entries(m, f, &out.transform);
  return out;
}

inline FormInvariants classify(const GramMatrix& m, const PrimeField& f) {
  return detail::invariants_from_diagonal(detail::diagonal_entries(m, f, nullptr), f);
}

/// Closed-form #{[v] in P^(N-1)(F_p) : q(v) = 0} from rank, corank and the
/// signed discriminant character.
inline std::uint64_t count_from_invariants(const FormInvariants& inv, std::uint64_t p) {
  const std::size_t r = inv.rank;
  const std::size_t c = inv.corank;
  if (r + c > 0 && static_cast<double>(r + c) * std::log2(static_cast<double>(p)) > 62.0) {
    throw InputError("quadric too large for 64-bit point counts");
  }
  const std::uint64_t pc = ipow(p, static_cast<unsigned>(c));
  const std::uint64_t vertex = (pc - 1) / (p - 1);  // #P^(c-1)
  if (r == 0) return vertex;
  std::int64_t nr = static_cast<std::int64_t>(proj_count(static_cast<int>(r) - 2, p));
  if (r % 2 == 0) {
    nr += inv.signed_disc_character * static_cast<std::int64_t>(ipow(p, static_cast<unsigned>(r / 2 - 1)));
  }
  return static_cast<std::uint64_t>(nr) * pc + vertex;
}

inline std::uint64_t count_projective_points(const GramMatrix& m, const PrimeField& f) {
  return count_from_invariants(classify(m, f), f.p());
}

inline constexpr std::uint64_t kDefaultEnumerationBudget = 50'000'000;

/// Exhaustive count over P^(N-1)(F_p).
inline std::uint64_t brute_force_count(const GramMatrix& m, const PrimeField& f,
                                       std::uint64_t budget = kDefaultEnumerationBudget) {
  const std::size_t n = m.rows();
  if (n == 0) return 0;
  const double points = std::pow(static_cast<double>(f.p()), static_cast<double>(n - 1));
  if (points > static_cast<double>(budget)) {
    throw BudgetExceeded("brute-force quadric count needs ~" + std::to_string(points) +
                         " points, budget is " + std::to_string(budget));
  }
  std::uint64_t count = 0;
  ProjectiveSpace(static_cast<int>(n) - 1, f).for_each([&](const ProjPoint& pt) {
    if (linalg::bilinear(m, pt.coords, pt.coords, f) == 0) ++count;
  });
  return count;
}

/// Gram matrix of the form induced on v^perp / <v>, realised as the
/// orthogonal complement of a hyperbolic plane <v, w> with b(v, w) = 1.
inline GramMatrix hyperbolic_reduce_at_vector(const GramMatrix& m, const std::vector<Elem>& v,
                                              const PrimeField& f) {
  const std::size_t n = m.rows();
  if (v.size() != n) throw InputError("vector length differs from Gram size");
  if (linalg::bilinear(m, v, v, f) != 0) throw PreconditionError("vector is not isotropic");
  const std::vector<Elem> mv = linalg::apply(m, v, f);
  std::size_t i = 0;
  while (i < n && mv[i] == 0) ++i;
  if (i == n) throw PreconditionError("vector lies in the radical (degenerate section)");
  std::vector<Elem> w(n, 0);
  w[i] = f.inv(mv[i]);
  const std::vector<Elem> mw = linalg::apply(m, w, f);
  ModMatrix constraints(2, n);
  for (std::size_t j = 0; j < n; ++j) {
    constraints(0, j) = mv[j];
    constraints(1, j) = mw[j];
  }
  const ModMatrix basis = linalg::kernel_basis(constraints, f);
  return linalg::congruence(m, basis, f);
}

/// Over F_p (p odd) nondegenerate forms are classified by dimension and
/// discriminant class; a degenerate form is the sum of its radical and a
/// nondegenerate part, so rank plus the signed discriminant character decide.
inline bool forms_congruent(const GramMatrix& a, const GramMatrix& b, const PrimeField& f) {
  if (a.rows() != b.rows()) throw InputError("forms_congruent needs equal sizes");
  return classify(a, f) == classify(b, f);
}

}  // namespace qfib
