#pragma once

// Quadric-surface fibrations over P^2 coming from two kinds of fourfolds: a
// cubic containing the plane x3 = x4 = x5 = 0, and the double cover of
// P^2 x P^2 branched along a bidegree (2,2) divisor.

#include <array>
#include <cstdint>
#include <vector>

#include "qfib/errors.hpp"
#include "qfib/gfp.hpp"
#include "qfib/matrix.hpp"
#include "qfib/mpoly.hpp"
#include "qfib/netfib/cover.hpp"
#include "qfib/netfib/net.hpp"
#include "qfib/parallel.hpp"
#include "qfib/quadform.hpp"

namespace qfib::netfib {

// ---------------------------------------------------------------- cubic ---

/// F = x3 Q3 + x4 Q4 + x5 Q5, each Q_j stored as a doubled symmetric 6x6
/// integer matrix S_j with Q_j(u) = u^T S_j u / 2.
struct CubicWithPlane {
  HomPoly form{6, 3};
  std::array<IntMatrix, 3> doubled{IntMatrix(6, 6), IntMatrix(6, 6), IntMatrix(6, 6)};

  static CubicWithPlane make(const HomPoly& f) {
    if (f.num_vars() != 6 || f.degree() != 3) throw InputError("cubic form must have 6 variables and degree 3");
    if (f.modulus() != 0) throw InputError("cubic form must have integer coefficients");
    CubicWithPlane c;
    c.form = f;
    for (const auto& [e, coeff] : f.terms()) {
      int j = 3;
      while (j < 6 && e[j] == 0) ++j;
      if (j == 6) throw InputError("cubic does not contain the plane x3 = x4 = x5 = 0");
      Exponents q = e;
      --q[j];
      std::size_t a = 6, b = 6;
      for (std::size_t v = 0; v < 6; ++v) {
        for (int r = 0; r < q[v]; ++r) (a == 6 ? a : b) = v;
      }
      IntMatrix& s = c.doubled[static_cast<std::size_t>(j - 3)];
      const auto k = coeff.convert_to<std::int64_t>();
      if (a == b) {
        s(a, a) += 2 * k;
      } else {
        s(a, b) += k;
        s(b, a) += k;
      }
    }
    return c;
  }
};

/// Gram matrix over F_p of the residual quadric in (x0, x1, x2, lambda) over
/// y in P^2: sum_j y_j Q_j(x0, x1, x2, lambda y).
inline GramMatrix cubic_residual_gram(const CubicWithPlane& c, const ProjPoint& y, const PrimeField& f) {
  ModMatrix t(6, 4);
  for (std::size_t i = 0; i < 3; ++i) {
    t(i, i) = 1;
    t(3 + i, 3) = y[i];
  }
  GramMatrix g(4, 4);
  for (std::size_t j = 0; j < 3; ++j) {
    if (y[j] == 0) continue;
    const ModMatrix part = linalg::congruence(reduce_mod(c.doubled[j], f), t, f);
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b < 4; ++b) g(a, b) = f.add(g(a, b), f.mul(y[j], part(a, b)));
    }
  }
  const Elem half = f.inv(2);
  for (auto& x : g.data()) x = f.mul(x, half);
  return g;
}

struct CubicReport {
  std::uint64_t p = 0;
  std::int64_t X = 0;
  std::int64_t Y = 0;
  std::int64_t residual = 0;  // #X - (1 + p^2 + p^4 + p #Y)
  CorankHistogram corank;
  bool corank2_found = false;
  bool singular_along_plane = false;  // all Q_j vanish at a rational point of the plane

  bool flagged() const { return corank2_found || singular_along_plane; }
  bool passed() const { return residual == 0 && !flagged(); }
};

inline CubicReport cubic_with_plane_count(const CubicWithPlane& c, const PrimeField& f,
                                          std::uint64_t budget = kDefaultEnumerationBudget,
                                          Parallelism par = {}) {
  CubicReport rep;
  rep.p = f.p();
  const std::int64_t p = static_cast<std::int64_t>(f.p());
  const ProjectiveSpace p5(5, f);
  check_budget(p5.size(), budget, "enumerating the cubic");
  const CompiledPoly cubic(c.form, f);
  rep.X = parallel_sum(p5.size(), par, [&](std::uint64_t b, std::uint64_t e) {
    std::int64_t n = 0;
    p5.for_each(b, e, [&](const ProjPoint& v) { n += cubic(v.coords) == 0 ? 1 : 0; });
    return n;
  });
  auto gram_at = [&](const ProjPoint& y) { return cubic_residual_gram(c, y, f); };
  rep.corank = family_corank_histogram(2, 4, gram_at, f, par);
  rep.corank2_found = rep.corank.at_least(2) > 0;
  rep.Y = family_double_cover(2, 4, gram_at, f, par);
  rep.residual = rep.X - (1 + p * p + p * p * p * p + p * rep.Y);

  std::array<ModMatrix, 3> q{reduce_mod(c.doubled[0], f), reduce_mod(c.doubled[1], f),
                             reduce_mod(c.doubled[2], f)};
  ProjectiveSpace(2, f).for_each([&](const ProjPoint& x) {
    const std::vector<Elem> u{x[0], x[1], x[2], 0, 0, 0};
    bool all_zero = true;
    for (const auto& s : q) all_zero = all_zero && linalg::bilinear(s, u, u, f) == 0;
    rep.singular_along_plane = rep.singular_along_plane || all_zero;
  });
  return rep;
}

inline std::vector<CubicReport> cubic_with_plane_counts(const CubicWithPlane& c,
                                                        const std::vector<std::uint64_t>& primes,
                                                        std::uint64_t budget = kDefaultEnumerationBudget,
                                                        Parallelism par = {}) {
  std::vector<CubicReport> out;
  for (auto p : primes) out.push_back(cubic_with_plane_count(c, PrimeField(p), budget, par));
  return out;
}

// ---------------------------------------------------------------- Verra ---

/// G(s, t) = sum T[a][b][c][d] s_a s_b t_c t_d, tensor flattened with index
/// ((a * 3 + b) * 3 + c) * 3 + d.
struct VerraForm {
  std::array<std::int64_t, 81> tensor{};

  static std::size_t index(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return ((a * 3 + b) * 3 + c) * 3 + d;
  }
  std::int64_t at(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    return tensor[index(a, b, c, d)];
  }
  /// The same form with the two P^2 factors exchanged.
  VerraForm swapped() const {
    VerraForm w;
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t c = 0; c < 3; ++c)
          for (std::size_t d = 0; d < 3; ++d) w.tensor[index(c, d, a, b)] = at(a, b, c, d);
    return w;
  }
};

inline Elem verra_value(const VerraForm& g, const ProjPoint& s, const ProjPoint& t, const PrimeField& f) {
  Elem acc = 0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      const Elem sab = f.mul(s[a], s[b]);
      if (sab == 0) continue;
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t d = 0; d < 3; ++d) {
          acc = f.add(acc, f.mul(f.mul(sab, f.mul(t[c], t[d])), f.reduce(g.at(a, b, c, d))));
        }
    }
  return acc;
}

/// Gram of w^2 - G(s, t) in (w, t0, t1, t2) over s: diag(1) + (-A(s)), with
/// A(s)_cd = sum_ab s_a s_b (T_abcd + T_abdc) / 2.
inline GramMatrix verra_fiber_gram(const VerraForm& g, const ProjPoint& s, const PrimeField& f) {
  GramMatrix out(4, 4);
  out(0, 0) = 1;
  const Elem half = f.inv(2);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t d = 0; d < 3; ++d) {
      Elem acc = 0;
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
          const Elem coeff = f.reduce(g.at(a, b, c, d) + g.at(a, b, d, c));
          acc = f.add(acc, f.mul(f.mul(s[a], s[b]), coeff));
        }
      out(c + 1, d + 1) = f.neg(f.mul(acc, half));
    }
  }
  return out;
}

struct VerraReport {
  std::uint64_t p = 0;
  std::int64_t X = 0;
  std::int64_t Y1 = 0;
  std::int64_t Y2 = 0;
  std::int64_t residual1 = 0;   // #X - ((p^2 + 1) #P^2 + p #Y1)
  std::int64_t residual2 = 0;   // #X - ((p^2 + 1) #P^2 + p #Y2)
  std::int64_t residual12 = 0;  // #Y1 - #Y2
  CorankHistogram corank1;
  CorankHistogram corank2;
  bool corank2_found = false;

  bool passed() const { return residual1 == 0 && residual2 == 0 && residual12 == 0 && !corank2_found; }
};

inline VerraReport verra_count(const VerraForm& g, const PrimeField& f, Parallelism par = {}) {
  VerraReport rep;
  rep.p = f.p();
  const std::int64_t p = static_cast<std::int64_t>(f.p());
  const ProjectiveSpace p2(2, f);
  const auto pts = p2.points();
  rep.X = parallel_sum(p2.size(), par, [&](std::uint64_t b, std::uint64_t e) {
    std::int64_t n = 0;
    for (std::uint64_t i = b; i < e; ++i) {
      for (const auto& t : pts) n += 1 + f.legendre(verra_value(g, pts[i], t, f));
    }
    return n;
  });
  const VerraForm h = g.swapped();
  auto gram1 = [&](const ProjPoint& s) { return verra_fiber_gram(g, s, f); };
  auto gram2 = [&](const ProjPoint& t) { return verra_fiber_gram(h, t, f); };
  rep.corank1 = family_corank_histogram(2, 4, gram1, f, par);
  rep.corank2 = family_corank_histogram(2, 4, gram2, f, par);
  rep.corank2_found = rep.corank1.at_least(2) > 0 || rep.corank2.at_least(2) > 0;
  rep.Y1 = family_double_cover(2, 4, gram1, f, par);
  rep.Y2 = family_double_cover(2, 4, gram2, f, par);
  const std::int64_t base = (p * p + 1) * static_cast<std::int64_t>(proj_count(2, f.p()));
  rep.residual1 = rep.X - (base + p * rep.Y1);
  rep.residual2 = rep.X - (base + p * rep.Y2);
  rep.residual12 = rep.Y1 - rep.Y2;
  return rep;
}

inline std::vector<VerraReport> verra_counts(const VerraForm& g, const std::vector<std::uint64_t>& primes,
                                             Parallelism par = {}) {
  std::vector<VerraReport> out;
  for (auto p : primes) out.push_back(verra_count(g, PrimeField(p), par));
  return out;
}

}  // namespace qfib::netfib
