#pragma once

// Determinant double covers Y -> P^m of even-size quadric families:
// #Y(F_p) = sum_s (1 + chi((-1)^(N/2) det M(s))).

#include <cstdint>

#include "qfib/errors.hpp"
#include "qfib/gfp.hpp"
#include "qfib/matrix.hpp"
#include "qfib/mpoly.hpp"
#include "qfib/netfib/net.hpp"
#include "qfib/parallel.hpp"

namespace qfib::netfib {

/// Double-cover fiber size over s from the determinant of an even-size Gram
/// matrix. The representative of s only changes det by an even power.
inline int double_cover_fiber(Elem det, std::size_t gram_size, const PrimeField& f) {
  if ((gram_size / 2) % 2 == 1) det = f.neg(det);
  return 1 + f.legendre(det);
}

/// Double cover of an arbitrary family gram_at(s) over P^base_dim, using a
/// numeric determinant per fiber.
template <typename GramAt>
std::int64_t family_double_cover(int base_dim, std::size_t gram_size, GramAt&& gram_at,
                                 const PrimeField& f, Parallelism par = {}) {
  if (gram_size % 2 != 0) throw InputError("determinant double cover needs an even Gram size");
  const ProjectiveSpace base(base_dim, f);
  return parallel_sum(base.size(), par, [&](std::uint64_t b, std::uint64_t e) {
    std::int64_t c = 0;
    base.for_each(b, e, [&](const ProjPoint& s) {
      c += double_cover_fiber(linalg::determinant(gram_at(s), f), gram_size, f);
    });
    return c;
  });
}

/// Signed discriminant polynomial (-1)^(N/2) det M(s) of a net, over Z.
inline HomPoly signed_discriminant(const QuadricNet& net) {
  const std::size_t n = net.gram_size();
  if (n % 2 != 0) throw InputError("determinant double cover needs n even");
  HomPoly det = determinant_of_linear_matrix(net.linear_matrix());
  return (n / 2) % 2 == 1 ? -det : det;
}

/// #Y(F_p) for a net, evaluating the discriminant polynomial at canonical
/// representatives.
inline std::int64_t count_double_cover(const QuadricNet& net, const PrimeField& f, Parallelism par = {}) {
  const CompiledPoly disc(signed_discriminant(net), f);
  const ProjectiveSpace base(net.m, f);
  return parallel_sum(base.size(), par, [&](std::uint64_t b, std::uint64_t e) {
    std::int64_t c = 0;
    base.for_each(b, e, [&](const ProjPoint& s) { c += 1 + f.legendre(disc(s.coords)); });
    return c;
  });
}

}  // namespace qfib::netfib
