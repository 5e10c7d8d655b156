#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace qfib {

using BigInt = boost::multiprecision::cpp_int;

/// Least nonnegative residue of x modulo p.
inline std::uint64_t mod_reduce(const BigInt& x, std::uint64_t p) {
  BigInt r = x % p;
  if (r < 0) r += p;
  return r.convert_to<std::uint64_t>();
}

inline std::string to_string(const BigInt& x) { return x.str(); }

}  // namespace qfib
