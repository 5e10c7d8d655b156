#pragma once

// Homogeneous multivariate polynomials over Z or F_p, and determinants of
// matrices whose entries are linear forms.

#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "qfib/bigint.hpp"
#include "qfib/errors.hpp"
#include "qfib/gfp.hpp"
#include "qfib/matrix.hpp"

namespace qfib {

using Exponents = std::vector<std::uint16_t>;

/// Sparse homogeneous polynomial. Coefficients live in Z when modulus() == 0
/// and in F_p (stored as 0..p-1) when modulus() == p. Every stored exponent
/// vector sums to degree() and no stored coefficient is zero.
class HomPoly {
 public:
  HomPoly(std::size_t num_vars, unsigned degree, std::uint64_t modulus = 0)
      : num_vars_(num_vars), degree_(degree), modulus_(modulus) {}

  static HomPoly constant(std::size_t num_vars, const BigInt& c, std::uint64_t modulus = 0) {
    HomPoly f(num_vars, 0, modulus);
    f.add_term(Exponents(num_vars, 0), c);
    return f;
  }

  static HomPoly linear_form(std::span<const std::int64_t> coeffs, std::uint64_t modulus = 0) {
    HomPoly f(coeffs.size(), 1, modulus);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      Exponents e(coeffs.size(), 0);
      e[i] = 1;
      f.add_term(e, coeffs[i]);
    }
    return f;
  }

  std::size_t num_vars() const { return num_vars_; }
  unsigned degree() const { return degree_; }
  std::uint64_t modulus() const { return modulus_; }
  const std::map<Exponents, BigInt>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  BigInt coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? BigInt(0) : it->second;
  }

  /// Adds c * x^e; exponent vector must have the right length and total degree.
  void add_term(const Exponents& e, const BigInt& c) {
    if (e.size() != num_vars_) throw InputError("exponent vector has wrong length");
    unsigned total = 0;
    for (auto x : e) total += x;
    if (total != degree_) throw InputError("monomial degree differs from polynomial degree");
    BigInt& slot = terms_[e];
    slot = normalize(slot + c);
    if (slot == 0) terms_.erase(e);
  }

  HomPoly reduced(std::uint64_t p) const {
    HomPoly out(num_vars_, degree_, p);
    for (const auto& [e, c] : terms_) out.add_term(e, c);
    return out;
  }

  HomPoly operator-() const {
    HomPoly out(num_vars_, degree_, modulus_);
    for (const auto& [e, c] : terms_) out.add_term(e, -c);
    return out;
  }

  friend HomPoly operator+(const HomPoly& a, const HomPoly& b) {
    check_compatible(a, b);
    if (a.is_zero() && a.degree_ != b.degree_) return b;
    if (b.is_zero() && a.degree_ != b.degree_) return a;
    if (a.degree_ != b.degree_) throw InputError("cannot add homogeneous polynomials of different degrees");
    HomPoly out = a;
    for (const auto& [e, c] : b.terms_) out.add_term(e, c);
    return out;
  }

  friend HomPoly operator-(const HomPoly& a, const HomPoly& b) { return a + (-b); }

  friend HomPoly operator*(const HomPoly& a, const HomPoly& b) {
    check_compatible(a, b);
    HomPoly out(a.num_vars_, a.degree_ + b.degree_, a.modulus_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<std::uint16_t>(ea[i] + eb[i]);
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  friend HomPoly operator*(const BigInt& s, const HomPoly& a) {
    HomPoly out(a.num_vars_, a.degree_, a.modulus_);
    for (const auto& [e, c] : a.terms_) out.add_term(e, s * c);
    return out;
  }

  bool operator==(const HomPoly& o) const {
    return num_vars_ == o.num_vars_ && modulus_ == o.modulus_ && terms_ == o.terms_ &&
           (degree_ == o.degree_ || terms_.empty());
  }

  std::string to_string(const std::string& var = "x") const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      BigInt mag = c < 0 ? BigInt(-c) : c;
      os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
      bool has_var = false;
      for (auto x : e) has_var = has_var || x > 0;
      if (mag != 1 || !has_var) os << mag;
      bool need_star = mag != 1;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (need_star) os << "*";
        os << var << i;
        if (e[i] > 1) os << "^" << e[i];
        need_star = true;
      }
      first = false;
    }
    return os.str();
  }

 private:
  static void check_compatible(const HomPoly& a, const HomPoly& b) {
    if (a.num_vars_ != b.num_vars_) throw InputError("polynomials have different variable counts");
    if (a.modulus_ != b.modulus_) throw InputError("polynomials live over different rings");
  }

  BigInt normalize(BigInt c) const {
    if (modulus_ == 0) return c;
    c %= modulus_;
    if (c < 0) c += modulus_;
    return c;
  }

  std::size_t num_vars_;
  unsigned degree_;
  std::uint64_t modulus_;
  std::map<Exponents, BigInt> terms_;
};

/// Exact value of f at an integer point (f over Z).
inline BigInt evaluate_integer(const HomPoly& f, std::span<const BigInt> point) {
  if (point.size() != f.num_vars()) throw InputError("evaluation point has wrong length");
  BigInt total = 0;
  for (const auto& [e, c] : f.terms()) {
    BigInt term = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (unsigned k = 0; k < e[i]; ++k) term *= point[i];
    }
    total += term;
  }
  if (f.modulus() != 0) {
    total %= f.modulus();
    if (total < 0) total += f.modulus();
  }
  return total;
}

/// f(point) mod p. Works for f over Z or over F_p (same p).
inline Elem evaluate(const HomPoly& f, std::span<const Elem> point, const PrimeField& field) {
  if (point.size() != f.num_vars()) throw InputError("evaluation point has wrong length");
  if (f.modulus() != 0 && f.modulus() != field.p()) {
    throw InputError("polynomial modulus differs from evaluation field");
  }
  Elem total = 0;
  for (const auto& [e, c] : f.terms()) {
    Elem term = mod_reduce(c, field.p());
    for (std::size_t i = 0; i < e.size() && term != 0; ++i) {
      if (e[i] != 0) term = field.mul(term, field.pow(point[i], e[i]));
    }
    total = field.add(total, term);
  }
  return total;
}

/// f reduced mod p in a flat layout for fast repeated evaluation.
class CompiledPoly {
 public:
  CompiledPoly(const HomPoly& f, const PrimeField& field)
      : field_(field), num_vars_(f.num_vars()), degree_(f.degree()) {
    for (const auto& [e, c] : f.terms()) {
      const Elem r = mod_reduce(c, field.p());
      if (r == 0) continue;
      coeffs_.push_back(r);
      exps_.insert(exps_.end(), e.begin(), e.end());
    }
  }

  Elem operator()(std::span<const Elem> point) const {
    // powers[i * (degree + 1) + k] = x_i^k
    std::vector<Elem> powers(num_vars_ * (degree_ + 1));
    for (std::size_t i = 0; i < num_vars_; ++i) {
      Elem acc = 1;
      for (unsigned k = 0; k <= degree_; ++k) {
        powers[i * (degree_ + 1) + k] = acc;
        acc = field_.mul(acc, point[i]);
      }
    }
    Elem total = 0;
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
      Elem term = coeffs_[t];
      for (std::size_t i = 0; i < num_vars_; ++i) {
        term = field_.mul(term, powers[i * (degree_ + 1) + exps_[t * num_vars_ + i]]);
      }
      total = field_.add(total, term);
    }
    return total;
  }

 private:
  PrimeField field_;
  std::size_t num_vars_;
  unsigned degree_;
  std::vector<Elem> coeffs_;
  std::vector<std::uint16_t> exps_;
};

inline HomPoly partial_derivative(const HomPoly& f, std::size_t var) {
  if (var >= f.num_vars()) throw InputError("derivative variable out of range");
  HomPoly out(f.num_vars(), f.degree() == 0 ? 0 : f.degree() - 1, f.modulus());
  for (const auto& [e, c] : f.terms()) {
    if (e[var] == 0) continue;
    Exponents d = e;
    d[var] = static_cast<std::uint16_t>(d[var] - 1);
    out.add_term(d, c * e[var]);
  }
  return out;
}

/// N x N matrix of linear forms in `vars` variables: entry(i, j) is the
/// coefficient vector of a linear form.
class LinearFormMatrix {
 public:
  LinearFormMatrix(std::size_t size, std::size_t vars)
      : size_(size), vars_(vars), coeffs_(size * size * vars, 0) {}

  /// M(s) = sum_k s_k * mats[k].
  static LinearFormMatrix from_matrices(const std::vector<IntMatrix>& mats) {
    if (mats.empty()) throw InputError("need at least one matrix");
    const std::size_t n = mats.front().rows();
    LinearFormMatrix out(n, mats.size());
    for (std::size_t k = 0; k < mats.size(); ++k) {
      if (mats[k].rows() != n || mats[k].cols() != n) throw InputError("matrices have mismatched sizes");
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out.coeff(i, j, k) = mats[k](i, j);
      }
    }
    return out;
  }

  std::size_t size() const { return size_; }
  std::size_t vars() const { return vars_; }

  std::int64_t& coeff(std::size_t i, std::size_t j, std::size_t k) {
    return coeffs_[(i * size_ + j) * vars_ + k];
  }
  std::int64_t coeff(std::size_t i, std::size_t j, std::size_t k) const {
    return coeffs_[(i * size_ + j) * vars_ + k];
  }
  std::span<const std::int64_t> entry(std::size_t i, std::size_t j) const {
    return {coeffs_.data() + (i * size_ + j) * vars_, vars_};
  }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < size_; ++i) {
      for (std::size_t j = i + 1; j < size_; ++j) {
        for (std::size_t k = 0; k < vars_; ++k) {
          if (coeff(i, j, k) != coeff(j, i, k)) return false;
        }
      }
    }
    return true;
  }

  ModMatrix at(std::span<const Elem> s, const PrimeField& f) const {
    if (s.size() != vars_) throw InputError("evaluation point has wrong length");
    ModMatrix out(size_, size_);
    for (std::size_t i = 0; i < size_; ++i) {
      for (std::size_t j = 0; j < size_; ++j) {
        Elem acc = 0;
        for (std::size_t k = 0; k < vars_; ++k) acc = f.add(acc, f.mul(f.reduce(coeff(i, j, k)), s[k]));
        out(i, j) = acc;
      }
    }
    return out;
  }

 private:
  std::size_t size_;
  std::size_t vars_;
  std::vector<std::int64_t> coeffs_;
};

/// det M(s) as a homogeneous polynomial of degree N in the base variables.
///
/// Laplace expansion along successive rows, memoized on the set of remaining
/// columns: 2^N sub-determinants, no division, exact over Z.
inline HomPoly determinant_of_linear_matrix(const LinearFormMatrix& m, std::uint64_t modulus = 0) {
  const std::size_t n = m.size();
  if (n > 24) throw InputError("determinant expansion limited to 24x24");
  std::vector<HomPoly> entries;
  entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) entries.push_back(HomPoly::linear_form(m.entry(i, j), modulus));
  }
  std::unordered_map<std::uint32_t, HomPoly> memo;
  // minor(cols): determinant of rows [n - |cols|, n) restricted to cols.
  auto minor = [&](auto&& self, std::uint32_t cols) -> HomPoly {
    if (cols == 0) return HomPoly::constant(m.vars(), 1, modulus);
    if (auto it = memo.find(cols); it != memo.end()) return it->second;
    const auto width = static_cast<std::size_t>(__builtin_popcount(cols));
    const std::size_t row = n - width;
    HomPoly acc(m.vars(), static_cast<unsigned>(width), modulus);
    int sign = 1;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(cols & (1U << c))) continue;
      const HomPoly& e = entries[row * n + c];
      if (!e.is_zero()) {
        HomPoly term = e * self(self, cols & ~(1U << c));
        acc = sign > 0 ? acc + term : acc - term;
      }
      sign = -sign;
    }
    memo.emplace(cols, acc);
    return acc;
  };
  const std::uint32_t all = n == 0 ? 0 : static_cast<std::uint32_t>((1ULL << n) - 1);
  return minor(minor, all);
}

}  // namespace qfib
