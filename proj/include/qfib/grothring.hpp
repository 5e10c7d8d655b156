#pragma once

// Formal Z[L]-linear combinations of monomials in opaque variety atoms, with
// the fibration, blowup and hyperbolic-reduction relations as explicit
// equations. Nothing here divides by L.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <iterator>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qfib/bigint.hpp"
#include "qfib/errors.hpp"

namespace qfib::groth {

/// Polynomial in L with integer coefficients; coeffs[i] multiplies L^i, no
/// trailing zeros.
class LPoly {
 public:
  LPoly() = default;
  LPoly(BigInt c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) coeffs_.push_back(std::move(c));
  }
  static LPoly monomial(unsigned power, BigInt c = 1) {
    LPoly out;
    if (c == 0) return out;
    out.coeffs_.assign(power + 1, BigInt(0));
    out.coeffs_[power] = std::move(c);
    return out;
  }

  const std::vector<BigInt>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// Largest r with L^r dividing this polynomial (0 for the zero polynomial).
  unsigned l_valuation() const {
    unsigned r = 0;
    while (r < coeffs_.size() && coeffs_[r] == 0) ++r;
    return r == coeffs_.size() ? 0 : r;
  }

  friend LPoly operator+(const LPoly& a, const LPoly& b) {
    LPoly out;
    out.coeffs_.resize(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out.coeffs_[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out.coeffs_[i] += b.coeffs_[i];
    out.trim();
    return out;
  }
  LPoly operator-() const {
    LPoly out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
  }
  friend LPoly operator-(const LPoly& a, const LPoly& b) { return a + (-b); }
  friend LPoly operator*(const LPoly& a, const LPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    LPoly out;
    out.coeffs_.assign(a.coeffs_.size() + b.coeffs_.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    out.trim();
    return out;
  }
  bool operator==(const LPoly&) const = default;

  BigInt evaluate(const BigInt& l) const {
    BigInt acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * l + *it;
    return acc;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }
  std::vector<BigInt> coeffs_;
};

/// Sorted multiset of atom names; the empty monomial is the unit class.
using Monomial = std::vector<std::string>;

inline Monomial monomial_product(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

/// Ordering for rendering: the unit first, then by degree, then lexically.
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

inline bool valid_atom_name(const std::string& name) {
  if (name.empty() || name == "L") return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c == '\'';
  });
}

class GRExpr {
 public:
  using Terms = std::map<Monomial, LPoly, MonomialOrder>;

  GRExpr() = default;
  GRExpr(std::int64_t c) : GRExpr(BigInt(c)) {}  // NOLINT(google-explicit-constructor)
  GRExpr(const BigInt& c) {                       // NOLINT(google-explicit-constructor)
    if (c != 0) terms_[{}] = LPoly(c);
  }

  static GRExpr atom(const std::string& name) {
    if (!valid_atom_name(name)) throw InputError("invalid atom name '" + name + "'");
    GRExpr e;
    e.terms_[{name}] = LPoly(1);
    return e;
  }
  static GRExpr L(unsigned power = 1) {
    GRExpr e;
    e.terms_[{}] = LPoly::monomial(power);
    return e;
  }
  /// [P^n] = 1 + L + ... + L^n; [P^-1] is the empty variety.
  static GRExpr projective(int n) {
    GRExpr e;
    for (int i = 0; i <= n; ++i) e = e + L(static_cast<unsigned>(i));
    return e;
  }
  /// L + L^2 + ... + L^(c-1), the exceptional correction of a blowup in codimension c.
  static GRExpr exceptional(int c) {
    GRExpr e;
    for (int i = 1; i < c; ++i) e = e + L(static_cast<unsigned>(i));
    return e;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  LPoly coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? LPoly() : it->second;
  }

  friend GRExpr operator+(const GRExpr& a, const GRExpr& b) {
    GRExpr out = a;
    for (const auto& [m, c] : b.terms_) out.add(m, c);
    return out;
  }
  GRExpr operator-() const {
    GRExpr out;
    for (const auto& [m, c] : terms_) out.terms_[m] = -c;
    return out;
  }
  friend GRExpr operator-(const GRExpr& a, const GRExpr& b) { return a + (-b); }
  friend GRExpr operator*(const GRExpr& a, const GRExpr& b) {
    GRExpr out;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) out.add(monomial_product(ma, mb), ca * cb);
    }
    return out;
  }
  bool operator==(const GRExpr&) const = default;

  /// Largest r such that every coefficient is divisible by L^r.
  unsigned l_valuation() const {
    if (terms_.empty()) return 0;
    unsigned r = ~0u;
    for (const auto& [m, c] : terms_) r = std::min(r, c.l_valuation());
    return r;
  }

  /// Replaces every occurrence of an atom by an expression.
  GRExpr substitute(const std::string& name, const GRExpr& value) const {
    GRExpr out;
    for (const auto& [m, c] : terms_) {
      GRExpr term;
      term.terms_[{}] = c;
      Monomial rest;
      for (const auto& a : m) {
        if (a == name) {
          term = term * value;
        } else {
          rest.push_back(a);
        }
      }
      GRExpr restExpr;
      restExpr.terms_[rest] = LPoly(1);
      out = out + term * restExpr;
    }
    return out;
  }

  /// Applies the relation (from - to) L^r = 0: in every term whose coefficient
  /// is divisible by L^r, one factor `from` becomes `to`. Terms not divisible
  /// by L^r are left alone.
  GRExpr apply_annihilation(const std::string& from, const std::string& to, unsigned r) const {
    GRExpr out;
    for (const auto& [m, c] : terms_) {
      auto it = std::find(m.begin(), m.end(), from);
      if (it == m.end() || c.l_valuation() < r) {
        out.add(m, c);
        continue;
      }
      Monomial rest(m.begin(), m.end());
      rest.erase(rest.begin() + (it - m.begin()));
      out.add(monomial_product(rest, {to}), c);
    }
    return out;
  }

  BigInt evaluate(const BigInt& l, const std::map<std::string, BigInt>& atoms) const {
    BigInt acc = 0;
    for (const auto& [m, c] : terms_) {
      BigInt term = c.evaluate(l);
      for (const auto& a : m) {
        auto it = atoms.find(a);
        if (it == atoms.end()) throw InputError("no value given for atom [" + a + "]");
        term *= it->second;
      }
      acc += term;
    }
    return acc;
  }

  /// Expanded form: atoms sorted, L-powers ascending, e.g. "1 + L + [X]*L^2".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
      for (std::size_t i = 0; i < c.coeffs().size(); ++i) {
        const BigInt& k = c.coeffs()[i];
        if (k == 0) continue;
        const bool neg = k < 0;
        const BigInt mag = neg ? BigInt(-k) : k;
        out += out.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
        std::string body;
        for (const auto& a : m) body += (body.empty() ? "[" : "*[") + a + "]";
        if (i > 0) body += (body.empty() ? "" : "*") + std::string("L") + (i > 1 ? "^" + std::to_string(i) : "");
        if (body.empty()) {
          out += mag.str();
        } else {
          out += (mag == 1 ? "" : mag.str() + "*") + body;
        }
      }
    }
    return out;
  }

  /// Rendering with the common power of L pulled out: "([X] - [Y])*L^2".
  /// Display only; the value is unchanged.
  std::string to_factored_string() const {
    const unsigned r = l_valuation();
    if (r == 0) return to_string();
    GRExpr inner;
    for (const auto& [m, c] : terms_) {
      std::vector<BigInt> shifted(c.coeffs().begin() + r, c.coeffs().end());
      LPoly q;
      for (std::size_t i = 0; i < shifted.size(); ++i) q = q + LPoly::monomial(static_cast<unsigned>(i), shifted[i]);
      inner.add(m, q);
    }
    const std::string power = "L" + (r > 1 ? "^" + std::to_string(r) : std::string());
    const std::string body = inner.to_string();
    const bool single = inner.terms_.size() == 1 && inner.terms_.begin()->second.coeffs().size() == 1 &&
                        inner.terms_.begin()->second.coeffs()[0] == 1;
    if (single) return body == "1" ? power : body + "*" + power;
    return "(" + body + ")*" + power;
  }

 private:
  void add(const Monomial& m, const LPoly& c) {
    LPoly sum = coefficient(m) + c;
    if (sum.is_zero()) {
      terms_.erase(m);
    } else {
      terms_[m] = std::move(sum);
    }
  }
  Terms terms_;
};

inline GRExpr atom(const std::string& name) { return GRExpr::atom(name); }

// ---------------------------------------------------------------- rules ---

struct Equation {
  std::string rule;
  GRExpr lhs;
  GRExpr rhs;
  GRExpr residual() const { return lhs - rhs; }
};

/// [M] = [S][F] for a Zariski locally trivial fibration M -> S with fiber F.
inline Equation rule_zlt(const std::string& total, const GRExpr& base, const GRExpr& fiber) {
  return {"zlt", atom(total), base * fiber};
}

/// [Bl_Z X] = [X] + [Z](L + ... + L^(c-1)) for Z of codimension c.
inline Equation rule_blowup(const std::string& blowup, const GRExpr& x, const GRExpr& z, int codim) {
  if (codim < 1) throw InputError("blowup codimension must be at least 1");
  return {"blowup", atom(blowup), x + z * GRExpr::exceptional(codim)};
}

/// [Q] = [S][P^k](1 + L^(n-k)) + [Qbar] L^(k+1) for a family of n-dimensional
/// quadrics over S with a nondegenerate k-section.
inline Equation rule_hyperbolic_reduction(const std::string& total, const GRExpr& base, int n, int k,
                                          const GRExpr& reduced) {
  if (k < 0 || n < 2 * k) throw InputError("hyperbolic reduction needs 0 <= 2k <= n");
  const auto nk = static_cast<unsigned>(n - k);
  return {"hyperbolic_reduction", atom(total),
          base * GRExpr::projective(k) * (GRExpr(1) + GRExpr::L(nk)) +
              reduced * GRExpr::L(static_cast<unsigned>(k + 1))};
}

/// [Q] = [P^(n+1)][P^(m-1)] + [X] L^m for the universal family of a net of
/// quadrics in P^(n+1) parametrised by P^m, X the base locus.
inline Equation rule_family_total(const std::string& total, const GRExpr& x, int n, int m) {
  if (m < 1) throw InputError("family total needs m >= 1");
  if (n < 0) throw InputError("family total needs n >= 0");
  return {"family_total", atom(total),
          GRExpr::projective(n + 1) * GRExpr::projective(m - 1) + x * GRExpr::L(static_cast<unsigned>(m))};
}

// ----------------------------------------------------------- derivations ---

/// A class computed two ways; the residual is lhs - rhs after the stated
/// substitutions.
struct Derivation {
  std::string name;
  std::string pivot;                  // the class computed two ways
  GRExpr lhs;
  GRExpr rhs;
  GRExpr residual;
  GRExpr expected;                    // the difference statement
  std::string hypothesis;             // rendered hypothesis
  GRExpr after_hypothesis;            // residual once the hypothesis is applied
  std::vector<std::string> steps;

  bool matches_expected() const { return residual == expected; }
  bool closes() const { return after_hypothesis.is_zero(); }
};

inline const std::vector<std::string>& derivation_names() {
  static const std::vector<std::string> names{"theorem-main", "corollary-m1", "corollary-m2", "cubic-plane",
                                              "verra", "pfaffian-statement-check"};
  return names;
}

/// The five derivations run by "all".
inline const std::vector<std::string>& main_derivation_names() {
  static const std::vector<std::string> names{"theorem-main", "corollary-m1", "corollary-m2", "cubic-plane",
                                              "verra"};
  return names;
}

namespace detail {

inline std::string eq_string(const Equation& e) {
  return e.rule + ": " + e.lhs.to_string() + " = " + e.rhs.to_string();
}

inline Derivation l_equivalence(std::string name, std::string pivot, GRExpr lhs, GRExpr rhs,
                                const std::string& a, const std::string& b, unsigned r,
                                std::vector<std::string> steps) {
  Derivation d;
  d.name = std::move(name);
  d.pivot = std::move(pivot);
  d.lhs = std::move(lhs);
  d.rhs = std::move(rhs);
  d.residual = d.lhs - d.rhs;
  d.expected = (atom(a) - atom(b)) * GRExpr::L(r);
  d.hypothesis = d.expected.to_factored_string() + " = 0";
  d.after_hypothesis = d.residual.apply_annihilation(a, b, r);
  d.steps = std::move(steps);
  return d;
}

}  // namespace detail

inline Derivation derive(const std::string& name) {
  if (name == "theorem-main") {
    // Qbar_P = Bl_{X'} P^4 with X' = Bl_P X; also Qbar_P -> P^2 is a conic
    // bundle reduction with determinant double cover Y.
    const Equation xp = rule_blowup("Xprime", atom("X"), GRExpr(1), 2);
    const Equation bl = rule_blowup("Qbar", GRExpr::projective(4), atom("Xprime"), 2);
    const Equation hyp = rule_hyperbolic_reduction("Qbar", GRExpr::projective(2), 2, 0, atom("Y"));
    const GRExpr lhs = bl.rhs.substitute("Xprime", xp.rhs);
    return detail::l_equivalence(name, "Qbar", lhs, hyp.rhs, "X", "Y", 1,
                                 {detail::eq_string(xp), detail::eq_string(bl), detail::eq_string(hyp)});
  }
  if (name == "corollary-m1") {
    const Equation tot = rule_family_total("Q", atom("X"), 2, 1);
    const Equation hyp = rule_hyperbolic_reduction("Q", GRExpr::projective(1), 2, 0, atom("Y"));
    return detail::l_equivalence(name, "Q", tot.rhs, hyp.rhs, "X", "Y", 1,
                                 {detail::eq_string(tot), detail::eq_string(hyp)});
  }
  if (name == "corollary-m2") {
    const Equation tot = rule_family_total("Q", atom("X"), 4, 2);
    const Equation hyp = rule_hyperbolic_reduction("Q", GRExpr::projective(2), 4, 1, atom("Y"));
    return detail::l_equivalence(name, "Q", tot.rhs, hyp.rhs, "X", "Y", 2,
                                 {detail::eq_string(tot), detail::eq_string(hyp)});
  }
  if (name == "cubic-plane") {
    const Equation bl = rule_blowup("Xtilde", atom("X"), GRExpr::projective(2), 2);
    const Equation hyp = rule_hyperbolic_reduction("Xtilde", GRExpr::projective(2), 2, 0, atom("Y"));
    Derivation d;
    d.name = name;
    d.pivot = "Xtilde";
    d.lhs = bl.rhs;
    d.rhs = hyp.rhs;
    d.residual = d.lhs - d.rhs;
    const GRExpr cubic_class = GRExpr(1) + GRExpr::L(2) + GRExpr::L(4) + atom("Y") * GRExpr::L();
    d.expected = atom("X") - cubic_class;
    d.hypothesis = "[X] = " + cubic_class.to_string();
    d.after_hypothesis = d.residual.substitute("X", cubic_class);
    d.steps = {detail::eq_string(bl), detail::eq_string(hyp)};
    return d;
  }
  if (name == "verra") {
    const Equation h1 = rule_hyperbolic_reduction("X", GRExpr::projective(2), 2, 0, atom("Y1"));
    const Equation h2 = rule_hyperbolic_reduction("X", GRExpr::projective(2), 2, 0, atom("Y2"));
    return detail::l_equivalence(name, "X", h1.rhs, h2.rhs, "Y1", "Y2", 1,
                                 {detail::eq_string(h1), detail::eq_string(h2)});
  }
  if (name == "pfaffian-statement-check") {
    // Only checks that an L^6-annihilation statement is carried without
    // cancelling L.
    const GRExpr stmt = (atom("X") - atom("Y")) * GRExpr::L(6);
    return detail::l_equivalence(name, "statement", stmt, GRExpr(), "X", "Y", 6,
                                 {"statement: " + stmt.to_factored_string() + " = 0"});
  }
  throw InputError("unknown derivation '" + name + "'");
}

}  // namespace qfib::groth
