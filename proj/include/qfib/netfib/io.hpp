#pragma once

// JSON documents for nets, forms, reduced families and reports. Output uses
// ordered objects so that identical inputs give byte-identical text.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfib/errors.hpp"
#include "qfib/matrix.hpp"
#include "qfib/mpoly.hpp"
#include "qfib/netfib/net.hpp"
#include "qfib/netfib/recipes.hpp"
#include "qfib/netfib/reduce.hpp"
#include "qfib/netfib/relations.hpp"

namespace qfib::io {

using Json = nlohmann::ordered_json;
inline constexpr int kFormatVersion = 1;

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

namespace detail {

inline const Json& field(const Json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) throw InputError(std::string("missing field '") + name + "'");
  return doc.at(name);
}

inline std::int64_t as_int(const Json& v, const char* what) {
  if (!v.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
  return v.get<std::int64_t>();
}

inline std::vector<std::int64_t> as_int_array(const Json& v, const char* what) {
  if (!v.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<std::int64_t> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(as_int(x, what));
  return out;
}

inline void check_version(const Json& doc) {
  if (doc.contains("format_version") && as_int(doc.at("format_version"), "format_version") != kFormatVersion) {
    throw InputError("unsupported format_version");
  }
}

inline IntMatrix square_matrix(const Json& v, std::size_t size, const char* what) {
  auto data = as_int_array(v, what);
  if (data.size() != size * size) {
    throw InputError(std::string(what) + " must have " + std::to_string(size * size) + " entries");
  }
  return IntMatrix::from_rows(size, size, std::move(data));
}

inline Json matrix_json(const IntMatrix& m) { return Json(m.data()); }

}  // namespace detail

// ------------------------------------------------------------------ nets ---

struct NetDocument {
  netfib::QuadricNet net;
  std::optional<std::vector<std::int64_t>> point;
};

inline NetDocument net_from_json(const Json& doc) {
  detail::check_version(doc);
  const auto n = detail::as_int(detail::field(doc, "n"), "n");
  const auto m = detail::as_int(detail::field(doc, "m"), "m");
  if (n < 0 || m < 0 || n > 20 || m > 20) throw InputError("n and m must lie in [0, 20]");
  const Json& mats = detail::field(doc, "matrices");
  if (!mats.is_array()) throw InputError("matrices must be an array");
  const auto size = static_cast<std::size_t>(n) + 2;
  std::vector<IntMatrix> list;
  for (const auto& entry : mats) list.push_back(detail::square_matrix(entry, size, "matrix"));
  NetDocument out{netfib::QuadricNet::make(static_cast<int>(n), static_cast<int>(m), std::move(list)), {}};
  if (doc.contains("point") && !doc.at("point").is_null()) {
    auto pt = detail::as_int_array(doc.at("point"), "point");
    if (pt.size() != size) throw InputError("point must have " + std::to_string(size) + " coordinates");
    out.point = std::move(pt);
  }
  return out;
}

inline Json net_to_json(const netfib::QuadricNet& net, const std::optional<std::vector<std::int64_t>>& point = {}) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["n"] = net.n;
  doc["m"] = net.m;
  Json mats = Json::array();
  for (const auto& mk : net.matrices) mats.push_back(detail::matrix_json(mk));
  doc["matrices"] = std::move(mats);
  if (point) doc["point"] = *point;
  return doc;
}

// ----------------------------------------------------------------- forms ---

inline netfib::VerraForm verra_from_json(const Json& doc) {
  detail::check_version(doc);
  const auto t = detail::as_int_array(detail::field(doc, "tensor"), "tensor");
  if (t.size() != 81) throw InputError("tensor must have 81 entries");
  netfib::VerraForm g;
  for (std::size_t i = 0; i < 81; ++i) g.tensor[i] = t[i];
  return g;
}

inline Json verra_to_json(const netfib::VerraForm& g) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["layout"] = "G(s,t) = sum T[a][b][c][d] s_a s_b t_c t_d, index ((a*3+b)*3+c)*3+d";
  doc["tensor"] = std::vector<std::int64_t>(g.tensor.begin(), g.tensor.end());
  return doc;
}

inline HomPoly cubic_poly_from_json(const Json& doc) {
  detail::check_version(doc);
  const Json& monos = detail::field(doc, "monomials");
  if (!monos.is_array()) throw InputError("monomials must be an array");
  HomPoly f(6, 3);
  for (const auto& mono : monos) {
    const auto e = detail::as_int_array(detail::field(mono, "exponents"), "exponents");
    if (e.size() != 6) throw InputError("exponents must have 6 entries");
    Exponents ex;
    for (auto x : e) {
      if (x < 0 || x > 3) throw InputError("exponents must lie in [0, 3]");
      ex.push_back(static_cast<std::uint16_t>(x));
    }
    f.add_term(ex, detail::as_int(detail::field(mono, "coeff"), "coeff"));
  }
  return f;
}

inline netfib::CubicWithPlane cubic_from_json(const Json& doc) {
  return netfib::CubicWithPlane::make(cubic_poly_from_json(doc));
}

inline Json cubic_to_json(const netfib::CubicWithPlane& c) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["variables"] = "x0..x5; the plane is x3 = x4 = x5 = 0";
  Json monos = Json::array();
  for (const auto& [e, coeff] : c.form.terms()) {
    Json mono;
    mono["exponents"] = std::vector<int>(e.begin(), e.end());
    mono["coeff"] = coeff.convert_to<std::int64_t>();
    monos.push_back(std::move(mono));
  }
  doc["monomials"] = std::move(monos);
  return doc;
}

// ------------------------------------------------------- reduced family ---

inline Json reduced_to_json(const netfib::ReducedFamily& red) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "reduced_family";
  doc["n"] = red.n;
  doc["m"] = red.m;
  doc["k"] = red.k;
  doc["modulus"] = red.modulus;
  doc["pivots"] = red.pivots;
  doc["complement"] = red.complement;
  Json bil = Json::array();
  for (const auto& b : red.bilinear_forms) bil.push_back(detail::matrix_json(b));
  doc["bilinear_forms"] = std::move(bil);
  Json quad = Json::array();
  for (const auto& q : red.quad_forms) quad.push_back(detail::matrix_json(q));
  doc["quad_forms"] = std::move(quad);
  return doc;
}

inline netfib::ReducedFamily reduced_from_json(const Json& doc) {
  detail::check_version(doc);
  netfib::ReducedFamily red;
  red.n = static_cast<int>(detail::as_int(detail::field(doc, "n"), "n"));
  red.m = static_cast<int>(detail::as_int(detail::field(doc, "m"), "m"));
  red.k = static_cast<int>(detail::as_int(detail::field(doc, "k"), "k"));
  const auto modulus = detail::as_int(detail::field(doc, "modulus"), "modulus");
  if (red.n < 0 || red.m < 0 || red.k < 0 || 2 * red.k > red.n || modulus < 0) {
    throw InputError("inconsistent reduced family dimensions");
  }
  red.modulus = static_cast<std::uint64_t>(modulus);
  for (auto x : detail::as_int_array(detail::field(doc, "pivots"), "pivots")) red.pivots.push_back(static_cast<std::size_t>(x));
  for (auto x : detail::as_int_array(detail::field(doc, "complement"), "complement")) {
    red.complement.push_back(static_cast<std::size_t>(x));
  }
  const std::size_t amb = red.complement.size();
  const auto rows = static_cast<std::size_t>(red.m) + 1;
  if (amb != static_cast<std::size_t>(red.n - red.k) + 1 || red.pivots.size() != static_cast<std::size_t>(red.k) + 1) {
    throw InputError("inconsistent reduced family coordinates");
  }
  const Json& bil = detail::field(doc, "bilinear_forms");
  const Json& quad = detail::field(doc, "quad_forms");
  if (!bil.is_array() || bil.size() != red.pivots.size()) throw InputError("need k + 1 bilinear forms");
  if (!quad.is_array() || quad.size() != rows) throw InputError("need m + 1 quadratic forms");
  for (const auto& b : bil) {
    auto data = detail::as_int_array(b, "bilinear form");
    if (data.size() != rows * amb) throw InputError("bilinear form has wrong shape");
    red.bilinear_forms.push_back(IntMatrix::from_rows(rows, amb, std::move(data)));
  }
  for (const auto& q : quad) {
    IntMatrix mq = detail::square_matrix(q, amb, "quadratic form");
    if (!mq.is_symmetric()) throw InputError("quadratic form is not symmetric");
    red.quad_forms.push_back(std::move(mq));
  }
  return red;
}

// --------------------------------------------------------------- reports ---

inline Json histogram_json(const netfib::CorankHistogram& h) { return Json(h.counts); }

inline Json report_to_json(const netfib::CountReport& r) {
  Json doc;
  doc["p"] = r.p;
  Json counts;
  counts["X"] = r.X;
  counts["Q"] = r.Q;
  counts["Qbar_P"] = r.Qbar ? Json(*r.Qbar) : Json(nullptr);
  counts["Y"] = r.Y;
  for (int k = 0; k <= r.n + 1; ++k) counts["P" + std::to_string(k)] = proj_count(k, r.p);
  doc["counts"] = std::move(counts);
  doc["point"] = r.point ? Json(r.point->coords) : Json(nullptr);
  doc["corank_histogram"] = histogram_json(r.corank);
  Json res;
  for (const auto& x : r.residuals) res[x.name] = x.value;
  doc["residuals"] = std::move(res);
  Json flags;
  flags["corank2_found"] = r.flags.corank2_found;
  flags["regularity_violation"] = r.flags.regularity_violation;
  flags["line_through_P_found"] = r.flags.line_through_P_found;
  flags["no_rational_point"] = r.flags.no_rational_point;
  flags["point_not_on_X"] = r.flags.point_not_on_X;
  flags["degenerate_section"] = r.flags.degenerate_section;
  doc["flags"] = std::move(flags);
  doc["status"] = r.passed() ? "ok" : (r.skipped() ? "flagged" : "residual_failure");
  return doc;
}

inline Json cubic_report_to_json(const netfib::CubicReport& r) {
  Json doc;
  doc["p"] = r.p;
  doc["X"] = r.X;
  doc["Y"] = r.Y;
  doc["residual"] = r.residual;
  doc["corank_histogram"] = histogram_json(r.corank);
  doc["corank2_found"] = r.corank2_found;
  doc["singular_along_plane"] = r.singular_along_plane;
  doc["status"] = r.passed() ? "ok" : (r.flagged() ? "flagged" : "residual_failure");
  return doc;
}

inline Json verra_report_to_json(const netfib::VerraReport& r) {
  Json doc;
  doc["p"] = r.p;
  doc["X"] = r.X;
  doc["Y1"] = r.Y1;
  doc["Y2"] = r.Y2;
  doc["residual_Y1"] = r.residual1;
  doc["residual_Y2"] = r.residual2;
  doc["Y1_minus_Y2"] = r.residual12;
  doc["corank_histogram_1"] = histogram_json(r.corank1);
  doc["corank_histogram_2"] = histogram_json(r.corank2);
  doc["corank2_found"] = r.corank2_found;
  doc["status"] = r.passed() ? "ok" : (r.corank2_found ? "flagged" : "residual_failure");
  return doc;
}

}  // namespace qfib::io
