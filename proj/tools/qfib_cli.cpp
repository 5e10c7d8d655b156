// qfib: point counts, reductions and Grothendieck-ring derivations for
// quadric fibrations.
//
// Exit codes: 0 success, 1 residual failure or raised flag, 2 input error,
// 3 budget exceeded.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfib/errors.hpp"
#include "qfib/gfp.hpp"
#include "qfib/grothring.hpp"
#include "qfib/lattice.hpp"
#include "qfib/netfib/cover.hpp"
#include "qfib/netfib/io.hpp"
#include "qfib/netfib/net.hpp"
#include "qfib/netfib/recipes.hpp"
#include "qfib/netfib/reduce.hpp"
#include "qfib/netfib/relations.hpp"
#include "qfib/netfib/search.hpp"
#include "qfib/parallel.hpp"

namespace {

using qfib::InputError;
using qfib::io::Json;
namespace nf = qfib::netfib;

constexpr int kExitOk = 0;
constexpr int kExitResidual = 1;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

struct RunConfig {
  std::string net_path;
  std::string form_path;
  std::string primes_text;
  std::string point_text;
  std::string range_text;
  std::string ns_text;
  std::string derive = "all";
  std::string format = "text";
  std::string out_path;
  std::uint64_t seed = 1;
  std::uint64_t budget = qfib::kDefaultEnumerationBudget;
  std::uint64_t attempts = 10'000;
  std::int64_t box = 9;
  int n = 4;
  int m = 2;
  std::uint64_t p = 5;
  unsigned threads = 1;
  bool diagonal = false;

  qfib::Parallelism par() const { return qfib::Parallelism{threads}; }
  bool json() const { return format == "json"; }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::int64_t parse_int(const std::string& text, const char* what) {
  const std::string t = trim(text);
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    throw InputError(std::string("cannot parse ") + what + " '" + text + "'");
  }
  if (used != t.size()) throw InputError(std::string("cannot parse ") + what + " '" + text + "'");
  return v;
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const char* what) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(item, what));
  if (out.empty()) throw InputError(std::string("empty ") + what);
  return out;
}

/// Primes must be odd, distinct and ascending.
std::vector<std::uint64_t> parse_primes(const std::string& text) {
  if (text.empty()) return nf::default_primes();
  std::vector<std::uint64_t> out;
  for (auto v : parse_int_list(text, "prime list")) {
    if (v < 3) throw InputError("primes must be odd primes >= 3");
    qfib::PrimeField check(static_cast<std::uint64_t>(v));
    if (!out.empty() && static_cast<std::uint64_t>(v) <= out.back()) {
      throw InputError("primes must be distinct and ascending");
    }
    out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

void emit(const RunConfig& cfg, const Json& doc, const std::string& text) {
  if (cfg.json()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

void write_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << doc.dump(2) << "\n";
}

Json envelope(const std::string& command) {
  Json doc;
  doc["format_version"] = qfib::io::kFormatVersion;
  doc["command"] = command;
  return doc;
}

// ---------------------------------------------------------------- count ---

std::string report_line(const nf::CountReport& r) {
  std::ostringstream os;
  os << "p=" << r.p << " X=" << r.X << " Q=" << r.Q << " Qbar_P=";
  if (r.Qbar) {
    os << *r.Qbar;
  } else {
    os << "-";
  }
  os << " Y=" << r.Y;
  for (const auto& x : r.residuals) os << " " << x.name << "=" << x.value;
  std::vector<std::string> flags;
  if (r.flags.corank2_found) flags.emplace_back("corank2_found");
  if (r.flags.regularity_violation) flags.emplace_back("regularity_violation");
  if (r.flags.line_through_P_found) flags.emplace_back("line_through_P_found");
  if (r.flags.no_rational_point) flags.emplace_back("no_rational_point");
  if (r.flags.point_not_on_X) flags.emplace_back("point_not_on_X");
  if (r.flags.degenerate_section) flags.emplace_back("degenerate_section");
  os << " flags=";
  if (flags.empty()) os << "none";
  for (std::size_t i = 0; i < flags.size(); ++i) os << (i ? "," : "") << flags[i];
  os << " status=" << (r.passed() ? "ok" : (r.skipped() ? "flagged" : "residual_failure")) << "\n";
  return os.str();
}

int cmd_count(const RunConfig& cfg) {
  if (cfg.net_path.empty()) throw InputError("--net is required");
  auto doc = qfib::io::net_from_json(qfib::io::read_json_file(cfg.net_path));
  auto point = doc.point;
  if (!cfg.point_text.empty()) point = parse_int_list(cfg.point_text, "point");
  const auto primes = parse_primes(cfg.primes_text);
  nf::RelationOptions opt{cfg.budget, cfg.par()};
  const auto reports = nf::verify_relations(doc.net, primes, point, opt);

  bool ok = true;
  Json out = envelope("count");
  out["n"] = doc.net.n;
  out["m"] = doc.net.m;
  out["primes"] = primes;
  out["reports"] = Json::array();
  std::string text = "net n=" + std::to_string(doc.net.n) + " m=" + std::to_string(doc.net.m) + "\n";
  for (const auto& r : reports) {
    ok = ok && r.passed();
    out["reports"].push_back(qfib::io::report_to_json(r));
    text += report_line(r);
  }
  out["status"] = ok ? "ok" : "failure";
  text += ok ? "all residuals zero\n" : "residual failure or raised flags\n";
  emit(cfg, out, text);
  return ok ? kExitOk : kExitResidual;
}

// ---------------------------------------------------------------- groth ---

int cmd_groth(const RunConfig& cfg) {
  std::vector<std::string> names;
  if (cfg.derive == "all") {
    names = qfib::groth::main_derivation_names();
  } else {
    const auto& known = qfib::groth::derivation_names();
    if (std::find(known.begin(), known.end(), cfg.derive) == known.end()) {
      throw InputError("unknown derivation '" + cfg.derive + "'");
    }
    names = {cfg.derive};
  }
  bool ok = true;
  Json out = envelope("groth");
  out["derivations"] = Json::array();
  std::string text;
  for (const auto& name : names) {
    const auto d = qfib::groth::derive(name);
    const bool good = d.matches_expected() && d.closes();
    ok = ok && good;
    Json j;
    j["name"] = d.name;
    j["pivot"] = d.pivot;
    j["steps"] = d.steps;
    j["lhs"] = d.lhs.to_string();
    j["rhs"] = d.rhs.to_string();
    j["residual"] = d.residual.to_factored_string();
    j["expected"] = d.expected.to_factored_string();
    j["hypothesis"] = d.hypothesis;
    j["after_hypothesis"] = d.after_hypothesis.to_string();
    j["consistent"] = good;
    out["derivations"].push_back(std::move(j));
    text += "derivation " + d.name + " (class [" + d.pivot + "] computed two ways)\n";
    for (const auto& s : d.steps) text += "  " + s + "\n";
    text += "  residual = " + d.residual.to_factored_string() + "\n";
    text += "  " + d.after_hypothesis.to_string() + " after hypothesis " + d.hypothesis + "\n";
    text += std::string("  ") + (good ? "consistent" : "INCONSISTENT") + "\n";
  }
  out["status"] = ok ? "ok" : "failure";
  emit(cfg, out, text);
  return ok ? kExitOk : kExitResidual;
}

// ----------------------------------------------------------------- disc ---

Json verdict_json(const qfib::lattice::DiscriminantVerdict& v) {
  Json j;
  j["d"] = v.d;
  j["brauer_vanishes"] = v.brauer_vanishes;
  if (v.pell_solution) {
    j["solution"] = {{"a", v.pell_solution->a.str()}, {"b", v.pell_solution->b.str()}, {"rhs", v.pell_sign}};
  } else {
    j["solution"] = nullptr;
  }
  j["verdict"] = qfib::lattice::to_string(v.classification);
  return j;
}

std::string verdict_line(const qfib::lattice::DiscriminantVerdict& v) {
  std::string line = "d=" + std::to_string(v.d) + " brauer_vanishes=" + (v.brauer_vanishes ? "yes" : "no") +
                     " verdict=" + qfib::lattice::to_string(v.classification);
  if (v.pell_solution) {
    line += " witness: " + v.pell_solution->a.str() + "^2 - " + std::to_string(v.d) + "*" +
            v.pell_solution->b.str() + "^2 = " + std::to_string(v.pell_sign);
  }
  return line + "\n";
}

int cmd_disc(const RunConfig& cfg) {
  if (cfg.range_text.empty() == cfg.ns_text.empty()) throw InputError("give exactly one of --range or --ns");
  Json out = envelope("disc");
  std::string text;
  std::vector<qfib::lattice::DiscriminantVerdict> verdicts;
  if (!cfg.ns_text.empty()) {
    const auto v = parse_int_list(cfg.ns_text, "--ns");
    if (v.size() != 2) throw InputError("--ns expects C.H,C^2");
    const auto ns = qfib::lattice::make_ns_data(v[0], v[1]);
    out["CH"] = ns.CH;
    out["C2"] = ns.C2;
    text += "C.H=" + std::to_string(ns.CH) + " C^2=" + std::to_string(ns.C2) + " d=" + std::to_string(ns.d) + "\n";
    verdicts.push_back(qfib::lattice::classify_discriminant(ns.d));
  } else {
    const auto pos = cfg.range_text.find("..");
    if (pos == std::string::npos) throw InputError("--range expects lo..hi");
    const auto lo = parse_int(cfg.range_text.substr(0, pos), "range");
    const auto hi = parse_int(cfg.range_text.substr(pos + 2), "range");
    verdicts = qfib::lattice::classify_range(lo, hi, cfg.par());
  }
  out["verdicts"] = Json::array();
  for (const auto& v : verdicts) {
    out["verdicts"].push_back(verdict_json(v));
    text += verdict_line(v);
  }
  emit(cfg, out, text);
  return kExitOk;
}

// --------------------------------------------------------------- random ---

int cmd_random(const RunConfig& cfg) {
  nf::NetSearchOptions opt;
  opt.box = cfg.box;
  opt.attempts = cfg.attempts;
  opt.force_diagonal = cfg.diagonal;
  if (!cfg.primes_text.empty()) opt.validation_primes = parse_primes(cfg.primes_text);
  const auto res = nf::random_net_search(cfg.n, cfg.m, qfib::PrimeField(cfg.p), cfg.seed, opt);
  const Json net = qfib::io::net_to_json(res.net, res.point);
  if (!cfg.out_path.empty()) {
    write_file(cfg.out_path, net);
    std::cerr << "accepted after " << res.attempts << " attempts, written to " << cfg.out_path << "\n";
  } else {
    std::cout << net.dump(2) << "\n";
  }
  return kExitOk;
}

// --------------------------------------------------------------- reduce ---

// Corank is preserved by the reduction, so the shorter reduced histogram must
// match entrywise and the net's extra entries must vanish.
bool same_corank_counts(const nf::CorankHistogram& net, const nf::CorankHistogram& red) {
  for (std::size_t i = 0; i < net.counts.size(); ++i) {
    const std::uint64_t r = i < red.counts.size() ? red.counts[i] : 0;
    if (net.counts[i] != r) return false;
  }
  return red.counts.size() <= net.counts.size();
}

int cmd_reduce(const RunConfig& cfg) {
  if (cfg.net_path.empty()) throw InputError("--net is required");
  auto doc = qfib::io::net_from_json(qfib::io::read_json_file(cfg.net_path));
  auto point = doc.point;
  if (!cfg.point_text.empty()) point = parse_int_list(cfg.point_text, "point");
  if (!point) throw InputError("reduce needs an isotropic point (--point or a 'point' field in the net file)");
  const auto red = nf::hyperbolic_reduce_family(doc.net, {*point}, 0);
  const Json family = qfib::io::reduced_to_json(red);
  if (!cfg.out_path.empty()) write_file(cfg.out_path, family);

  const auto primes = parse_primes(cfg.primes_text);
  Json out = envelope("reduce");
  out["family"] = family;
  out["counts"] = Json::array();
  std::string text = "reduced family: m=" + std::to_string(red.m) + " n=" + std::to_string(red.n) +
                     " k=" + std::to_string(red.k) + ", reduced fibers of size " +
                     std::to_string(red.reduced_gram_size()) + "\n";
  bool ok = true;
  for (auto p : primes) {
    const qfib::PrimeField f(p);
    Json c;
    c["p"] = p;
    std::vector<qfib::Elem> v;
    for (auto x : *point) v.push_back(f.reduce(x));
    bool degenerate = true;
    for (auto x : v) degenerate = degenerate && x == 0;
    degenerate = degenerate || !nf::section_nondegenerate(doc.net, v, f);
    c["degenerate_section"] = degenerate;
    const auto fiberwise = nf::count_reduced_family(red, f, cfg.par());
    const auto dual = nf::count_reduced_family_dual(red, f, cfg.par());
    c["Qbar_fiberwise"] = fiberwise;
    c["Qbar_dual"] = dual;
    std::string line = "p=" + std::to_string(p) + " Qbar=" + std::to_string(fiberwise) + " dual=" + std::to_string(dual);
    bool good = fiberwise == dual;
    if (!degenerate) {
      const auto h_net = nf::corank_stratification(doc.net, f, cfg.par());
      const auto h_red = nf::reduced_corank_stratification(red, f, cfg.par());
      c["corank_histogram_net"] = h_net.counts;
      c["corank_histogram_reduced"] = h_red.counts;
      const bool same = same_corank_counts(h_net, h_red);
      good = good && same;
      line += std::string(" corank_histograms=") + (same ? "equal" : "DIFFERENT");
      if (doc.net.gram_size() % 2 == 0) {
        const auto y_net = nf::count_double_cover(doc.net, f, cfg.par());
        const auto y_red = nf::count_double_cover(red, f, cfg.par());
        c["Y_net"] = y_net;
        c["Y_reduced"] = y_red;
        good = good && y_net == y_red;
        line += " Y_net=" + std::to_string(y_net) + " Y_reduced=" + std::to_string(y_red);
        if (red.reduced_gram_size() == 2) {
          // Zero-dimensional reduced quadrics: Qbar is the double cover itself.
          c["Qbar_minus_Y"] = fiberwise - y_net;
          good = good && fiberwise == y_net;
          line += " Qbar-Y=" + std::to_string(fiberwise - y_net);
        }
      }
    } else {
      line += " (degenerate section, invariance checks skipped)";
    }
    c["consistent"] = good;
    ok = ok && good;
    out["counts"].push_back(std::move(c));
    text += line + (good ? "" : " INCONSISTENT") + "\n";
  }
  out["status"] = ok ? "ok" : "failure";
  emit(cfg, out, text);
  return ok ? kExitOk : kExitResidual;
}

// ------------------------------------------------------------ recipes ---

int cmd_cubic(const RunConfig& cfg) {
  const auto primes = cfg.primes_text.empty() ? std::vector<std::uint64_t>{5, 7, 11} : parse_primes(cfg.primes_text);
  nf::CubicWithPlane cubic = [&] {
    if (!cfg.form_path.empty()) return qfib::io::cubic_from_json(qfib::io::read_json_file(cfg.form_path));
    nf::RecipeSearchOptions opt;
    opt.attempts = cfg.attempts;
    return nf::random_cubic_search(primes, cfg.seed, opt);
  }();
  if (!cfg.out_path.empty()) write_file(cfg.out_path, qfib::io::cubic_to_json(cubic));
  Json out = envelope("cubic");
  out["reports"] = Json::array();
  std::string text;
  bool ok = true;
  for (const auto& r : nf::cubic_with_plane_counts(cubic, primes, cfg.budget, cfg.par())) {
    ok = ok && r.passed();
    out["reports"].push_back(qfib::io::cubic_report_to_json(r));
    text += "p=" + std::to_string(r.p) + " X=" + std::to_string(r.X) + " Y=" + std::to_string(r.Y) +
            " residual=" + std::to_string(r.residual) + (r.corank2_found ? " corank2_found" : "") +
            (r.singular_along_plane ? " singular_along_plane" : "") +
            " status=" + (r.passed() ? "ok" : (r.flagged() ? "flagged" : "residual_failure")) + "\n";
  }
  out["status"] = ok ? "ok" : "failure";
  emit(cfg, out, text);
  return ok ? kExitOk : kExitResidual;
}

int cmd_verra(const RunConfig& cfg) {
  const auto primes = cfg.primes_text.empty() ? std::vector<std::uint64_t>{3, 5, 7} : parse_primes(cfg.primes_text);
  nf::VerraForm g = [&] {
    if (!cfg.form_path.empty()) return qfib::io::verra_from_json(qfib::io::read_json_file(cfg.form_path));
    nf::RecipeSearchOptions opt;
    opt.attempts = cfg.attempts;
    return nf::random_verra_search(primes, cfg.seed, opt);
  }();
  if (!cfg.out_path.empty()) write_file(cfg.out_path, qfib::io::verra_to_json(g));
  Json out = envelope("verra");
  out["reports"] = Json::array();
  std::string text;
  bool ok = true;
  for (const auto& r : nf::verra_counts(g, primes, cfg.par())) {
    ok = ok && r.passed();
    out["reports"].push_back(qfib::io::verra_report_to_json(r));
    text += "p=" + std::to_string(r.p) + " X=" + std::to_string(r.X) + " Y1=" + std::to_string(r.Y1) +
            " Y2=" + std::to_string(r.Y2) + " residuals=" + std::to_string(r.residual1) + "," +
            std::to_string(r.residual2) + "," + std::to_string(r.residual12) +
            (r.corank2_found ? " corank2_found" : "") + " status=" +
            (r.passed() ? "ok" : (r.corank2_found ? "flagged" : "residual_failure")) + "\n";
  }
  out["status"] = ok ? "ok" : "failure";
  emit(cfg, out, text);
  return ok ? kExitOk : kExitResidual;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point counts and Grothendieck-ring relations for quadric fibrations"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--threads", cfg.threads, "Worker threads for counting loops")->check(CLI::Range(1u, 256u));
  };
  auto add_primes = [&](CLI::App* sub) {
    sub->add_option("--primes", cfg.primes_text, "Comma-separated odd primes, ascending");
  };

  auto* count = app.add_subcommand("count", "Verify the point-count relations of a net");
  count->add_option("--net", cfg.net_path, "Net file")->required();
  count->add_option("--point", cfg.point_text, "Integer point of X, comma-separated");
  count->add_option("--budget", cfg.budget, "Enumeration cap (points)")->check(CLI::PositiveNumber);
  add_primes(count);
  add_common(count);

  auto* groth = app.add_subcommand("groth", "Run Grothendieck-ring derivations");
  groth->add_option("--derive", cfg.derive, "Derivation name or 'all'");
  add_common(groth);

  auto* disc = app.add_subcommand("disc", "Classify Neron-Severi discriminants");
  disc->add_option("--range", cfg.range_text, "lo..hi");
  disc->add_option("--ns", cfg.ns_text, "C.H,C^2");
  add_common(disc);

  auto* random = app.add_subcommand("random", "Search for an accepted net");
  random->add_option("--n", cfg.n, "Fiber quadric dimension");
  random->add_option("--m", cfg.m, "Base dimension");
  random->add_option("--p", cfg.p, "Search prime");
  random->add_option("--seed", cfg.seed, "Random seed");
  random->add_option("--attempts", cfg.attempts, "Attempt budget")->check(CLI::PositiveNumber);
  random->add_option("--box", cfg.box, "Entries are drawn from [-box, box]")->check(CLI::NonNegativeNumber);
  random->add_flag("--diagonal", cfg.diagonal, "Only diagonal matrices");
  random->add_option("--out", cfg.out_path, "Write the net here instead of stdout");
  add_primes(random);

  auto* reduce = app.add_subcommand("reduce", "Hyperbolic reduction of a net at a point");
  reduce->add_option("--net", cfg.net_path, "Net file")->required();
  reduce->add_option("--point", cfg.point_text, "Integer isotropic point, comma-separated");
  reduce->add_option("--out", cfg.out_path, "Write the reduced family document here");
  add_primes(reduce);
  add_common(reduce);

  auto* cubic = app.add_subcommand("cubic", "Cubic fourfold containing a plane");
  cubic->add_option("--form", cfg.form_path, "Cubic form file; a random one is searched otherwise");
  cubic->add_option("--seed", cfg.seed, "Seed for the random search");
  cubic->add_option("--attempts", cfg.attempts, "Attempt budget")->check(CLI::PositiveNumber);
  cubic->add_option("--budget", cfg.budget, "Enumeration cap (points)")->check(CLI::PositiveNumber);
  cubic->add_option("--out", cfg.out_path, "Write the cubic form used here");
  add_primes(cubic);
  add_common(cubic);

  auto* verra = app.add_subcommand("verra", "Double cover of P2 x P2 branched in bidegree (2,2)");
  verra->add_option("--form", cfg.form_path, "Form file; a random one is searched otherwise");
  verra->add_option("--seed", cfg.seed, "Seed for the random search");
  verra->add_option("--attempts", cfg.attempts, "Attempt budget")->check(CLI::PositiveNumber);
  verra->add_option("--out", cfg.out_path, "Write the form used here");
  add_primes(verra);
  add_common(verra);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*count) return cmd_count(cfg);
    if (*groth) return cmd_groth(cfg);
    if (*disc) return cmd_disc(cfg);
    if (*random) return cmd_random(cfg);
    if (*reduce) return cmd_reduce(cfg);
    if (*cubic) return cmd_cubic(cfg);
    if (*verra) return cmd_verra(cfg);
  } catch (const qfib::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const qfib::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const qfib::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
