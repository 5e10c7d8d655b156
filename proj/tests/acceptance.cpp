// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qfib/grothring.hpp"
#include "qfib/lattice.hpp"
#include "qfib/netfib/io.hpp"
#include "qfib/netfib/recipes.hpp"
#include "qfib/netfib/reduce.hpp"
#include "qfib/netfib/relations.hpp"
#include "qfib/netfib/search.hpp"
#include "qfib/quadform.hpp"
#include "support.hpp"

namespace {

using namespace qfib;
namespace nf = qfib::netfib;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> problems;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (problems.size() < 10) problems.push_back(what);
    }
  }
};

Parallelism workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return Parallelism{hw == 0 ? 1 : std::min(hw, 8u)};
}

// Accepted (4,2) nets shared by criteria 2, 4 and 5.
struct NetRun {
  std::uint64_t seed;
  nf::NetSearchResult found;
  std::vector<nf::CountReport> reports;
};

const std::vector<std::uint64_t> kNetSeeds{42, 1, 2, 3, 4};
std::vector<NetRun> g_nets;

// ---------------------------------------------------------------- 1 ---
Outcome quadric_count_oracle() {
  Outcome out;
  const PrimeField f3(3);
  std::uint64_t exhaustive = 0;
  const std::uint64_t total = 59049;  // 3^10 upper triangles
  auto bad = parallel_sum(total, workers(), [&](std::uint64_t b, std::uint64_t e) {
    std::int64_t mismatches = 0;
    for (std::uint64_t code = b; code < e; ++code) {
      ModMatrix m(4, 4);
      std::uint64_t c = code;
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i; j < 4; ++j) {
          m(i, j) = m(j, i) = c % 3;
          c /= 3;
        }
      }
      if (count_projective_points(m, f3) != brute_force_count(m, f3)) ++mismatches;
    }
    return mismatches;
  });
  exhaustive = total;
  out.require(bad == 0, std::to_string(bad) + " mismatches among 4x4 over F_3");

  const std::uint64_t per_case = 10'000;
  std::uint64_t random_cases = 0;
  for (std::size_t n : {5u, 6u}) {
    for (std::uint64_t p : {5ULL, 7ULL}) {
      const PrimeField f(p);
      const auto mism = parallel_sum(per_case, workers(), [&](std::uint64_t b, std::uint64_t e) {
        std::int64_t mismatches = 0;
        for (std::uint64_t i = b; i < e; ++i) {
          qfib::testing::Gen gen(1'000'003 * n + 7919 * p + i);
          // Mix full-rank and low-rank forms so every branch of the closed form is hit.
          const ModMatrix m = i % 4 == 0 ? gen.symmetric_of_rank(n, gen.below(n + 1), f) : gen.symmetric(n, f);
          if (count_projective_points(m, f) != brute_force_count(m, f)) ++mismatches;
        }
        return mismatches;
      });
      random_cases += per_case;
      out.require(mism == 0, std::to_string(mism) + " mismatches for " + std::to_string(n) + "x" +
                                 std::to_string(n) + " over F_" + std::to_string(p));
    }
  }
  out.detail = std::to_string(exhaustive) + " exhaustive 4x4/F_3 + " + std::to_string(random_cases) +
               " random 5x5, 6x6 over F_5, F_7";
  return out;
}

// ---------------------------------------------------------------- 2 ---
Outcome theorem_main_shadow() {
  Outcome out;
  nf::RelationOptions opt;
  opt.par = workers();
  int primes_checked = 0;
  for (auto seed : kNetSeeds) {
    NetRun run{seed, nf::random_net_search(4, 2, PrimeField(5), seed), {}};
    run.reports = nf::verify_relations(run.found.net, nf::default_primes(), run.found.point, opt);
    for (const auto& r : run.reports) {
      const std::string where = "seed " + std::to_string(seed) + " p=" + std::to_string(r.p);
      out.require(!r.flags.any(), where + ": flags raised");
      for (const char* name : {"R1", "R2", "R3", "R4"}) {
        const auto v = r.residual(name);
        out.require(v.has_value() && *v == 0, where + ": " + name + " = " + (v ? std::to_string(*v) : "missing"));
      }
      out.require(r.X == r.Y, where + ": #X != #Y");
      ++primes_checked;
    }
    g_nets.push_back(std::move(run));
  }
  out.detail = std::to_string(g_nets.size()) + " nets x {3,5,7,11,13}, " + std::to_string(primes_checked) +
               " reports with R1..R4 = 0 and #X = #Y";
  return out;
}

// ---------------------------------------------------------------- 3 ---
void check_pencil_report(Outcome& out, const nf::CountReport& r, const std::string& where) {
  const std::int64_t p = static_cast<std::int64_t>(r.p);
  const std::int64_t p3 = static_cast<std::int64_t>(proj_count(3, r.p));
  const std::int64_t p1 = static_cast<std::int64_t>(proj_count(1, r.p));
  out.require(r.Q == p3 + r.X * p, where + ": #Q != #P^3 + p#X");
  out.require(r.Q == p1 * (1 + p * p) + r.Y * p, where + ": #Q != #P^1(1+p^2) + p#Y");
  out.require(r.X == r.Y, where + ": #X != #Y");
}

Outcome corollary_m1_shadow() {
  Outcome out;
  nf::RelationOptions opt;
  opt.par = workers();
  IntMatrix a = IntMatrix::identity(4), d(4, 4);
  for (std::size_t i = 0; i < 4; ++i) d(i, i) = static_cast<std::int64_t>(i);
  const auto diag = nf::QuadricNet::make(2, 1, {a, d});
  std::string skipped;
  for (const auto& r : nf::verify_relations(diag, nf::default_primes(), std::nullopt, opt)) {
    const std::string where = "diagonal pencil p=" + std::to_string(r.p);
    if (r.p == 3) {
      // 0 and -3 collide mod 3: the fiber over (0:1) has corank 2 and the
      // relations do not apply. The prime is skipped and its data pinned.
      out.require(r.flags.corank2_found, where + ": corank-2 flag missing");
      out.require(r.X == 8 && r.Y == 5 && r.residual("R3'") == 9, where + ": unexpected bad-prime counts");
      skipped = " (p=3 skipped: corank-2 fiber, R3'=9)";
      continue;
    }
    out.require(!r.flags.any(), where + ": flags raised");
    check_pencil_report(out, r, where);
  }
  int pencils = 0;
  for (std::uint64_t seed = 1; pencils < 5; ++seed) {
    const auto found = nf::random_net_search(2, 1, PrimeField(7), seed);
    for (const auto& r : nf::verify_relations(found.net, nf::default_primes(), found.point, opt)) {
      const std::string where = "pencil seed " + std::to_string(seed) + " p=" + std::to_string(r.p);
      out.require(!r.flags.any(), where + ": flags raised");
      check_pencil_report(out, r, where);
    }
    ++pencils;
  }
  out.detail = "diagonal pencil + " + std::to_string(pencils) + " searched pencils x {3..13}" + skipped;
  return out;
}

// ---------------------------------------------------------------- 4 ---
bool same_corank_counts(const nf::CorankHistogram& net, const nf::CorankHistogram& red) {
  if (red.counts.size() > net.counts.size()) return false;
  for (std::size_t i = 0; i < net.counts.size(); ++i) {
    if (net.counts[i] != (i < red.counts.size() ? red.counts[i] : 0)) return false;
  }
  return true;
}

std::optional<std::vector<Elem>> reducible_vector(qfib::testing::Gen& gen, const ModMatrix& m, const PrimeField& f) {
  for (int tries = 0; tries < 20'000; ++tries) {
    const auto v = gen.nonzero_vec(m.rows(), f);
    if (linalg::bilinear(m, v, v, f) != 0) continue;
    for (Elem x : linalg::apply(m, v, f)) {
      if (x != 0) return v;
    }
  }
  return std::nullopt;
}

Outcome reduction_invariance() {
  Outcome out;
  int comparisons = 0;
  for (const auto& run : g_nets) {
    const auto red = nf::hyperbolic_reduce_family(run.found.net, {run.found.point});
    for (auto p : nf::default_primes()) {
      const PrimeField f(p);
      const std::string where = "seed " + std::to_string(run.seed) + " p=" + std::to_string(p);
      out.require(same_corank_counts(nf::corank_stratification(run.found.net, f, workers()),
                                     nf::reduced_corank_stratification(red, f, workers())),
                  where + ": corank histograms differ");
      out.require(nf::count_double_cover(run.found.net, f, workers()) == nf::count_double_cover(red, f, workers()),
                  where + ": double covers differ");
      ++comparisons;
    }
  }

  qfib::testing::Gen gen(2024);
  int fibers = 0;
  const std::vector<std::uint64_t> primes{3, 5, 7, 11, 13};
  while (fibers < 1000) {
    const PrimeField f(primes[gen.below(primes.size())]);
    const std::size_t n = 3 + gen.below(4);
    const ModMatrix m = gen.symmetric_of_rank(n, 2 + gen.below(n - 1), f);
    const auto v1 = reducible_vector(gen, m, f);
    const auto v2 = reducible_vector(gen, m, f);
    if (!v1 || !v2) continue;
    const ModMatrix r1 = hyperbolic_reduce_at_vector(m, *v1, f);
    const ModMatrix r2 = hyperbolic_reduce_at_vector(m, *v2, f);
    out.require(forms_congruent(r1, r2, f), "Witt cancellation failed on a fiber of size " + std::to_string(n));
    ++fibers;
  }
  out.detail = std::to_string(comparisons) + " net/reduction comparisons, " + std::to_string(fibers) +
               " random fibers reduced at two vectors";
  return out;
}

// ---------------------------------------------------------------- 5 ---
Outcome symbolic_derivations() {
  Outcome out;
  using groth::GRExpr;
  using groth::atom;
  const std::map<std::string, GRExpr> expected{
      {"theorem-main", (atom("X") - atom("Y")) * GRExpr::L()},
      {"corollary-m1", (atom("X") - atom("Y")) * GRExpr::L()},
      {"corollary-m2", (atom("X") - atom("Y")) * GRExpr::L(2)},
      {"cubic-plane", atom("X") - (GRExpr(1) + GRExpr::L(2) + GRExpr::L(4) + atom("Y") * GRExpr::L())},
      {"verra", (atom("Y1") - atom("Y2")) * GRExpr::L()},
  };
  for (const auto& name : groth::main_derivation_names()) {
    const auto d = groth::derive(name);
    out.require(d.residual == expected.at(name), name + ": residual " + d.residual.to_factored_string());
    out.require(d.matches_expected(), name + ": does not match its statement");
    out.require(d.closes(), name + ": does not vanish under the hypothesis");
  }

  const auto main = groth::derive("theorem-main");
  const auto m2 = groth::derive("corollary-m2");
  int substitutions = 0;
  for (const auto& run : g_nets) {
    for (const auto& r : run.reports) {
      if (!r.Qbar) {
        out.require(false, "missing Qbar for seed " + std::to_string(run.seed));
        continue;
      }
      const BigInt p(r.p);
      const std::map<std::string, BigInt> vals{{"X", r.X}, {"Y", r.Y}, {"Xprime", BigInt(r.X) + p}};
      const std::string where = "seed " + std::to_string(run.seed) + " p=" + std::to_string(r.p);
      out.require(main.lhs.evaluate(p, vals) == *r.Qbar, where + ": blowup route != #Qbar");
      out.require(main.rhs.evaluate(p, vals) == *r.Qbar, where + ": reduction route != #Qbar");
      out.require(m2.lhs.evaluate(p, vals) == r.Q, where + ": family total != #Q");
      out.require(m2.rhs.evaluate(p, vals) == r.Q, where + ": k=1 reduction != #Q");
      out.require(main.residual.evaluate(p, vals) == 0, where + ": residual does not vanish");
      ++substitutions;
    }
  }
  out.detail = "5 derivations normalized and closed; " + std::to_string(substitutions) +
               " integer substitutions against criterion 2 counts";
  return out;
}

// ---------------------------------------------------------------- 6 ---
Outcome recipes() {
  Outcome out;
  int cubics = 0, verras = 0;
  const std::vector<std::uint64_t> cubic_primes{5, 7, 11};
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto cubic = nf::random_cubic_search(cubic_primes, seed);
    for (const auto& r : nf::cubic_with_plane_counts(cubic, cubic_primes, kDefaultEnumerationBudget, workers())) {
      const std::string where = "cubic seed " + std::to_string(seed) + " p=" + std::to_string(r.p);
      out.require(!r.flagged(), where + ": flagged");
      out.require(r.residual == 0, where + ": residual " + std::to_string(r.residual));
    }
    ++cubics;
  }
  const std::vector<std::uint64_t> verra_primes{3, 5, 7};
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto g = nf::random_verra_search(verra_primes, seed);
    for (const auto& r : nf::verra_counts(g, verra_primes, workers())) {
      const std::string where = "verra seed " + std::to_string(seed) + " p=" + std::to_string(r.p);
      out.require(r.Y1 == r.Y2, where + ": #Y1 != #Y2");
      out.require(r.passed(), where + ": residuals or flags");
    }
    ++verras;
  }
  out.detail = std::to_string(cubics) + " cubics x {5,7,11} residual 0; " + std::to_string(verras) +
               " (2,2)-forms x {3,5,7} with #Y1 = #Y2";
  return out;
}

// ---------------------------------------------------------------- 7 ---
std::optional<lattice::PellSolution> brute_pell(std::int64_t d, std::int64_t n, std::int64_t bound) {
  for (std::int64_t b = 0; b <= bound; ++b) {
    const std::int64_t rhs = n + d * b * b;
    if (rhs < 0) continue;
    const auto a = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(rhs))));
    for (std::int64_t c = std::max<std::int64_t>(0, a - 1); c <= a + 1; ++c) {
      if (c * c == rhs) return lattice::PellSolution{c, b};
    }
  }
  return std::nullopt;
}

Outcome arithmetic() {
  Outcome out;
  int agreed = 0, beyond_window = 0;
  for (std::int64_t d = 1; d <= 500; ++d) {
    for (std::int64_t n : {8, -8}) {
      const auto fast = lattice::solve_pell_like(d, n);
      const auto slow = brute_pell(d, n, 10'000);
      const std::string where = "d=" + std::to_string(d) + " N=" + std::to_string(n);
      if (slow) {
        out.require(fast && *fast == *slow, where + ": differs from brute force");
        ++agreed;
      } else if (fast) {
        const bool valid = BigInt(fast->a * fast->a) - BigInt(d) * BigInt(fast->b * fast->b) == n;
        out.require(valid && fast->b > 10'000, where + ": solution outside the window does not verify");
        ++beyond_window;
      } else {
        ++agreed;
      }
    }
  }

  std::ifstream in(std::string(QFIB_TEST_DATA_DIR) + "/pell_minimal_d500.txt");
  out.require(in.good(), "symbolic oracle file missing");
  std::string line;
  int oracle_rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::int64_t d = 0, n = 0;
    std::string a, b;
    ls >> d >> n >> a >> b;
    const auto got = lattice::solve_pell_like(d, n);
    const bool same = a == "none" ? !got : (got && got->a == BigInt(a) && got->b == BigInt(b));
    out.require(same, "d=" + std::to_string(d) + " N=" + std::to_string(n) + ": differs from symbolic oracle");
    ++oracle_rows;
  }
  out.require(oracle_rows == 1000, "symbolic oracle has " + std::to_string(oracle_rows) + " rows");

  const auto list = lattice::enumerate_nontrivial(10'000, workers());
  int squares = 0;
  for (std::int64_t k = 2; (2 * k + 1) * (2 * k + 1) <= 10'000; ++k) {
    const std::int64_t d = (2 * k + 1) * (2 * k + 1);
    out.require(std::binary_search(list.begin(), list.end(), d), std::to_string(d) + " missing from the list");
    ++squares;
  }
  using lattice::Classification;
  out.require(lattice::classify_discriminant(25).classification == Classification::NontriviallyLEquivalent,
              "25 not nontrivially-L-equivalent");
  out.require(lattice::classify_discriminant(9).classification == Classification::Isomorphic, "9 not isomorphic");
  out.require(lattice::classify_discriminant(17).classification == Classification::Isomorphic, "17 not isomorphic");
  out.detail = std::to_string(agreed) + " pairs decided by brute force (b <= 10^4), " +
               std::to_string(beyond_window) + " verified beyond it, " + std::to_string(oracle_rows) +
               " match sympy; " + std::to_string(squares) + " odd squares in (9, 10^4] listed";
  return out;
}

// ---------------------------------------------------------------- 8 ---
std::pair<int, std::string> run_cli(const std::string& args) {
  const std::string cmd = std::string(QFIB_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string text;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, text};
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) text.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text};
}

Outcome determinism() {
  Outcome out;
  const std::string data = QFIB_TEST_DATA_DIR;
  const std::vector<std::string> commands{
      "count --net " + data + "/net42_seed42.json --format json",
      "count --net " + data + "/pencil_seed1.json --format json",
      "reduce --net " + data + "/net42_seed42.json --primes 3,5,7 --format json",
      "cubic --seed 1 --primes 5,7 --format json",
      "verra --seed 2 --format json",
      "disc --range 1..3000 --format json",
      "groth --derive all --format json",
  };
  for (const auto& cmd : commands) {
    const auto one = run_cli(cmd + " --threads 1");
    const auto many = run_cli(cmd + " --threads 4");
    const auto again = run_cli(cmd + " --threads 3");
    out.require(one.first == 0, "'" + cmd + "' exited " + std::to_string(one.first));
    out.require(!one.second.empty() && one.second == many.second && one.second == again.second,
                "'" + cmd + "' output depends on --threads");
  }
  const auto r1 = run_cli("random --n 4 --m 2 --p 5 --seed 7");
  const auto r2 = run_cli("random --n 4 --m 2 --p 5 --seed 7");
  out.require(r1.first == 0 && r1.second == r2.second, "random search is not reproducible");
  out.detail = std::to_string(commands.size()) + " commands byte-identical at 1, 3, 4 threads; seeded search repeatable";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"quadric-count oracle", quadric_count_oracle},
      {"(4,2) net relations", theorem_main_shadow},
      {"pencil relations", corollary_m1_shadow},
      {"reduction invariance", reduction_invariance},
      {"symbolic derivations", symbolic_derivations},
      {"cubic and (2,2) recipes", recipes},
      {"arithmetic module", arithmetic},
      {"determinism", determinism},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.problems.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(1);
    line << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail << " ["
         << secs << "s]";
    std::cout << line.str() << "\n";
    for (const auto& p : o.problems) std::cout << "    " << p << "\n";
    std::cout.flush();
  }
  return all ? 0 : 1;
}
