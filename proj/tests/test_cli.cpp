#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "qfib/netfib/io.hpp"

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(QFIB_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(QFIB_TEST_DATA_DIR) + "/" + name; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qfib_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

TEST_F(CliTest, CountFixtureNet) {
  const CliRun r = run("count --net " + data("net42_seed42.json") + " --primes 3,5 --format json");
  EXPECT_EQ(r.code, 0);
  const auto doc = qfib::io::parse_json_text(r.out);
  EXPECT_EQ(doc.at("format_version"), 1);
  EXPECT_EQ(doc.at("command"), "count");
  ASSERT_EQ(doc.at("reports").size(), 2u);
  EXPECT_EQ(doc.at("reports")[0].at("counts").at("X"), 14);
  EXPECT_EQ(doc.at("reports")[0].at("counts").at("Qbar_P"), 172);
  EXPECT_EQ(doc.at("reports")[1].at("status"), "ok");
}

TEST_F(CliTest, CountPencil) {
  EXPECT_EQ(run("count --net " + data("pencil_seed1.json") + " --primes 7,11").code, 0);
}

TEST_F(CliTest, FlaggedPrimeExitsOne) {
  write("diag.json",
        R"({"n":2,"m":1,"matrices":[[1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1],[0,0,0,0,0,1,0,0,0,0,2,0,0,0,0,3]]})");
  const CliRun r = run("count --net " + path("diag.json") + " --primes 3,5 --format json");
  EXPECT_EQ(r.code, 1);
  const auto doc = qfib::io::parse_json_text(r.out);
  EXPECT_EQ(doc.at("reports")[0].at("status"), "flagged");
  EXPECT_EQ(run("count --net " + path("diag.json") + " --primes 5,7").code, 0);
}

TEST_F(CliTest, InputErrorsExitTwo) {
  write("asym.json", R"({"n":0,"m":0,"matrices":[[1,2,0,1]]})");
  EXPECT_EQ(run("count --net " + path("asym.json")).code, 2);
  write("garbage.json", "{not json");
  EXPECT_EQ(run("count --net " + path("garbage.json")).code, 2);
  EXPECT_EQ(run("count --net " + path("missing.json")).code, 2);
  EXPECT_EQ(run("count --net " + data("pencil_seed1.json") + " --primes 2,3").code, 2);
  EXPECT_EQ(run("count --net " + data("pencil_seed1.json") + " --primes 7,5").code, 2);
  EXPECT_EQ(run("count").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("bogus").code, 2);
  EXPECT_EQ(run("groth --derive no-such").code, 2);
  EXPECT_EQ(run("disc --range 0..0").code, 2);
  EXPECT_EQ(run("disc --range 5..x").code, 2);
  EXPECT_EQ(run("count --net " + data("net42_seed42.json") + " --format yaml").code, 2);
}

TEST_F(CliTest, WrongShapeForRelations) {
  write("net31.json", R"({"n":1,"m":1,"matrices":[[1,0,0,0,1,0,0,0,1],[0,0,0,0,1,0,0,0,2]]})");
  EXPECT_EQ(run("count --net " + path("net31.json")).code, 2);
}

TEST_F(CliTest, GrothDerivations) {
  const CliRun all = run("groth --derive all");
  EXPECT_EQ(all.code, 0);
  EXPECT_NE(all.out.find("([X] - [Y])*L^2"), std::string::npos);
  const CliRun one = run("groth --derive corollary-m1 --format json");
  EXPECT_EQ(one.code, 0);
  const auto doc = qfib::io::parse_json_text(one.out);
  EXPECT_EQ(doc.at("command"), "groth");
}

TEST_F(CliTest, DiscQueries) {
  const CliRun r = run("disc --range 20..26");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("d=25 brauer_vanishes=yes verdict=nontrivially-L-equivalent"), std::string::npos);
  EXPECT_NE(r.out.find("d=20 brauer_vanishes=no verdict=brauer-obstructed"), std::string::npos);
  const auto doc = qfib::io::parse_json_text(run("disc --ns 3,-2 --format json").out);
  EXPECT_EQ(doc.at("verdicts")[0].at("d"), 25);
  EXPECT_TRUE(doc.at("verdicts")[0].at("solution").is_null());
}

TEST_F(CliTest, RandomThenCount) {
  ASSERT_EQ(run("random --n 2 --m 1 --p 7 --seed 2 --out " + path("net.json")).code, 0);
  EXPECT_EQ(run("count --net " + path("net.json")).code, 0);
  EXPECT_EQ(run("reduce --net " + path("net.json") + " --out " + path("red.json")).code, 0);
  const auto red = qfib::io::reduced_from_json(qfib::io::read_json_file(path("red.json")));
  EXPECT_EQ(red.k, 0);
  EXPECT_EQ(red.reduced_gram_size(), 2u);
}

TEST_F(CliTest, ReduceChecksAgreeOnFixture) {
  const CliRun r = run("reduce --net " + data("net42_seed42.json") + " --primes 3,5 --format json");
  EXPECT_EQ(r.code, 0);
  const auto doc = qfib::io::parse_json_text(r.out);
  EXPECT_EQ(doc.at("status"), "ok");
  EXPECT_EQ(doc.at("counts")[0].at("Qbar_fiberwise"), 172);
  EXPECT_EQ(run("reduce --net " + data("net42_seed42.json") + " --point 0,1,0,0,0,0").code, 2);
}

TEST_F(CliTest, RandomIsReproducible) {
  EXPECT_EQ(run("random --n 4 --m 2 --p 5 --seed 42").out,
            qfib::io::read_json_file(data("net42_seed42.json")).dump(2) + "\n");
}

TEST_F(CliTest, BudgetExhaustionExitsThree) {
  EXPECT_EQ(run("random --n 4 --m 2 --p 5 --seed 1 --diagonal --attempts 20").code, 3);
  EXPECT_EQ(run("count --net " + data("net42_seed42.json") + " --primes 13 --budget 100").code, 3);
}

TEST_F(CliTest, RecipesFromFixtures) {
  EXPECT_EQ(run("cubic --form " + data("cubic_seed1.json") + " --primes 5,7").code, 0);
  EXPECT_EQ(run("verra --form " + data("verra_seed1.json") + " --primes 3,5").code, 0);
  const auto doc = qfib::io::parse_json_text(run("cubic --form " + data("cubic_seed1.json") + " --primes 5 --format json").out);
  EXPECT_EQ(doc.at("command"), "cubic");
}

TEST_F(CliTest, JsonIsThreadIndependent) {
  const std::string net = data("net42_seed42.json");
  const CliRun one = run("count --net " + net + " --primes 3,5,7 --format json --threads 1");
  const CliRun four = run("count --net " + net + " --primes 3,5,7 --format json --threads 4");
  EXPECT_EQ(one.code, 0);
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(run("disc --range 1..500 --format json --threads 1").out,
            run("disc --range 1..500 --format json --threads 3").out);
}

}  // namespace
