#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(LADDERLAB_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST(Cli, EvalZ) {
  const auto r = run("eval-z --t 1000");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["z"].get<double>(), 0.99779463752158661399, 1e-8);
  EXPECT_NEAR(j["theta1"].get<double>(), 2034.546407204697, 1e-9);
}

TEST(Cli, EvalThetaCsv) {
  const auto r = run("--format csv eval-theta --t 1000");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,theta,theta1");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("eval-z").code, 1);
  EXPECT_EQ(run("eval-z --t 1000 --bogus 3").code, 1);
  EXPECT_EQ(run("experiment frobnicate").code, 1);
  EXPECT_EQ(run("--format xml eval-z --t 1000").code, 1);
  EXPECT_EQ(run("experiment hardy-littlewood --T 1e5 --u-exponent 0.99").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, CoupledCutoffIsRegimeExit) {
  EXPECT_EQ(run("experiment theorem --formula 2.5 --kind G3 --T 1e5 --xi coupled").code, 3);
}

TEST(Cli, TheoremRunSucceeds) {
  const auto r = run("experiment theorem --formula 2.7 --kind G4 --T 1e5 --xi 50");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["name"], "theorem-T2_7-G4");
  EXPECT_TRUE(j["checks"][0]["passed"].get<bool>());
  EXPECT_FALSE(j["cache"]["file"].get<std::string>().empty());
}

TEST(Cli, LadderQueryAndInvert) {
  const auto q = nlohmann::json::parse(run("ladder query --T 1e5").out);
  const double ratio = q["ladder_gap_ratio"].get<double>();
  EXPECT_GE(ratio, 0.85);
  EXPECT_LE(ratio, 1.05);
  const double y = q["phi1"].get<double>();
  const auto inv = run("ladder invert --y " + nlohmann::json(y).dump());
  ASSERT_EQ(inv.code, 0);
  EXPECT_NEAR(nlohmann::json::parse(inv.out)["T_hat"].get<double>(), 1e5, 1e-4);
}

TEST(Cli, GsetCommands) {
  const auto m = run("gset measure --kind G3 --angle 0.7853981633974483 --T 1e5 --u-exponent 0.6");
  ASSERT_EQ(m.code, 0);
  EXPECT_NEAR(nlohmann::json::parse(m.out)["ratio"].get<double>(), 1.0, 0.05);
  const auto b = run("--format csv gset build --kind G4 --T 1e4 --u-exponent 0.5");
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(b.out.substr(0, 6), "lo,hi\n");
  const auto p = run("gset pullback --kind G3 --T 1e5 --u-exponent 0.5");
  ASSERT_EQ(p.code, 0);
  EXPECT_GT(nlohmann::json::parse(p.out).size(), 10u);
}

TEST(Cli, CsvAndPlotData) {
  const auto plot = std::filesystem::current_path() / "cli_plot.csv";
  std::filesystem::remove(plot);
  const auto r = run("--format csv experiment substitution --f coslog --T 1e4 --plot-data " + plot.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, 5), "name,");
  ASSERT_TRUE(std::filesystem::exists(plot));
  std::ifstream in(plot);
  std::string head;
  std::getline(in, head);
  EXPECT_EQ(head, "t,integrand");
}

TEST(Cli, CorruptCacheIsReported) {
  const auto bad = std::filesystem::current_path() / "corrupt.cache";
  {
    std::ofstream out(bad, std::ios::binary);
    out << "definitely not a table, but long enough to pass the size check........";
  }
  EXPECT_EQ(run("--cache " + bad.string() + " ladder query --T 1e4").code, 1);
  std::filesystem::remove(bad);
}

TEST(Cli, ReportBytesStableAcrossThreadCounts) {
  auto a = nlohmann::json::parse(run("--threads 1 experiment hardy-littlewood --T 1e4").out);
  auto b = nlohmann::json::parse(run("--threads 3 experiment hardy-littlewood --T 1e4").out);
  a.erase("runtime_s");
  b.erase("runtime_s");
  EXPECT_EQ(a.dump(), b.dump());
}
