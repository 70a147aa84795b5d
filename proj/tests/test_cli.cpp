#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "sepvol/verify.hpp"

using namespace sepvol;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SEPVOL_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, ListCoversCatalog) {
  const auto r = run("list");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.size(), catalog().entries().size());
  const auto q = run("list --suite qq-quaternion --format csv");
  ASSERT_EQ(q.status, 0);
  const auto l = lines(q.out);
  EXPECT_EQ(l.front(), "alias,suite,status,P");
  EXPECT_EQ(l.size(), 1 + catalog().suite("qq-quaternion").size());
  EXPECT_EQ(run("list --suite nope").status, 2);
}

TEST(Cli, ShowAcceptsAliasAndJson) {
  const auto a = run("show --scenario qq-real-23");
  ASSERT_EQ(a.status, 0);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["alias"], "qq-real-23");
  EXPECT_EQ(j["dimension"], 4);
  EXPECT_EQ(j["catalog"]["P"], "3*pi/16");
  const auto b = run(R"(show --scenario '{"split": "qubit-qubit", "pairs": [[2, 3, "real"]]}')");
  ASSERT_EQ(b.status, 0);
  EXPECT_EQ(nlohmann::json::parse(b.out), j);
  EXPECT_EQ(run("show --scenario qq-real-99").status, 2);
  EXPECT_EQ(run("show --scenario '{\"split\": \"qubit-qubit\"'").status, 2);
}

TEST(Cli, EstimateJsonReport) {
  const auto r = run("estimate --scenario qq-real-23 --samples 200000 --seed 5");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema"], "sepvol/1");
  EXPECT_EQ(j["command"], "estimate");
  EXPECT_EQ(j["config"]["seed"], 5);
  EXPECT_EQ(j["config"]["samples"], 200000);
  ASSERT_EQ(j["rows"].size(), 4u);
  for (const auto& row : j["rows"]) {
    for (const char* k : {"scenario", "quantity", "value", "stderr", "samples", "seed", "shards", "catalog_value", "pass"})
      EXPECT_TRUE(row.contains(k)) << k;
    EXPECT_TRUE(row["pass"].get<bool>()) << row.dump();
  }
  EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(Cli, ReproducibleAcrossShards) {
  const auto a = run("estimate --scenario qq-mixed-c14-r23 --samples 50000 --shards 1 --format csv");
  const auto b = run("estimate --scenario qq-mixed-c14-r23 --samples 50000 --shards 13 --format csv");
  ASSERT_EQ(a.status, 0);
  ASSERT_EQ(b.status, 0);
  auto strip_shards = [](const std::string& s) {
    std::string out;
    for (const auto& l : lines(s)) out += l.substr(0, l.rfind(',')) + "\n";
    return out;
  };
  EXPECT_EQ(strip_shards(a.out), strip_shards(b.out));
}

TEST(Cli, SweepCsv) {
  const auto r = run("sweep --scenario qq-real-23 --grid 0.2:5:9 --samples 20000 --format csv");
  ASSERT_EQ(r.status, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 10u);
  EXPECT_EQ(l[0], "scenario,quantity,nu1,value,stderr,catalog_value,z_score,tolerance,pass,samples,seed,shards");
  EXPECT_EQ(l[1].rfind("qq-real-23,S,0.2,", 0), 0u);
  EXPECT_EQ(l[9].rfind("qq-real-23,S,5,", 0), 0u);
  const auto q = run("sweep --scenario qt-real-12-26 --axis 2 --grid 0.5:2:3,log --samples 20000 --format csv");
  ASSERT_EQ(q.status, 0);
  const auto m = lines(q.out);
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[2].rfind("qt-real-12-26,S,1,1,", 0), 0u);
  EXPECT_EQ(run("sweep --scenario qq-real-23 --grid 2:1:3 --samples 2000").status, 2);
  EXPECT_EQ(run("sweep --scenario qq-real-23 --axis 2 --samples 2000").status, 2);
}

TEST(Cli, VerifyExitCodes) {
  const auto r = run("verify --suite qq-quaternion --samples 400000");
  EXPECT_EQ(r.status, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  int compared = 0;
  for (const auto& row : j["rows"])
    if (row["quantity"] == "P" && row["catalog_value"] == 0.1) ++compared;
  EXPECT_EQ(compared, 2);
  EXPECT_EQ(run("verify --suite nope").status, 2);
  EXPECT_EQ(run("verify --suite qq-real --samples 10").status, 2);
  EXPECT_EQ(run("").status, 2);
}

TEST(Cli, OutFile) {
  const std::string path = ::testing::TempDir() + "sepvol_cli_bounds.csv";
  ASSERT_EQ(run("bounds --format csv --out " + path).status, 0);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  const auto l = lines(ss.str());
  ASSERT_EQ(l.size(), 6u);
  EXPECT_NE(l[1].find("upper-single-minor,0.88426"), std::string::npos);
}

TEST(GridParsing, Forms) {
  EXPECT_EQ(parse_grid("1:3:3"), (std::vector<double>{1, 2, 3}));
  const auto g = parse_grid("0.1:10:3,log");
  EXPECT_NEAR(g[1], 1.0, 1e-12);
  EXPECT_EQ(g[2], 10.0);
  for (const char* bad : {"1:3", "a:b:3", "0:1:3", "1:3:1", "1:3:2.5", "1:3:3,cubic", "1:3:3x"})
    EXPECT_THROW(parse_grid(bad), Error) << bad;
}

TEST(ReportFormat, CsvQuotingAndJson) {
  Report rep{"estimate", "x", McConfig{}, {}};
  Estimate e{0.5, 0.01, 1000, 10, 7, 2};
  rep.rows.push_back(make_row("a,b", "P", e, 0.52, 0.01));
  rep.rows.push_back(make_row("c", "P", e, 0.9, 0.01));
  EXPECT_FALSE(rep.passed());
  const auto l = lines(report_to_csv(rep));
  EXPECT_EQ(l[1].rfind("\"a,b\",P,0.5,0.01,0.52,", 0), 0u);
  EXPECT_NE(l[1].find(",true,1000,7,2"), std::string::npos);
  EXPECT_NE(l[2].find(",false,"), std::string::npos);
  const auto j = report_to_json(rep);
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_NEAR(j["rows"][0]["z_score"].get<double>(), -2.0, 1e-12);
}
