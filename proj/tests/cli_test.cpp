#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "robust-trade");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = robust_trade::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("robust_trade_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

const std::vector<std::string> kAnchor{"--buyer", "uniform:0,1", "--seller", "uniform:0,0.5"};

std::vector<std::string> with(std::string cmd, std::vector<std::string> extra = {}) {
  std::vector<std::string> a{std::move(cmd)};
  a.insert(a.end(), kAnchor.begin(), kAnchor.end());
  a.insert(a.end(), extra.begin(), extra.end());
  return a;
}

TEST(Cli, OptimizeAnchor) {
  const auto dir = scratch("optimize");
  const auto r = run(with("optimize", {"--out", dir.string()}));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("p*          0.5"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("A           0.1875"), std::string::npos) << r.out;
  const auto j = nlohmann::json::parse(std::ifstream(dir / "optimize.json"));
  EXPECT_NEAR(j.at("price").get<double>(), 0.5, 1e-4);
  EXPECT_NEAR(j.at("value").get<double>(), 0.1875, 1e-6);
  EXPECT_TRUE(j.at("tolerances").contains("refine_tol"));
}

TEST(Cli, OptimizeIdenticalMarginalsNotes) {
  const auto r = run({"optimize", "--buyer", "uniform:0,1", "--seller", "uniform:0,1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("trade floor nonpositive at all prices"), std::string::npos);
  EXPECT_NE(r.out.find("A           0\n"), std::string::npos) << r.out;
}

TEST(Cli, MalformedKnotsExitTwo) {
  const auto r = run({"optimize", "--buyer", "knots:0:0,0.5:0.7,0.4:1", "--seller", "uniform:0,1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("knot 2"), std::string::npos) << r.err;
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run({"optimize", "--buyer", "uniform:0,1"}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run(with("minimax", {"--grid", "1"})).code, 2);
  EXPECT_EQ(run(with("optimize", {"--grid", "abc"})).code, 2);
}

TEST(Cli, SweepRowsMatchClosedForm) {
  const auto r = run(with("sweep", {"--grid", "11"}));
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "p,ell_p,x_p,y_p,eff");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) row.push_back(std::stod(f));
    rows.push_back(row);
  }
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_NEAR(rows[4][4], 0.12, 1e-12);   // p = 0.4
  EXPECT_NEAR(rows[5][4], 0.1875, 1e-12); // p = 0.5
  EXPECT_NEAR(rows[6][4], 0.16, 1e-12);   // p = 0.6
  EXPECT_NEAR(rows[4][2], 0.2, 1e-12);
  EXPECT_NEAR(rows[4][3], 0.8, 1e-12);
}

TEST(Cli, OracleWritesCouplingFiles) {
  const auto dir = scratch("oracle");
  const auto r = run(with("oracle", {"--grid", "100", "--out", dir.string()}));
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "coupling.csv"));
  const auto j = nlohmann::json::parse(std::ifstream(dir / "oracle.json"));
  EXPECT_NEAR(j.at("oracle_value").get<double>(), 0.1875, 5e-3);
}

TEST(Cli, OracleTwoByTwoAtPrice) {
  const auto r = run(with("oracle", {"--grid", "2", "--price", "0.5", "--tol", "1"}));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("oracle min  0"), std::string::npos) << r.out;
}

TEST(Cli, OracleDisagreementExitsThree) {
  const auto r = run(with("oracle", {"--grid", "3", "--tol", "1e-12"}));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, BlockTablePasses) {
  const auto dir = scratch("block");
  const auto r = run({"block", "--grid", "4", "--price", "0.5", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  const auto j = nlohmann::json::parse(std::ifstream(dir / "block.json"));
  EXPECT_EQ(j.at("mechanism").at("n"), 4);
  EXPECT_DOUBLE_EQ(j.at("mechanism").at("t_b")[3][0].get<double>(), 0.75);
  EXPECT_EQ(j.at("u").size(), 3u);
}

TEST(Cli, BlockRejectsPriceOutsideSquare) { EXPECT_EQ(run({"block", "--price", "1.5"}).code, 2); }

TEST(Cli, MinimaxWritesReportAndConvergence) {
  const auto dir = scratch("minimax");
  const auto r = run(with("minimax", {"--grid", "200", "--refine", "1,2,4", "--out", dir.string()}));
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(std::ifstream(dir / "minimax.json"));
  EXPECT_NEAR(j.at("gap").get<double>(), 0.0, 1e-9);
  EXPECT_EQ(j.at("levels").size(), 3u);
  std::ifstream csv(dir / "convergence.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "n,minmax_n");
}

TEST(Cli, MinimaxProductLift) {
  const std::vector<std::string> same{"minimax", "--buyer", "uniform:0,1", "--seller", "uniform:0,1", "--refine", "2"};
  auto args = same;
  EXPECT_NE(run(args).out.find("minmax    0  "), std::string::npos);
  args.insert(args.end(), {"--lift", "product"});
  const auto r = run(args);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("minmax    0.03125"), std::string::npos) << r.out;
  args.back() = "sideways";
  EXPECT_EQ(run(args).code, 2);
}

TEST(Cli, ConfigFile) {
  const auto dir = scratch("config");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "run.toml") << "buyer = \"uniform:0,1\"\nseller = \"uniform:0,0.5\"\ngrid = 501\n";
  const auto r = run({"optimize", "--config", (dir / "run.toml").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("A           0.1875"), std::string::npos) << r.out;
}

TEST(Cli, Deterministic) {
  EXPECT_EQ(run(with("sweep", {"--grid", "31"})).out, run(with("sweep", {"--grid", "31"})).out);
}

}  // namespace
