#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cdflow/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cdflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cdflow::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("cdflow_test_" + name)).string();
}

}  // namespace

TEST(Cli, ConstantsPhi) {
  const auto r = run({"constants", "--name", "c_phi", "--n", "1", "--beta", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_DOUBLE_EQ(j["value"].get<double>(), 3.0625);
  EXPECT_EQ(j["command"], "constants");
  for (const char* key : {"version", "config", "seed", "grid"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST(Cli, CertifyQuadratic) {
  const auto r = run({"certify", "--family", "quadratic", "--beta", "2", "--rho", "3", "--n", "-2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_EQ(j["status"], "certified");
  EXPECT_TRUE(j["grid"].is_object());
  EXPECT_EQ(j["config"]["beta"], 2.0);
}

TEST(Cli, ForbiddenDimensionIsUsageError) {
  const auto r = run({"certify", "--beta", "2", "--rho", "1", "--n", "0.5"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("[0,1]"), std::string::npos) << r.err;
}

TEST(Cli, OutputIsReproducible) {
  const std::vector<std::string> args{"beckner", "--beta", "3", "--p", "1.7", "--trials", "16", "--seed", "5",
                                      "--N", "1001"};
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(parse(a)["seed"], 5);
}

TEST(Cli, SweepWritesCsv) {
  const auto r = run({"constants", "--name", "c_phi", "--beta", "3", "--sweep", "n=1:3:1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0].rfind("n,c_phi", 0), 0u);
  EXPECT_EQ(lines[1].rfind("1,3.0625", 0), 0u);
}

TEST(Cli, BadInvocations) {
  EXPECT_EQ(run({"gap", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"constants", "--name", "nope"}).code, 2);
  EXPECT_EQ(run({"constants", "--name", "c_phi", "--beta", "3", "--sweep", "n=1:3"}).code, 2);
}

TEST(Cli, NumericalFailureExitCode) {
  const auto r = run({"frontier", "--n-min", "2", "--n-max", "100", "--beta", "2"});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(Cli, VersionAndHelp) {
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(cdflow::version()), std::string::npos);
  const auto h = run({"--help"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("certify"), std::string::npos);
}

TEST(Cli, FlowCsvAndJsonFiles) {
  const auto csv = temp_path("flow.csv"), json = temp_path("flow.json");
  const auto r = run({"flow", "--beta", "3", "--N", "801", "--t-end", "0.2", "--dt", "0.01", "--record-every", "2", "--csv", csv, "--json",
                      json});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(csv);
  std::string header;
  ASSERT_TRUE(std::getline(f, header));
  EXPECT_NE(header.find("lambda"), std::string::npos) << header;
  std::size_t rows = 0;
  for (std::string line; std::getline(f, line);) ++rows;
  EXPECT_GT(rows, 2u);
  std::ifstream jf(json);
  const auto j = nlohmann::json::parse(jf);
  EXPECT_EQ(j, parse(r));
  std::remove(csv.c_str());
  std::remove(json.c_str());
}

TEST(Cli, GapReport) {
  const auto r = run({"gap", "--beta", "3", "--N", "2001"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_NEAR(j["gap"].get<double>(), 4.0, 0.1);
  EXPECT_EQ(j["sign_changes"], 1);
}
