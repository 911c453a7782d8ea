#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include "json.hpp"

#include "cli.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ipd::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ipd_cli_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string simulate() {
    const auto file = path("sim.csv");
    const auto r = run({"simulate", "--seed", "1", "--out", file});
    EXPECT_EQ(r.code, 0) << r.err;
    return file;
  }

  fs::path dir_;
};

std::size_t line_count(const std::string& file) {
  std::ifstream in(file);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

TEST_F(Cli, SimulateWritesRows) {
  const auto file = simulate();
  EXPECT_EQ(line_count(file), 1201u);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({"simulate", "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(run({"simulate", "--seed", "1", "--n", "5,5,5", "--out", path("x.csv")}).code, 2);
  const auto data = simulate();
  const auto r = run({"fit", "--formula", "Y - f ~ X1", "--method", "ppi", "--model", "ols",
                      "--data", data, "--alpha", "1.5"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(run({"fit", "--formula", "Y - f ~ X1", "--method", "postpi_boot", "--model", "ols",
                 "--data", data}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST_F(Cli, FitJson) {
  const auto data = simulate();
  auto r = run({"fit", "--formula", "Y - f ~ X1", "--method", "ppi", "--model", "ols", "--data", data});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["tidy"].size(), 2u);
  EXPECT_EQ(j["glance"]["method"], "ppi");
  r = run({"fit", "--formula", "Y - f ~ 1", "--method", "pspa", "--model", "mean", "--data", data});
  ASSERT_EQ(r.code, 0) << r.err;
  j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["tidy"].size(), 1u);
  EXPECT_EQ(j["tidy"][0]["term"], "mean");
  r = run({"fit", "--formula", "Y - f ~ X1", "--method", "postpi_boot", "--model", "ols",
           "--data", data, "--seed", "4", "--nboot", "30", "--format", "summary"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("X1"), std::string::npos);
}

TEST_F(Cli, DataErrorReportsJson) {
  const auto bad = path("bad.csv");
  std::ofstream(bad) << "set,Y,f\nlabeled,NA,1\nunlabeled,,2\n";
  const auto r = run({"fit", "--formula", "Y - f ~ 1", "--method", "ppi", "--model", "mean",
                      "--data", bad});
  EXPECT_EQ(r.code, 3);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_TRUE(j["error"].contains("kind"));
  EXPECT_TRUE(j["error"].contains("message"));
}

TEST_F(Cli, SeparateFilesAndAugment) {
  const auto lab = path("lab.csv"), unl = path("unl.csv"), aug = path("aug.csv");
  std::ofstream(lab) << "Y,f,X1\n1,1.2,0\n2,1.8,1\n3.5,3.1,2\n3.9,4.2,3\n";
  std::ofstream(unl) << "f,X1\n1,0\n2,1\n3,2\n4.5,3\n5,4\n";
  const auto r = run({"fit", "--formula", "Y - f ~ X1", "--method", "ppi", "--model", "ols",
                      "--labeled", lab, "--unlabeled", unl, "--augment", aug});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(aug), 10u);
}

TEST_F(Cli, Benchmark) {
  const auto rep = path("rep.csv"), longf = path("long.csv");
  const auto r = run({"benchmark", "--seed", "3", "--replicates", "2", "--nboot", "20", "--out",
                      rep, "--replicates-out", longf});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(rep), 8u);
  EXPECT_EQ(line_count(longf), 15u);
  EXPECT_NE(r.out.find("ppi_plusplus"), std::string::npos);
}

}  // namespace
