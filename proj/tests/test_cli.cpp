#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "spotfit/assess.hpp"
#include "spotfit/io.hpp"

namespace spotfit::cli {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("spotfit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int call(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  std::vector<FitResult> read_fits(const std::string& p) {
    std::ifstream in(p);
    return io::read_fit_csv(in);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(Cli, NoArgumentsIsUsageError) { EXPECT_EQ(call({}), kUsage); }

TEST_F(Cli, HelpSucceeds) { EXPECT_EQ(call({"--help"}), kOk); }

TEST_F(Cli, UnknownOptionIsUsageError) {
  EXPECT_EQ(call({"simulate", "--out", path("a.spb"), "--bogus"}), kUsage);
}

TEST_F(Cli, OversizeImageRejected) {
  EXPECT_EQ(call({"simulate", "--size", "33", "--count", "5", "--out", path("a.spb")}), kUsage);
  EXPECT_FALSE(fs::exists(path("a.spb")));
}

TEST_F(Cli, EmptySimulationAndFit) {
  ASSERT_EQ(call({"simulate", "--count", "0", "--out", path("e.spb")}), kOk);
  EXPECT_EQ(fs::file_size(path("e.spb")), io::kSpbHeaderBytes);
  ASSERT_EQ(call({"fit", "--in", path("e.spb"), "--out", path("e.csv")}), kOk);
  EXPECT_EQ(slurp(path("e.csv")), std::string(io::kFitCsvHeader) + "\n");
}

TEST_F(Cli, SameSeedSameBytes) {
  for (const char* name : {"a", "b"}) {
    const std::string n(name);
    ASSERT_EQ(call({"simulate", "--count", "300", "--seed", "17", "--out", path(n + ".spb"),
                    "--truth", path(n + ".csv")}),
              kOk);
  }
  EXPECT_EQ(slurp(path("a.spb")), slurp(path("b.spb")));
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  ASSERT_EQ(call({"simulate", "--count", "300", "--seed", "17", "--workers", "5", "--out",
                  path("c.spb")}),
            kOk);
  EXPECT_EQ(slurp(path("a.spb")), slurp(path("c.spb")));
}

TEST_F(Cli, MissingInputIsIoError) {
  EXPECT_EQ(call({"fit", "--in", path("missing.spb"), "--out", path("f.csv")}), kIo);
}

TEST_F(Cli, MalformedInputReportsOffset) {
  {
    std::ofstream bad(path("bad.spb"), std::ios::binary);
    bad << "SPB1\x01";
  }
  EXPECT_EQ(call({"fit", "--in", path("bad.spb"), "--out", path("f.csv")}), kMalformed);
  EXPECT_NE(err_.str().find("offset 5"), std::string::npos) << err_.str();
}

TEST_F(Cli, EndToEndConvergence) {
  ASSERT_EQ(call({"simulate", "--count", "1000", "--seed", "42", "--out", path("s.spb"), "--truth",
                  path("t.csv")}),
            kOk);
  ASSERT_EQ(call({"fit", "--in", path("s.spb"), "--out", path("f.csv")}), kOk);
  const auto fits = read_fits(path("f.csv"));
  ASSERT_EQ(fits.size(), 1000u);
  std::size_t good = 0;
  for (const auto& r : fits) good += r.stop == StopReason::MinDelta || r.stop == StopReason::MinStep;
  EXPECT_GE(good, 990u);
  for (const auto& r : fits) EXPECT_NE(r.stop, StopReason::MaxIterations);

  ASSERT_EQ(call({"assess", "--fits", path("f.csv"), "--truth", path("t.csv"), "--signal", "400",
                  "--errors", path("err.csv")}),
            kOk);
  const auto report = nlohmann::json::parse(out_.str());
  EXPECT_EQ(report["accuracy"]["used"], 1000);
  EXPECT_GT(report["accuracy"]["position"]["mean"].get<double>(), 0.0);
  EXPECT_TRUE(report.contains("expected_error_ratio"));
  std::ifstream errors(path("err.csv"));
  std::string line;
  std::getline(errors, line);
  EXPECT_EQ(line, "index,x,y,sigma");
  std::size_t rows = 0;
  while (std::getline(errors, line)) ++rows;
  EXPECT_EQ(rows, 1000u);
}

TEST_F(Cli, ExplicitEngineSameSchemaMoreIterations) {
  ASSERT_EQ(call({"simulate", "--count", "1000", "--seed", "42", "--out", path("s.spb"), "--truth",
                  path("t.csv")}),
            kOk);
  ASSERT_EQ(call({"fit", "--in", path("s.spb"), "--out", path("i.csv")}), kOk);
  ASSERT_EQ(call({"fit", "--engine", "explicit5", "--in", path("s.spb"), "--out", path("e.csv")}),
            kOk);
  EXPECT_EQ(slurp(path("e.csv")).substr(0, io::kFitCsvHeader.size()), io::kFitCsvHeader);
  EXPECT_LT(iteration_stats(read_fits(path("i.csv"))).mean(),
            iteration_stats(read_fits(path("e.csv"))).mean());
}

TEST_F(Cli, UnknownEngineIsUsageError) {
  ASSERT_EQ(call({"simulate", "--count", "3", "--out", path("s.spb")}), kOk);
  EXPECT_EQ(call({"fit", "--engine", "cubic", "--in", path("s.spb"), "--out", path("f.csv")}),
            kUsage);
}

TEST_F(Cli, FitFromTruthInits) {
  ASSERT_EQ(call({"simulate", "--count", "50", "--out", path("s.spb"), "--truth", path("t.csv")}),
            kOk);
  ASSERT_EQ(call({"fit", "--in", path("s.spb"), "--out", path("f.csv"), "--inits", path("t.csv")}),
            kOk);
  EXPECT_EQ(read_fits(path("f.csv")).size(), 50u);
  ASSERT_EQ(call({"simulate", "--count", "49", "--out", path("short.spb")}), kOk);
  EXPECT_EQ(call({"fit", "--in", path("short.spb"), "--out", path("g.csv"), "--inits",
                  path("t.csv")}),
            kMalformed);
}

TEST_F(Cli, AssessPerfectFits) {
  ASSERT_EQ(call({"simulate", "--count", "20", "--out", path("s.spb"), "--truth", path("t.csv")}),
            kOk);
  std::vector<TruthRecord> truths;
  {
    std::ifstream in(path("t.csv"));
    truths = io::read_truth_csv(in);
  }
  std::vector<FitResult> fits;
  for (const auto& t : truths) {
    FitResult r;
    r.shape = {t.x, t.y, t.sigma};
    r.amps = {t.alpha, t.beta};
    r.stop = StopReason::MinDelta;
    r.iterations_used = 3;
    fits.push_back(r);
  }
  {
    std::ofstream out(path("f.csv"));
    io::write_fit_csv(out, fits);
  }
  ASSERT_EQ(call({"assess", "--fits", path("f.csv"), "--truth", path("t.csv"), "--report",
                  path("r.json")}),
            kOk);
  const auto report = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_EQ(report["accuracy"]["position"]["mean"], 0.0);
  EXPECT_EQ(report["accuracy"]["sigma"]["median"], 0.0);
  EXPECT_EQ(report["iterations"]["mode"], 3);
  EXPECT_EQ(report["stops"]["MinDelta"]["count"], 20);
}

TEST_F(Cli, AssessLengthMismatch) {
  ASSERT_EQ(call({"simulate", "--count", "5", "--out", path("s.spb"), "--truth", path("t.csv")}),
            kOk);
  ASSERT_EQ(call({"fit", "--in", path("s.spb"), "--out", path("f.csv")}), kOk);
  ASSERT_EQ(call({"simulate", "--count", "4", "--out", path("s4.spb"), "--truth", path("t4.csv")}),
            kOk);
  EXPECT_EQ(call({"assess", "--fits", path("f.csv"), "--truth", path("t4.csv")}), kMalformed);
}

TEST_F(Cli, BenchReportKeysSorted) {
  ASSERT_EQ(call({"bench", "--sizes", "5,7-8", "--batches", "2,20", "--repeats", "2,1", "--csv",
                  path("b.csv")}),
            kOk);
  const std::string text = out_.str();
  const auto report = nlohmann::json::parse(text);
  ASSERT_EQ(report["entries"].size(), 6u);
  EXPECT_EQ(report["engine"], "implicit3");
  std::vector<std::string> keys;
  for (const auto& [k, v] : report["entries"][0].items()) keys.push_back(k);
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  EXPECT_LT(text.find("\"engine\""), text.find("\"entries\""));
  EXPECT_LT(text.find("\"entries\""), text.find("\"machine\""));
  EXPECT_EQ(report["entries"][2]["size"], 7);
  EXPECT_EQ(report["entries"][2]["batch"], 2);
  EXPECT_TRUE(fs::exists(path("b.csv")));
}

TEST_F(Cli, BenchRejectsOversize) {
  EXPECT_EQ(call({"bench", "--sizes", "33", "--batches", "1", "--repeats", "1"}), kUsage);
}

}  // namespace
}  // namespace spotfit::cli
