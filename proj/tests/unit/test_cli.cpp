#include "size_lens/cli.hpp"

#include "size_lens/report.hpp"

#include "group2_table.hpp"
#include "temp_dir.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

using namespace size_lens;
using testing_support::slurp;
using testing_support::TempDir;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string simulate(const TempDir& dir, const std::string& sub, const std::string& law, const std::string& seed) {
  const std::string out = dir.file(sub);
  const RunResult r = run({"simulate", "--objects", "12", "--n-features", "8", "--law", law, "--seed", seed,
                           "--out-dir", out});
  EXPECT_EQ(r.code, 0) << r.err;
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') {
      out.emplace_back();
    } else {
      out.back().push_back(c);
    }
  }
  return out;
}

}  // namespace

TEST(Cli, ExitCodeMapping) {
  EXPECT_EQ(cli::exit_code_for(ErrorKind::Ingest), 2);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::Solver), 3);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::Statistics), 4);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::Io), 5);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"bogus"}).code, 1);
  EXPECT_EQ(run({"simulate", "--out-dir", "x"}).code, 1);  // seed is required
  EXPECT_EQ(run({"analyze", "--features", "a.csv", "--out-dir", "x"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SimulateWritesThreeFilesDeterministically) {
  TempDir dir;
  const std::string a = simulate(dir, "a", "inverse-size", "7");
  const std::string b = simulate(dir, "b", "inverse-size", "7");
  for (const char* f : {"features.csv", "similarity.csv", "planted_weights.csv"}) {
    ASSERT_TRUE(std::filesystem::exists(a + "/" + f)) << f;
    EXPECT_EQ(slurp(a + "/" + f), slurp(b + "/" + f)) << f;
  }
  const auto manifest = nlohmann::json::parse(slurp(a + "/manifest.json"));
  EXPECT_EQ(manifest["settings"]["seed"], 7);
  EXPECT_EQ(manifest["subcommand"], "simulate");
}

TEST(Cli, SimulateAcceptsFeaturesAlias) {
  TempDir dir;
  const RunResult r = run({"simulate", "--objects", "12", "--features", "8", "--law", "inverse-size", "--seed", "7",
                           "--out-dir", dir.file("s")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir.file("s/features.csv")), slurp(simulate(dir, "t", "inverse-size", "7") + "/features.csv"));
}

TEST(Cli, SimulateUniformLawHasEqualWeights) {
  TempDir dir;
  const std::string out = simulate(dir, "u", "uniform", "3");
  std::istringstream in(slurp(out + "/planted_weights.csv"));
  std::string line;
  std::getline(in, line);
  std::set<std::string> weights;
  while (std::getline(in, line)) weights.insert(split_csv_line(line).at(2));
  EXPECT_EQ(weights.size(), 1u);
}

TEST(Cli, SimulateFromGeneralization) {
  TempDir dir;
  const RunResult r = run({"simulate", "--objects", "8", "--n-features", "6", "--seed", "11", "--from-generalization",
                           "--n-examples", "2", "--out-dir", dir.file("g")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = nlohmann::json::parse(slurp(dir.file("g/manifest.json")));
  EXPECT_EQ(manifest["settings"]["n_examples"], 2);
  EXPECT_EQ(manifest["settings"]["from_generalization"], true);
  // Generalization probabilities lie in [0, 1] and the diagonal is certain.
  std::istringstream in(slurp(dir.file("g/similarity.csv")));
  std::string line;
  std::getline(in, line);
  int row = 0;
  while (std::getline(in, line)) {
    const auto cells = split_csv_line(line);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const double v = std::stod(cells[c]);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      if (static_cast<int>(c) == row + 1) EXPECT_EQ(v, 1.0);
    }
    ++row;
  }
  EXPECT_EQ(run({"simulate", "--seed", "1", "--from-generalization", "--noise-sd", "0.1", "--out-dir",
                 dir.file("h")}).code,
            1);
}

TEST(Cli, SimulateRetryLimitIsSolverExit) {
  TempDir dir;
  const RunResult r = run({"simulate", "--objects", "4", "--n-features", "7", "--seed", "1", "--out-dir", dir.file("r")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("RetryLimitExceeded"), std::string::npos);
}

TEST(Cli, AnalyzePlantedInverseSize) {
  TempDir dir;
  const std::string sim = simulate(dir, "sim", "inverse-size", "7");
  const RunResult r = run({"analyze", "--features", sim + "/features.csv", "--similarity", sim + "/similarity.csv",
                           "--name", "planted", "--out-dir", dir.file("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_full_table(dir.file("out/table.full.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(*rows[0].pearson, -1.0, 0.01);
  EXPECT_NEAR(*rows[0].slope, -1.0, 0.01);
  for (const char* f : {"table.csv", "table.full.csv", "planted.svg", "planted.weights.csv", "manifest.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.file(std::string("out/") + f))) << f;
  }
  const auto manifest = nlohmann::json::parse(slurp(dir.file("out/manifest.json")));
  EXPECT_EQ(manifest["settings"]["align"], "strict");
  EXPECT_EQ(manifest["datasets"][0]["status"], "ok");
}

TEST(Cli, AnalyzeMismatchedLabelsIsIngestExit) {
  TempDir dir;
  const auto f = dir.write("f.csv", "object,h,g\na,1,0\nb,1,1\nc,0,1\n");
  const auto s = dir.write("s.csv", "object,a,b,d\na,1,0.2,0.3\nb,0.2,1,0.4\nd,0.3,0.4,1\n");
  const RunResult r = run({"analyze", "--features", f, "--similarity", s, "--out-dir", dir.file("o")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("StrictMismatch"), std::string::npos);
  EXPECT_NE(r.err.find("d"), std::string::npos);
  EXPECT_NE(r.err.find("c"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(dir.file("o/table.csv")));
}

TEST(Cli, AnalyzeIntersectKeepsSharedObjects) {
  TempDir dir;
  const auto f = dir.write("f.csv", "object,h,g,k\na,1,0,1\nb,1,1,0\nc,0,1,1\nz,1,1,1\n");
  const auto s = dir.write("s.csv", "object,a,b,c\na,1,0.2,0.3\nb,0.2,1,0.4\nc,0.3,0.4,1\n");
  const RunResult r =
      run({"analyze", "--features", f, "--similarity", s, "--align", "intersect", "--out-dir", dir.file("o")});
  EXPECT_NE(r.code, 2) << r.err;
  const auto manifest = nlohmann::json::parse(slurp(dir.file("o/manifest.json")));
  EXPECT_EQ(manifest["datasets"][0]["dropped_feature_objects"][0], "z");
}

TEST(Cli, AnalyzeUnwritableOutDirIsIoExit) {
  TempDir dir;
  const std::string sim = simulate(dir, "sim", "inverse-size", "7");
  const std::string blocker = dir.write("blocker", "not a directory");
  const RunResult r = run({"analyze", "--features", sim + "/features.csv", "--similarity", sim + "/similarity.csv",
                           "--out-dir", blocker + "/out"});
  EXPECT_EQ(r.code, 5) << r.err;
}

TEST(Cli, AnalyzeDegenerateDatasetIsStatisticsExit) {
  TempDir dir;
  const std::string sim = simulate(dir, "sim", "uniform", "7");
  const RunResult r = run({"analyze", "--features", sim + "/features.csv", "--similarity", sim + "/similarity.csv",
                           "--name", "flat", "--out-dir", dir.file("out")});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("ZeroVariance"), std::string::npos);
  EXPECT_NE(slurp(dir.file("out/table.csv")).find("flat,NA,NA"), std::string::npos);
}

TEST(Cli, AnalyzeIsDeterministicAcrossThreadCounts) {
  TempDir dir;
  std::vector<std::string> args = {"analyze"};
  for (const char* seed : {"1", "2", "3"}) {
    const std::string sim = simulate(dir, std::string("sim") + seed, "inverse-size", seed);
    args.insert(args.end(), {"--features", sim + "/features.csv", "--similarity", sim + "/similarity.csv", "--name",
                             std::string("set") + seed});
  }
  auto with_out = [&](const std::string& out) {
    auto a = args;
    a.insert(a.end(), {"--out-dir", out});
    return a;
  };
  setenv("SIZE_LENS_THREADS", "1", 1);
  ASSERT_EQ(run(with_out(dir.file("one"))).code, 0);
  setenv("SIZE_LENS_THREADS", "3", 1);
  ASSERT_EQ(run(with_out(dir.file("three"))).code, 0);
  unsetenv("SIZE_LENS_THREADS");
  for (const char* f : {"table.csv", "table.full.csv", "set1.svg", "set3.weights.csv"}) {
    EXPECT_EQ(slurp(dir.file(std::string("one/") + f)), slurp(dir.file(std::string("three/") + f))) << f;
  }
}

TEST(Cli, ReportPublishedPearsonColumn) {
  TempDir dir;
  std::vector<SizeLawReport> rows;
  for (const auto& p : group2_rows()) {
    SizeLawReport r;
    r.set_name = p.set;
    r.pearson = p.pearson;
    r.spearman = p.spearman;
    rows.push_back(r);
  }
  write_table(rows, dir.file("group2.csv"));
  const RunResult r = run({"report", dir.file("group2.full.csv"), "--out-dir", dir.file("rep")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string ttest = slurp(dir.file("rep/ttest.csv"));
  EXPECT_NE(ttest.find("pearson,-7.6050,16,<0.0001"), std::string::npos) << ttest;
}

TEST(Cli, ReportNeedsTwoRows) {
  TempDir dir;
  SizeLawReport one;
  one.set_name = "only";
  one.pearson = -0.5;
  one.spearman = -0.4;
  write_table(std::vector<SizeLawReport>{one}, dir.file("one.csv"));
  const RunResult r = run({"report", dir.file("one.full.csv"), "--out-dir", dir.file("rep")});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("TooFewDatasets"), std::string::npos);
}

TEST(Cli, ReportExcludesDegenerateRows) {
  TempDir dir;
  std::vector<SizeLawReport> rows;
  for (double v : {-0.5, -0.7, -0.6}) {
    SizeLawReport r;
    r.set_name = "s" + std::to_string(rows.size());
    r.pearson = v;
    r.spearman = v;
    rows.push_back(r);
  }
  SizeLawReport bad;
  bad.set_name = "flat";
  bad.degenerate_reason = "ZeroVariance";
  rows.push_back(bad);
  write_table(rows, dir.file("a.csv"));
  const RunResult r = run({"report", dir.file("a.full.csv"), "--out-dir", dir.file("rep")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string ttest = slurp(dir.file("rep/ttest.csv"));
  EXPECT_NE(ttest.find("pearson,-10.3923,2,0.0046,-0.6000,0.1000,3,1"), std::string::npos) << ttest;
  EXPECT_NE(slurp(dir.file("rep/table.csv")).find("flat,NA"), std::string::npos);
}

TEST(Cli, ReportMissingInputIsIoExit) {
  TempDir dir;
  EXPECT_EQ(run({"report", dir.file("nope.full.csv"), dir.file("nope2.full.csv"), "--out-dir", dir.file("r")}).code, 5);
}
