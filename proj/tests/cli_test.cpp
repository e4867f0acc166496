#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ahcrf/cli.hpp"
#include "ahcrf/io.hpp"

namespace ahcrf {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ahcrf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream cfg(path("small.cfg"));
    cfg << "seed=3\nsynth.num_classes=3\nsynth.actions_per_class=4\nsynth.length=5\nsynth.dim=3\n"
           "train.poses=3\ntrain.max_iterations=40\nexperiment.folds=2\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "ahcrf");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST_F(Cli, SynthTrainPredict) {
  ASSERT_EQ(run({"synth", "--config", path("small.cfg"), "--out", path("d.txt")}), 0) << err_.str();
  ASSERT_EQ(run({"train", "--config", path("small.cfg"), "--data", path("d.txt"), "--out", path("m.txt"), "--trace-out",
                 path("trace.csv")}),
            0)
      << err_.str();
  EXPECT_TRUE(fs::exists(path("m.txt")));
  EXPECT_NE(out_.str().find("status="), std::string::npos);
  EXPECT_TRUE(load_model(path("m.txt")).augmented);
  const auto trace = lines([&] {
    std::ifstream in(path("trace.csv"));
    return std::string(std::istreambuf_iterator<char>(in), {});
  }());
  ASSERT_GE(trace.size(), 3u);
  EXPECT_EQ(trace[1], "iteration,objective,gradient_norm");

  ASSERT_EQ(run({"predict", "--model", path("m.txt"), "--data", path("d.txt"), "--train", path("d.txt"), "--decode"}), 0)
      << err_.str();
  const auto rows = lines(out_.str());
  ASSERT_EQ(rows.size(), 12u);
  std::istringstream first(rows[0]);
  std::string id, label, pair;
  first >> id >> label;
  int positions = 0;
  while (first >> pair) {
    ++positions;
    EXPECT_TRUE(pair.rfind(std::to_string(positions) + ":", 0) == 0) << pair;
    EXPECT_NE(pair.find(','), std::string::npos);
  }
  EXPECT_EQ(positions, 5);
}

TEST_F(Cli, PlainModelPredicts) {
  ASSERT_EQ(run({"synth", "--config", path("small.cfg"), "--out", path("d.txt")}), 0);
  ASSERT_EQ(run({"train", "--config", path("small.cfg"), "--plain", "--data", path("d.txt"), "--out", path("m.txt")}), 0);
  EXPECT_FALSE(load_model(path("m.txt")).augmented);
  ASSERT_EQ(run({"predict", "--model", path("m.txt"), "--data", path("d.txt")}), 0) << err_.str();
  EXPECT_EQ(lines(out_.str()).size(), 12u);
}

TEST_F(Cli, CorruptAugmentRoundTrip) {
  ASSERT_EQ(run({"synth", "--config", path("small.cfg"), "--out", path("d.txt")}), 0);
  ASSERT_EQ(run({"corrupt", "--data", path("d.txt"), "--out", path("c.txt"), "--kind", "gap", "--ratio", "0.4", "--known"}),
            0)
      << err_.str();
  const auto corrupted = load_dataset(path("c.txt"));
  EXPECT_EQ(std::count(corrupted.actions[0].truth_mask->begin(), corrupted.actions[0].truth_mask->end(), true), 2);
  ASSERT_EQ(run({"augment", "--train", path("d.txt"), "--data", path("c.txt"), "--out", path("a.txt"), "--known-mask"}), 0)
      << err_.str();
  EXPECT_NE(out_.str().find("with 60 nearest"), std::string::npos) << out_.str();
  EXPECT_EQ(load_augmented(path("a.txt")).size(), 12u);
}

TEST_F(Cli, EvaluateSweepAndReport) {
  ASSERT_EQ(run({"evaluate", "--config", path("small.cfg"), "--task", "random-outliers", "--ratios", "0:0.8:0.1", "--out",
                 path("r.txt"), "--csv", path("curve.csv")}),
            0)
      << err_.str();
  std::ifstream csv(path("curve.csv"));
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) rows += !line.empty() && line[0] != '#';
  EXPECT_EQ(rows, 10u);
  EXPECT_EQ(load_reports(path("r.txt")).size(), 9u);
  EXPECT_FALSE(load_reports(path("r.txt"))[0].runtime.has_value());

  ASSERT_EQ(run({"report", "--in", path("r.txt"), "--out-dir", path("tables")}), 0) << err_.str();
  EXPECT_TRUE(fs::exists(path("tables/curve.csv")));
  EXPECT_TRUE(fs::exists(path("tables/confusion_9.csv")));
}

TEST_F(Cli, SeedOverrideIsDeterministic) {
  ASSERT_EQ(run({"synth", "--config", path("small.cfg"), "--seed", "11", "--out", path("a.txt")}), 0);
  ASSERT_EQ(run({"synth", "--config", path("small.cfg"), "--seed", "11", "--out", path("b.txt")}), 0);
  ASSERT_EQ(run({"synth", "--config", path("small.cfg"), "--seed", "12", "--out", path("c.txt")}), 0);
  EXPECT_EQ(load_dataset(path("a.txt")), load_dataset(path("b.txt")));
  EXPECT_NE(load_dataset(path("a.txt")), load_dataset(path("c.txt")));
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"train", "--bogus"}), 2);
  EXPECT_NE(err_.str().find("--data"), std::string::npos);
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"evaluate", "--ratio", "abc"}), 2);
}

TEST_F(Cli, HelpExitsZero) {
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_NE(out_.str().find("evaluate"), std::string::npos);
  EXPECT_EQ(run({"predict", "--help"}), 0);
  EXPECT_NE(out_.str().find("--decode"), std::string::npos);
}

TEST_F(Cli, UnknownConfigKeysAreReported) {
  std::ofstream(path("typo.cfg")) << "seed=3\nsynth.num_classes=2\nsynth.actions_per_class=2\ntrain.pose=3\n";
  ASSERT_EQ(run({"synth", "--config", path("typo.cfg"), "--out", path("d.txt")}), 0);
  EXPECT_NE(err_.str().find("unknown config key 'train.pose'"), std::string::npos) << err_.str();
  ASSERT_EQ(run({"synth", "--config", path("small.cfg"), "--out", path("d.txt")}), 0);
  EXPECT_EQ(err_.str(), "");
}

TEST_F(Cli, RuntimeErrorsExitOne) {
  EXPECT_EQ(run({"train", "--data", path("missing.txt")}), 1);
  EXPECT_FALSE(err_.str().empty());
  std::ofstream(path("bad.txt")) << "ahcrf-dataset 1\naction id=a\n";
  EXPECT_EQ(run({"train", "--data", path("bad.txt")}), 1);
  EXPECT_NE(err_.str().find(":2"), std::string::npos) << err_.str();
}

}  // namespace
}  // namespace ahcrf
