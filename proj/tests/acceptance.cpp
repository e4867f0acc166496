// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "ahcrf/augmentation.hpp"
#include "ahcrf/config.hpp"
#include "ahcrf/crf.hpp"
#include "ahcrf/experiment.hpp"
#include "ahcrf/features.hpp"
#include "ahcrf/io.hpp"
#include "ahcrf/training.hpp"
#include "oracle.hpp"

namespace ahcrf {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

ActionSequence plain_of(const AugmentedAction& action) {
  ActionSequence a;
  a.id = action.id;
  a.label = action.label;
  for (const auto& segment : action.segments) a.segments.push_back(segment.original);
  return a;
}

double max_rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

Outcome enumeration() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  const int instances = 150;
  double worst = 0.0;
  int map_mismatches = 0;
  for (int i = 0; i < instances; ++i) {
    const std::size_t classes = oracle::draw(rng, 1, 3), length = oracle::draw(rng, 1, 4);
    const std::size_t poses = oracle::draw(rng, 1, 3), dim = oracle::draw(rng, 1, 5);
    const auto action = oracle::random_action(rng, length, dim, 3);
    const auto params = oracle::random_parameters(rng, classes, poses, dim);
    const auto chain = make_chain(action);

    worst = std::max(worst, max_rel(log_partition(chain, params), oracle::log_partition(action, params, true)));
    const auto post = class_posterior(chain, params);
    const auto want = oracle::log_posterior(action, params, true);
    for (std::size_t y = 0; y < classes; ++y) {
      worst = std::max(worst, max_rel(std::exp(post.log_posterior[y]), std::exp(want[y])));
      const auto got = posterior_marginals(chain, y, params);
      const auto ref = oracle::marginals(action, y, params, true);
      for (std::size_t t = 0; t < length; ++t) {
        for (std::size_t k = 0; k < ref.unary[t].size(); ++k) worst = std::max(worst, max_rel(got.unary[t][k], ref.unary[t][k]));
        if (t + 1 < length) {
          for (std::size_t k = 0; k < ref.pairwise[t].size(); ++k) {
            worst = std::max(worst, max_rel(got.pairwise[t][k], ref.pairwise[t][k]));
          }
        }
      }
      const auto map = map_decode(chain, y, params);
      if (!(map.states == oracle::argmax(action, y, params, true).states)) ++map_mismatches;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-9 && map_mismatches == 0 && elapsed < 30.0,
          std::to_string(instances) + " instances, max rel err " + fmt(worst) + ", MAP mismatches " +
              std::to_string(map_mismatches) + ", " + fmt(elapsed) + " s"};
}

Outcome gradient_check() {
  const auto start = Clock::now();
  std::mt19937_64 rng(102);
  AugmentedDataset data;
  for (int i = 0; i < 4; ++i) {
    auto action = oracle::random_action(rng, 3, 3, 2);
    action.id = "a" + std::to_string(i);
    action.label = "c" + std::to_string(i % 2);
    data.actions.push_back(std::move(action));
  }
  const TrainingSet set(data, {"c0", "c1"});
  const double sigma = 1.5, h = 1e-5;
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    auto params = oracle::random_parameters(rng, 2, 2, 3, 0.5);
    const auto grad = gradient(set, params, sigma);
    for (std::size_t k = 0; k < grad.size(); ++k) {
      auto plus = params, minus = params;
      plus.values()[k] += h;
      minus.values()[k] -= h;
      const double fd = (objective(set, plus, sigma) - objective(set, minus, sigma)) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad[k]) / std::max(1.0, std::abs(grad[k])));
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-5 && elapsed < 60.0, "20 points, max rel err " + fmt(worst) + ", " + fmt(elapsed) + " s"};
}

Outcome reduction() {
  std::mt19937_64 rng(103);
  double zero_alt = 0.0, identical = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto params = oracle::random_parameters(rng, 3, 3, 4);
    params.epsilon = 0.0;
    const auto plain = plain_of(oracle::random_action(rng, 4, 4, 0));
    const auto a = class_posterior(make_chain(without_alternatives(plain)), params);
    const auto b = class_posterior(make_chain(plain), params);
    for (std::size_t y = 0; y < 3; ++y) {
      zero_alt = std::max(zero_alt, std::abs(std::exp(a.log_posterior[y]) - std::exp(b.log_posterior[y])));
    }
  }
  for (double eps : {0.0, 1.0, 10.0}) {
    for (int i = 0; i < 50; ++i) {
      auto params = oracle::random_parameters(rng, 3, 3, 4);
      params.epsilon = eps;
      auto action = oracle::random_action(rng, 4, 4, 3, false);
      for (auto& segment : action.segments) {
        for (auto& alt : segment.alternatives) alt.vector = segment.original;
      }
      const auto a = class_posterior(make_chain(action), params);
      const auto b = class_posterior(make_chain(plain_of(action)), params);
      for (std::size_t y = 0; y < 3; ++y) {
        identical = std::max(identical, std::abs(std::exp(a.log_posterior[y]) - std::exp(b.log_posterior[y])));
      }
    }
  }
  return {zero_alt <= 1e-12 && identical <= 1e-9,
          "zero-alternative diff " + fmt(zero_alt) + ", identical-alternative diff " + fmt(identical) + " (eps 0, 1, 10)"};
}

std::size_t kept_originals(const ObservationChain& chain, const ModelParameters& params) {
  std::size_t kept = 0;
  for (std::size_t y = 0; y < params.num_classes(); ++y) {
    for (const auto& s : map_decode(chain, y, params).states) kept += s.observation == 0;
  }
  return kept;
}

Outcome bias() {
  std::mt19937_64 rng(104);
  int replaced_at_huge = 0, non_monotone = 0;
  const std::vector<double> grid{0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e6};
  for (int i = 0; i < 50; ++i) {
    auto params = oracle::random_parameters(rng, 2, 3, 4, 2.0);
    const auto action = oracle::random_action(rng, 4, 4, 3, false);
    const auto chain = make_chain(action);
    std::size_t previous = 0;
    for (double eps : grid) {
      params.epsilon = eps;
      const std::size_t kept = kept_originals(chain, params);
      if (kept < previous) ++non_monotone;
      previous = kept;
    }
    replaced_at_huge += static_cast<int>(2 * action.length() - previous);
  }
  return {replaced_at_huge == 0 && non_monotone == 0,
          "50 instances, replacements at eps=1e6: " + std::to_string(replaced_at_huge) +
              ", monotonicity violations: " + std::to_string(non_monotone)};
}

Outcome augmentation_cost() {
  std::size_t bad = 0, actions = 0;
  for (std::size_t n : {1u, 7u, 50u, 400u}) {
    SyntheticSpec spec;
    spec.num_classes = 2;
    spec.actions_per_class = n;
    spec.length = 6 + n % 5;
    spec.seed = n;
    const auto train = generate_synthetic_dataset(spec);
    spec.seed += 1000;
    const auto test = generate_synthetic_dataset(spec);
    for (auto backend : {IndexBackend::kLinearScan, IndexBackend::kKdTree}) {
      const auto index = RetrievalIndex::build(train, backend);
      for (const auto* set : {&train, &test}) {
        AugmentOptions options;
        options.exclude_self = set == &train;
        for (const auto& action : set->actions) {
          index.reset_query_count();
          augment_action(index, action, options);
          bad += index.query_count() != action.length();
          ++actions;
        }
      }
    }
  }
  return {bad == 0, std::to_string(actions) + " actions over pools of 2..800, wrong query counts: " + std::to_string(bad)};
}

// Synthetic analogue of the random-outlier robustness curve. The swept
// reports are shared with the clean-data parity check.
struct RobustnessRun {
  std::vector<ExperimentReport> reports;
  double seconds = 0.0;
};

// 5 classes x 40 actions, T=10, d=8 are the generator defaults.
KeyValueConfig robustness_settings() {
  return KeyValueConfig::parse(
      "seed=1\nexperiment.task=random-outliers\nexperiment.folds=5\nsynth.noise_std=0.7\ntrain.poses=8\n"
      "augment.duplicate_window=1\n");
}

const RobustnessRun& robustness_run() {
  static const RobustnessRun run = [] {
    const auto start = Clock::now();
    RobustnessRun r;
    const auto settings = robustness_settings();
    r.reports = run_sweep(experiment_config_from(settings), generate_synthetic_dataset(synthetic_spec_from(settings)),
                          parse_ratios("0:0.8:0.1"));
    r.seconds = seconds_since(start);
    return r;
  }();
  return run;
}

Outcome robustness() {
  const auto& run = robustness_run();
  bool pass = run.seconds < 600.0;
  std::ostringstream detail;
  double gap_at_half = 0.0;
  for (const auto& r : run.reports) {
    const double gap = *r.accuracy - *r.baseline_accuracy;
    if (r.ratio > 0.0 && r.ratio <= 0.5 + 1e-9) {
      if (!r.correct_replacement || *r.correct_replacement < 0.75) pass = false;
    }
    if (r.ratio >= 0.3 - 1e-9 && gap <= 0.0) pass = false;
    if (std::abs(r.ratio - 0.5) < 1e-9) gap_at_half = gap;
    detail << ' ' << fmt(r.ratio, 2) << ':' << fmt(*r.accuracy) << '/' << fmt(*r.baseline_accuracy) << '/'
           << (r.correct_replacement ? fmt(*r.correct_replacement) : std::string("-"));
  }
  if (gap_at_half < 0.15) pass = false;
  return {pass, "gap at 0.5 " + fmt(100 * gap_at_half) + " points, " + fmt(run.seconds) +
                    " s; ratio:augmented/plain/correct-replacement" + detail.str()};
}

Outcome parity() {
  const auto& clean = robustness_run().reports.front();
  const double diff = std::abs(*clean.accuracy - *clean.baseline_accuracy);
  return {clean.ratio == 0.0 && diff <= 0.02, "ratio 0: augmented " + fmt(*clean.accuracy) + ", plain " +
                                                   fmt(*clean.baseline_accuracy) + ", diff " + fmt(100 * diff) +
                                                   " points"};
}

Outcome scaling() {
  std::mt19937_64 rng(108);
  const std::size_t classes = 5, length = 10, dim = 8, alternatives = 9;
  AugmentedAction action = oracle::random_action(rng, length, dim, 0);
  for (auto& segment : action.segments) {
    for (std::size_t j = 0; j < alternatives; ++j) segment.alternatives.push_back({oracle::random_vector(rng, dim), "s", j, j, "c0"});
  }
  const auto chain = make_chain(action);
  std::vector<double> log_states, log_time;
  std::ostringstream detail;
  for (std::size_t poses : {4u, 8u, 16u, 32u}) {
    const auto params = oracle::random_parameters(rng, classes, poses, dim, 0.3);
    double best = 1e300;
    for (int rep = 0; rep < 7; ++rep) {
      int calls = 0;
      const auto start = Clock::now();
      do {
        volatile double sink = class_posterior(chain, params).log_posterior[0];
        (void)sink;
        ++calls;
      } while (seconds_since(start) < 0.05);
      best = std::min(best, seconds_since(start) / calls);
    }
    const double states = static_cast<double>((1 + alternatives) * poses);
    log_states.push_back(std::log(states));
    log_time.push_back(std::log(best));
    detail << ' ' << poses << ':' << fmt(best * 1e6) << "us";
  }
  const double mx = std::accumulate(log_states.begin(), log_states.end(), 0.0) / 4;
  const double my = std::accumulate(log_time.begin(), log_time.end(), 0.0) / 4;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    sxy += (log_states[i] - mx) * (log_time[i] - my);
    sxx += (log_states[i] - mx) * (log_states[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope <= 2.3, "log-log slope " + fmt(slope) + " over S=4..32 (|Y|=5, T=10, 10 observations);" + detail.str()};
}

Outcome determinism() {
  const auto data = [] {
    SyntheticSpec spec;
    spec.actions_per_class = 8;
    spec.noise_std = 0.7;
    return generate_synthetic_dataset(spec);
  }();
  ExperimentConfig config;
  config.task = Task::kRandomOutliers;
  config.model.num_poses = 4;
  config.split.folds = 2;
  const auto ratios = parse_ratios("0,0.4");
  const auto a = run_sweep(config, data, ratios);
  const auto b = run_sweep(config, data, ratios);
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].same_results(b[i]);

  const auto dir = std::filesystem::temp_directory_path() / "ahcrf_acceptance";
  std::filesystem::create_directories(dir);
  const std::string model_path = (dir / "model.txt").string(), data_path = (dir / "data.txt").string();
  const std::string aug_path = (dir / "aug.txt").string(), report_path = (dir / "report.txt").string();

  const auto index = RetrievalIndex::build(data, IndexBackend::kKdTree);
  AugmentOptions options;
  options.exclude_self = true;
  AugmentedDataset augmented;
  for (const auto& action : data.actions) augmented.actions.push_back(augment_action(index, action, options));
  TrainConfig train_config;
  train_config.num_poses = 4;
  train_config.max_iterations = 50;
  const auto model = train(TrainingSet(augmented, class_names(data)), train_config).params;

  save_model(model_path, model, true);
  save_dataset(data_path, data);
  save_augmented(aug_path, augmented);
  save_reports(report_path, a);
  const auto model2 = load_model(model_path).params;
  const auto data2 = load_dataset(data_path);
  const auto augmented2 = load_augmented(aug_path);
  const auto reports2 = load_reports(report_path);
  bool lossless = model2 == model && data2 == data && augmented2 == augmented && reports2.size() == a.size();
  for (std::size_t i = 0; lossless && i < a.size(); ++i) lossless = reports2[i].same_results(a[i]);

  double drift = 0.0;
  for (std::size_t i = 0; i < augmented.size(); ++i) {
    const auto p = class_posterior(make_chain(augmented.actions[i]), model).log_posterior;
    const auto q = class_posterior(make_chain(augmented2.actions[i]), model2).log_posterior;
    for (std::size_t y = 0; y < p.size(); ++y) drift = std::max(drift, std::abs(p[y] - q[y]));
  }
  std::filesystem::remove_all(dir);
  return {same && lossless && drift == 0.0, std::string("repeat run ") + (same ? "identical" : "differs") +
                                                ", files " + (lossless ? "lossless" : "lossy") +
                                                ", posterior drift " + fmt(drift)};
}

}  // namespace
}  // namespace ahcrf

int main() {
  using namespace ahcrf;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"enumeration equivalence", enumeration},
      {"gradient correctness", gradient_check},
      {"reduction and cancellation", reduction},
      {"bias behavior", bias},
      {"augmentation cost", augmentation_cost},
      {"synthetic robustness", robustness},
      {"clean-data parity", parity},
      {"complexity scaling", scaling},
      {"determinism and persistence", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << ' ' << i + 1 << ' ' << criteria[i].first << ": " << outcome.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
