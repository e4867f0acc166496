#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ahcrf/augmentation.hpp"
#include "ahcrf/config.hpp"
#include "ahcrf/corruption.hpp"
#include "ahcrf/dataset.hpp"
#include "ahcrf/features.hpp"
#include "ahcrf/metrics.hpp"
#include "ahcrf/training.hpp"

namespace ahcrf {

enum class Task {
  kClean,                   // task1-clean
  kCleanTrainCorruptTest,   // task2-clean-train-corrupt-test
  kMixed,                   // task3-mixed
  kGapfilling,              // gapfilling
  kEarlyPrediction,         // early-prediction
  kRandomOutliers,          // random-outliers
};

const char* to_string(Task task) noexcept;
Task task_from_string(const std::string& name);

enum class SplitKind { kKFold, kLeaveOneOut, kFixed };

struct SplitSpec {
  SplitKind kind = SplitKind::kKFold;
  std::size_t folds = 5;
  double train_fraction = 0.5;  // fixed split, per class
  std::uint64_t seed = 1;
};

/// Test-index sets, one per fold. Class-stratified for k-fold and fixed
/// splits; every action is tested exactly once under k-fold and LOO.
std::vector<std::vector<std::size_t>> make_folds(const Dataset& dataset, const SplitSpec& split);

struct ExperimentConfig {
  Task task = Task::kClean;
  CorruptionSpec corruption;
  // Explicitly requested corruption kind; tasks with a fixed kind reject a
  // conflicting request.
  std::optional<CorruptionKind> requested_kind;
  TrainConfig model;
  AugmentOptions augmentation;
  IndexBackend backend = IndexBackend::kLinearScan;
  SplitSpec split;
  double mixed_fraction = 0.38;  // task3: fraction of corrupt actions in train and test
  bool augmented = true;         // train the alternative-augmented model
  bool baseline = true;          // also train the plain HCRF
  // Empty: use model.epsilon. Otherwise candidates multiplied by the median
  // |<x_t, lambda_p>| of a plain model and chosen on a validation split.
  std::vector<double> epsilon_grid;
  double validation_fraction = 0.25;
};

/// Checks task/corruption consistency; throws InvalidInput.
void validate(const ExperimentConfig& config);

struct RuntimeStats {
  double augment_seconds = 0.0;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

struct ExperimentReport {
  std::string task;
  double ratio = 0.0;
  std::vector<std::string> classes;
  std::size_t test_count = 0;
  std::optional<double> accuracy;           // augmented model (or plain if augmentation is off)
  std::optional<double> baseline_accuracy;  // plain HCRF
  ConfusionMatrix confusion;
  std::optional<ConfusionMatrix> baseline_confusion;
  std::optional<double> alternative_accurate_fraction;
  std::optional<double> alternative_at_least_one;
  std::size_t replaced_outliers = 0;
  std::optional<double> correct_replacement;
  std::vector<double> epsilons;  // per fold
  std::optional<RuntimeStats> runtime;

  /// Equality of every deterministic field (runtime excluded).
  bool same_results(const ExperimentReport& other) const;
};

ExperimentReport run_experiment(const ExperimentConfig& config, const Dataset& dataset);

/// One report per ratio. Models are reused across ratios when the training
/// data does not depend on the ratio.
std::vector<ExperimentReport> run_sweep(const ExperimentConfig& config, const Dataset& dataset,
                                        std::span<const double> ratios);

/// "a:b:step" or a comma list.
std::vector<double> parse_ratios(const std::string& text);

// Readers for the shared key=value configuration.
SyntheticSpec synthetic_spec_from(const KeyValueConfig& config);
TrainConfig train_config_from(const KeyValueConfig& config);
AugmentOptions augment_options_from(const KeyValueConfig& config);
CorruptionSpec corruption_spec_from(const KeyValueConfig& config);
ExperimentConfig experiment_config_from(const KeyValueConfig& config);

}  // namespace ahcrf
