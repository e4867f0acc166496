#include "ahcrf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include "ahcrf/error.hpp"
#include "ahcrf/io.hpp"

namespace ahcrf {
namespace {

constexpr const char* kTaskNames[] = {
    "task1-clean", "task2-clean-train-corrupt-test", "task3-mixed", "gapfilling", "early-prediction", "random-outliers",
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t fold, std::uint64_t role) {
  return splitmix64(splitmix64(splitmix64(base) ^ fold) ^ role);
}

void shuffle_indices(std::vector<std::size_t>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

std::vector<std::vector<std::size_t>> indices_by_class(const Dataset& dataset) {
  const auto names = class_names(dataset);
  std::vector<std::vector<std::size_t>> groups(names.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& label = dataset.actions[i].label;
    if (!label) throw InvalidInput("action '" + dataset.actions[i].id + "' has no label");
    groups[class_index(names, *label)].push_back(i);
  }
  return groups;
}

Dataset subset(const Dataset& dataset, std::span<const std::size_t> indices) {
  Dataset out;
  out.actions.reserve(indices.size());
  for (std::size_t i : indices) out.actions.push_back(dataset.actions[i]);
  return out;
}

// Corruption applied to the training and test side for one ratio.
struct TaskCorruption {
  std::optional<CorruptionSpec> train;
  CorruptionSpec test;
  AugmentOptions augmentation;
};

TaskCorruption task_corruption(const ExperimentConfig& config, double ratio) {
  TaskCorruption out;
  out.test = config.corruption;
  out.test.ratio = ratio;
  out.test.action_fraction = 1.0;
  out.augmentation = config.augmentation;
  switch (config.task) {
    case Task::kClean:
      out.test.ratio = 0.0;
      break;
    case Task::kCleanTrainCorruptTest:
      break;
    case Task::kMixed:
      out.test.action_fraction = config.mixed_fraction;
      out.train = out.test;
      break;
    case Task::kGapfilling:
      out.test.kind = CorruptionKind::kGap;
      break;
    case Task::kEarlyPrediction:
      out.test.kind = CorruptionKind::kTruncate;
      out.test.known = true;
      out.augmentation.drop_masked_original = true;
      break;
    case Task::kRandomOutliers:
      out.test.kind = CorruptionKind::kRandomSegments;
      break;
  }
  if (out.test.known) out.augmentation.known_mask_mode = true;
  out.augmentation.exclude_self = false;
  return out;
}

bool training_depends_on_ratio(const ExperimentConfig& config) {
  return config.task == Task::kMixed || (config.augmented && !config.epsilon_grid.empty());
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

AugmentedDataset augment_all(const RetrievalIndex& index, const Dataset& data, const AugmentOptions& options,
                             bool exclude_self) {
  AugmentOptions opts = options;
  opts.exclude_self = exclude_self;
  AugmentedDataset out;
  out.actions.reserve(data.size());
  for (const auto& action : data.actions) out.actions.push_back(augment_action(index, action, opts));
  return out;
}

double median_unary_magnitude(const Dataset& data, const ModelParameters& params) {
  std::vector<double> values;
  for (const auto& action : data.actions) {
    for (const auto& segment : action.segments) {
      for (std::size_t p = 0; p < params.num_poses(); ++p) values.push_back(std::abs(unary_plain(segment, p, params)));
    }
  }
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

// Trained models for one fold. Training sets reference the stored data, so
// the object is kept behind a unique_ptr and never copied.
struct FoldModels {
  Dataset train;
  std::optional<RetrievalIndex> index;
  AugmentedDataset train_augmented;
  std::optional<ModelParameters> plain;
  std::optional<ModelParameters> augmented;
  double epsilon = 0.0;
  double augment_seconds = 0.0;
  double train_seconds = 0.0;
};

ModelParameters fit_plain(const Dataset& train, const std::vector<std::string>& classes, const TrainConfig& config) {
  TrainingSet set(train, classes);
  return ::ahcrf::train(set, config).params;
}

ModelParameters fit_augmented(const AugmentedDataset& train, const std::vector<std::string>& classes,
                              const TrainConfig& config, double epsilon) {
  TrainingSet set(train, classes);
  TrainConfig c = config;
  c.epsilon = epsilon;
  return ::ahcrf::train(set, c).params;
}

double accuracy_on(const AugmentedDataset& data, const ModelParameters& params) {
  std::size_t hit = 0;
  for (const auto& action : data.actions) {
    if (predict(make_chain(action), params) == class_index(params.class_names, *action.label)) ++hit;
  }
  return data.size() == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(data.size());
}

// Picks epsilon on a stratified validation split of the fold's training
// data. Candidates are scaled by the median unary magnitude of a plain
// model; ties go to the smaller epsilon.
double select_epsilon(const ExperimentConfig& config, const Dataset& train, const std::vector<std::string>& classes,
                      const TaskCorruption& corruption, std::size_t fold, double replacement_std) {
  SplitSpec split;
  split.kind = SplitKind::kFixed;
  split.train_fraction = 1.0 - config.validation_fraction;
  split.seed = derive_seed(config.split.seed, fold, 7);
  const auto held = make_folds(train, split).front();
  std::vector<std::size_t> fit_idx;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!std::binary_search(held.begin(), held.end(), i)) fit_idx.push_back(i);
  }
  const Dataset fit = subset(train, fit_idx);
  Dataset validation = subset(train, held);
  CorruptionSpec spec = corruption.test;
  spec.seed = derive_seed(config.corruption.seed, fold, 8);
  validation = inject_corruption(validation, spec, replacement_std);

  auto plain = fit_plain(fit, classes, config.model);
  plain.class_names = classes;
  const double scale = median_unary_magnitude(fit, plain);

  const auto index = RetrievalIndex::build(fit, config.backend);
  const auto fit_aug = augment_all(index, fit, corruption.augmentation, true);
  const auto val_aug = augment_all(index, validation, corruption.augmentation, false);

  double best_eps = 0.0;
  double best_acc = -1.0;
  std::vector<double> candidates = config.epsilon_grid;
  for (double& c : candidates) c *= scale;
  std::sort(candidates.begin(), candidates.end());
  for (double eps : candidates) {
    auto model = fit_augmented(fit_aug, classes, config.model, eps);
    model.class_names = classes;
    const double acc = accuracy_on(val_aug, model);
    if (acc > best_acc) {
      best_acc = acc;
      best_eps = eps;
    }
  }
  return best_eps;
}

std::unique_ptr<FoldModels> build_fold(const ExperimentConfig& config, const Dataset& dataset,
                                       const std::vector<std::string>& classes, std::span<const std::size_t> train_idx,
                                       const TaskCorruption& corruption, std::size_t fold, double replacement_std) {
  auto models = std::make_unique<FoldModels>();
  models->train = subset(dataset, train_idx);
  if (corruption.train) {
    CorruptionSpec spec = *corruption.train;
    spec.seed = derive_seed(config.corruption.seed, fold, 1);
    models->train = inject_corruption(models->train, spec, replacement_std);
  }

  if (config.baseline || !config.augmented) {
    const auto start = Clock::now();
    models->plain = fit_plain(models->train, classes, config.model);
    models->train_seconds += seconds_since(start);
  }
  if (config.augmented) {
    models->epsilon = config.model.epsilon;
    if (!config.epsilon_grid.empty()) {
      models->epsilon = select_epsilon(config, models->train, classes, corruption, fold, replacement_std);
    }
    auto start = Clock::now();
    models->index.emplace(RetrievalIndex::build(models->train, config.backend));
    models->train_augmented = augment_all(*models->index, models->train, corruption.augmentation, true);
    models->augment_seconds += seconds_since(start);
    start = Clock::now();
    models->augmented = fit_augmented(models->train_augmented, classes, config.model, models->epsilon);
    models->train_seconds += seconds_since(start);
  }
  return models;
}

void check_ratio(double ratio) {
  if (!(ratio >= 0.0 && ratio <= 0.8)) throw InvalidInput("corruption ratio must lie in [0, 0.8]");
}

}  // namespace

const char* to_string(Task task) noexcept { return kTaskNames[static_cast<int>(task)]; }

Task task_from_string(const std::string& name) {
  for (int i = 0; i < 6; ++i) {
    if (name == kTaskNames[i]) return static_cast<Task>(i);
  }
  throw InvalidInput("unknown task '" + name + "'");
}

std::vector<std::vector<std::size_t>> make_folds(const Dataset& dataset, const SplitSpec& split) {
  if (dataset.empty()) throw InvalidInput("cannot split an empty dataset");
  std::vector<std::vector<std::size_t>> folds;
  switch (split.kind) {
    case SplitKind::kLeaveOneOut:
      for (std::size_t i = 0; i < dataset.size(); ++i) folds.push_back({i});
      return folds;
    case SplitKind::kKFold: {
      if (split.folds < 2) throw InvalidInput("k-fold split needs at least 2 folds");
      if (split.folds > dataset.size()) throw InvalidInput("more folds than actions");
      auto groups = indices_by_class(dataset);
      std::mt19937_64 rng(split.seed);
      folds.resize(split.folds);
      std::size_t next = 0;
      for (auto& group : groups) {
        shuffle_indices(group, rng);
        for (std::size_t i : group) folds[next++ % split.folds].push_back(i);
      }
      break;
    }
    case SplitKind::kFixed: {
      if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0)) {
        throw InvalidInput("fixed split train_fraction must lie in (0, 1)");
      }
      auto groups = indices_by_class(dataset);
      std::mt19937_64 rng(split.seed);
      folds.resize(1);
      for (auto& group : groups) {
        shuffle_indices(group, rng);
        auto keep = static_cast<std::size_t>(std::lround(split.train_fraction * static_cast<double>(group.size())));
        keep = std::clamp<std::size_t>(keep, 1, group.size());
        folds[0].insert(folds[0].end(), group.begin() + static_cast<std::ptrdiff_t>(keep), group.end());
      }
      if (folds[0].empty()) throw InvalidInput("fixed split leaves no test actions");
      break;
    }
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

void validate(const ExperimentConfig& config) {
  check_ratio(config.corruption.ratio);
  if (config.task == Task::kClean && config.corruption.ratio > 0.0) {
    throw InvalidInput("task1-clean does not allow corruption");
  }
  const auto fixed_kind = [&](CorruptionKind kind) {
    if (config.requested_kind && *config.requested_kind != kind) {
      throw InvalidInput(std::string(to_string(config.task)) + " uses corruption kind " + to_string(kind));
    }
  };
  if (config.task == Task::kGapfilling) fixed_kind(CorruptionKind::kGap);
  if (config.task == Task::kEarlyPrediction) fixed_kind(CorruptionKind::kTruncate);
  if (config.task == Task::kRandomOutliers) fixed_kind(CorruptionKind::kRandomSegments);
  if (!(config.mixed_fraction >= 0.0 && config.mixed_fraction <= 1.0)) {
    throw InvalidInput("mixed fraction must lie in [0, 1]");
  }
  if (!(config.corruption.noise_std >= 0.0)) throw InvalidInput("noise_std must be >= 0");
  if (!config.augmented && !config.baseline) throw InvalidInput("nothing to evaluate: augmented and baseline both off");
  if (!(config.model.sigma > 0.0)) throw InvalidInput("sigma must be > 0");
  if (!(config.model.epsilon >= 0.0)) throw InvalidInput("epsilon must be >= 0");
  if (config.model.num_poses == 0) throw InvalidInput("number of poses must be >= 1");
  for (double c : config.epsilon_grid) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidInput("epsilon grid entries must be finite and >= 0");
  }
  if (!config.epsilon_grid.empty() && !(config.validation_fraction > 0.0 && config.validation_fraction < 1.0)) {
    throw InvalidInput("validation fraction must lie in (0, 1)");
  }
  if (config.split.kind == SplitKind::kKFold && config.split.folds < 2) {
    throw InvalidInput("k-fold split needs at least 2 folds");
  }
  if (config.split.kind == SplitKind::kFixed &&
      !(config.split.train_fraction > 0.0 && config.split.train_fraction < 1.0)) {
    throw InvalidInput("fixed split train_fraction must lie in (0, 1)");
  }
}

bool ExperimentReport::same_results(const ExperimentReport& other) const {
  return task == other.task && ratio == other.ratio && classes == other.classes && test_count == other.test_count &&
         accuracy == other.accuracy && baseline_accuracy == other.baseline_accuracy && confusion == other.confusion &&
         baseline_confusion == other.baseline_confusion &&
         alternative_accurate_fraction == other.alternative_accurate_fraction &&
         alternative_at_least_one == other.alternative_at_least_one && replaced_outliers == other.replaced_outliers &&
         correct_replacement == other.correct_replacement && epsilons == other.epsilons;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const Dataset& dataset) {
  const double ratio = config.corruption.ratio;
  return run_sweep(config, dataset, std::span<const double>(&ratio, 1)).front();
}

std::vector<ExperimentReport> run_sweep(const ExperimentConfig& config, const Dataset& dataset,
                                        std::span<const double> ratios) {
  validate(config);
  for (double r : ratios) {
    ExperimentConfig probe = config;
    probe.corruption.ratio = r;
    validate(probe);
  }
  validate(dataset);
  if (dataset.empty()) throw InvalidInput("experiment needs a non-empty dataset");
  const auto classes = class_names(dataset);
  for (const auto& action : dataset.actions) {
    if (!action.label) throw InvalidInput("action '" + action.id + "' has no label");
  }
  const auto folds = make_folds(dataset, config.split);
  const double replacement_std = feature_std(dataset);
  const bool per_ratio = training_depends_on_ratio(config);

  std::vector<std::unique_ptr<FoldModels>> cache(folds.size());
  std::vector<ExperimentReport> reports;
  for (double ratio : ratios) {
    const auto corruption = task_corruption(config, ratio);
    ExperimentReport report;
    report.task = to_string(config.task);
    report.ratio = ratio;
    report.classes = classes;
    report.confusion = ConfusionMatrix(classes.size());
    if (config.augmented && config.baseline) report.baseline_confusion = ConfusionMatrix(classes.size());
    RuntimeStats runtime;

    AugmentedDataset pooled_test;
    std::vector<Configuration> pooled_maps;

    for (std::size_t f = 0; f < folds.size(); ++f) {
      const auto& test_idx = folds[f];
      std::vector<std::size_t> train_idx;
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!std::binary_search(test_idx.begin(), test_idx.end(), i)) train_idx.push_back(i);
      }
      if (train_idx.empty()) throw InvalidInput("a fold has no training actions");

      if (per_ratio || !cache[f]) {
        cache[f] = build_fold(config, dataset, classes, train_idx, corruption, f, replacement_std);
        runtime.augment_seconds += cache[f]->augment_seconds;
        runtime.train_seconds += cache[f]->train_seconds;
      }
      const FoldModels& models = *cache[f];
      for (auto* params : {&cache[f]->plain, &cache[f]->augmented}) {
        if (*params) (*params)->class_names = classes;
      }

      CorruptionSpec spec = corruption.test;
      spec.seed = derive_seed(config.corruption.seed, f, 2);
      const Dataset test = inject_corruption(subset(dataset, test_idx), spec, replacement_std);
      report.test_count += test.size();

      auto start = Clock::now();
      std::optional<AugmentedDataset> test_aug;
      if (config.augmented) test_aug = augment_all(*models.index, test, corruption.augmentation, false);
      runtime.augment_seconds += seconds_since(start);

      start = Clock::now();
      for (std::size_t i = 0; i < test.size(); ++i) {
        const std::size_t truth = class_index(classes, *test.actions[i].label);
        if (config.augmented) {
          const auto result = class_posterior(make_chain(test_aug->actions[i]), *models.augmented, true);
          report.confusion.add(truth, result.predicted);
          pooled_maps.push_back(*result.map);
          if (models.plain) report.baseline_confusion->add(truth, predict(make_chain(test.actions[i]), *models.plain));
        } else {
          report.confusion.add(truth, predict(make_chain(test.actions[i]), *models.plain));
        }
      }
      runtime.predict_seconds += seconds_since(start);
      if (test_aug) {
        for (auto& action : test_aug->actions) pooled_test.actions.push_back(std::move(action));
      }
      report.epsilons.push_back(config.augmented ? models.epsilon : 0.0);
    }

    report.accuracy = report.confusion.accuracy();
    if (report.baseline_confusion) report.baseline_accuracy = report.baseline_confusion->accuracy();
    if (config.augmented) {
      const auto quality = metric_alternative_quality(pooled_test);
      if (quality.segments > 0) {
        report.alternative_accurate_fraction = quality.mean_accurate_fraction;
        report.alternative_at_least_one = quality.at_least_one_accurate;
      }
      const auto replacement = metric_correct_replacement(pooled_maps, pooled_test);
      report.replaced_outliers = replacement.replaced_outliers;
      report.correct_replacement = replacement.probability();
    }
    report.runtime = runtime;
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<double> parse_ratios(const std::string& text) {
  const auto round12 = [](double v) { return std::round(v * 1e12) / 1e12; };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_double(item));
    if (parts.size() != 3) throw InvalidInput("ratio range must be 'start:stop:step'");
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0)) throw InvalidInput("ratio step must be > 0");
    if (stop < start) throw InvalidInput("ratio range stop is below start");
    for (std::size_t k = 0;; ++k) {
      const double v = round12(start + static_cast<double>(k) * step);
      if (v > stop + 1e-9) break;
      out.push_back(v);
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(round12(parse_double(item)));
  }
  if (out.empty()) throw InvalidInput("no ratios given");
  for (double r : out) check_ratio(r);
  return out;
}

}  // namespace ahcrf
