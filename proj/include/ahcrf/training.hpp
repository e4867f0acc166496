#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ahcrf/augmentation.hpp"
#include "ahcrf/crf.hpp"
#include "ahcrf/dataset.hpp"
#include "ahcrf/lbfgs.hpp"

namespace ahcrf {

struct TrainConfig {
  double sigma = 1.0;  // +inf disables the prior
  double epsilon = 0.0;
  std::size_t num_poses = 4;
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-5;
  std::uint64_t seed = 1;
  double init_scale = 0.1;
  // Per-action terms are split into this many contiguous chunks and
  // reduced in chunk order, so results depend on the worker count but not
  // on scheduling.
  std::size_t workers = 1;
};

struct TrainReport {
  double final_objective = 0.0;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  LbfgsStatus status = LbfgsStatus::kMaxIterations;
  std::vector<LbfgsIteration> trace;  // objective values (maximization)
};

/// Labeled chains plus the class table. Chains reference the source
/// dataset, which must outlive this object.
class TrainingSet {
 public:
  TrainingSet() = default;
  TrainingSet(const Dataset& dataset, std::vector<std::string> classes);
  TrainingSet(const AugmentedDataset& dataset, std::vector<std::string> classes);

  std::size_t size() const noexcept { return chains_.size(); }
  const ObservationChain& chain(std::size_t i) const { return chains_[i]; }
  std::size_t label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::size_t dim() const noexcept { return dim_; }

  void add(ObservationChain chain, std::size_t label);

 private:
  std::vector<ObservationChain> chains_;
  std::vector<std::size_t> labels_;
  std::vector<std::string> classes_;
  std::size_t dim_ = 0;
};

/// sum_i log P(y_i | x_i)
double log_likelihood(const TrainingSet& data, const ModelParameters& params, std::size_t workers = 1);

/// sum_i log P(y_i | x_i) - ||theta||^2 / (2 sigma^2)
double objective(const TrainingSet& data, const ModelParameters& params, double sigma, std::size_t workers = 1);

/// Objective value; writes d objective / d values() into `grad`.
double objective_and_gradient(const TrainingSet& data, const ModelParameters& params, double sigma,
                              std::span<double> grad, std::size_t workers = 1);

std::vector<double> gradient(const TrainingSet& data, const ModelParameters& params, double sigma,
                             std::size_t workers = 1);

/// Uniform [-init_scale, init_scale] draws from `seed`.
ModelParameters initial_parameters(std::size_t classes, std::size_t dim, const TrainConfig& config);

struct TrainResult {
  ModelParameters params;
  TrainReport report;
};

/// Maximizes the regularized conditional log-likelihood from the seeded
/// initialization.
TrainResult train(const TrainingSet& data, const TrainConfig& config);

/// Same, from explicit starting parameters (sizes must match the data).
TrainResult train_from(const TrainingSet& data, ModelParameters start, const TrainConfig& config);

}  // namespace ahcrf
