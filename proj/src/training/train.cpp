#include <algorithm>
#include <random>

#include "ahcrf/error.hpp"
#include "ahcrf/training.hpp"

namespace ahcrf {

ModelParameters initial_parameters(std::size_t classes, std::size_t dim, const TrainConfig& config) {
  if (!(config.init_scale >= 0.0)) throw InvalidInput("init_scale must be >= 0");
  if (!(config.epsilon >= 0.0)) throw InvalidInput("epsilon must be >= 0");
  ModelParameters params(classes, config.num_poses, dim);
  std::mt19937_64 rng(config.seed);
  for (double& v : params.values()) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = config.init_scale * (2.0 * unit - 1.0);
  }
  params.epsilon = config.epsilon;
  params.sigma = config.sigma;
  return params;
}

TrainResult train(const TrainingSet& data, const TrainConfig& config) {
  if (data.size() == 0) throw InvalidInput("train: empty training set");
  auto start = initial_parameters(data.classes().size(), data.dim(), config);
  start.class_names = data.classes();
  return train_from(data, std::move(start), config);
}

TrainResult train_from(const TrainingSet& data, ModelParameters start, const TrainConfig& config) {
  if (data.size() == 0) throw InvalidInput("train: empty training set");
  if (!(config.sigma > 0.0)) throw InvalidInput("train: sigma must be > 0");
  start.epsilon = config.epsilon;
  start.sigma = config.sigma;
  if (start.class_names.empty()) start.class_names = data.classes();

  ModelParameters work = start;
  const DifferentiableFunction negated = [&](std::span<const double> x, std::span<double> grad) {
    std::copy(x.begin(), x.end(), work.values().begin());
    const double value = objective_and_gradient(data, work, config.sigma, grad, config.workers);
    for (double& g : grad) g = -g;
    return -value;
  };

  LbfgsOptions options;
  options.max_iterations = config.max_iterations;
  options.gradient_tolerance = config.gradient_tolerance;
  const std::vector<double> x0(start.values().begin(), start.values().end());
  const auto solved = minimize_lbfgs(negated, x0, options);

  TrainResult result{std::move(start), {}};
  std::copy(solved.x.begin(), solved.x.end(), result.params.values().begin());
  result.report.final_objective = -solved.value;
  result.report.iterations = solved.iterations;
  result.report.gradient_norm = solved.gradient_norm;
  result.report.status = solved.status;
  for (const auto& entry : solved.trace) result.report.trace.push_back({entry.iteration, -entry.value, entry.gradient_norm});
  return result;
}

}  // namespace ahcrf
