#include <algorithm>
#include <cmath>
#include <thread>

#include "ahcrf/error.hpp"
#include "ahcrf/kernels.hpp"
#include "ahcrf/training.hpp"
#include "crf/engine.hpp"

namespace ahcrf {
namespace {

double prior_weight(double sigma) {
  if (!(sigma > 0.0)) throw InvalidInput("sigma must be > 0");
  return std::isinf(sigma) ? 0.0 : 1.0 / (sigma * sigma);
}

void check_model(const TrainingSet& data, const ModelParameters& params) {
  if (params.num_classes() != data.classes().size()) {
    throw InvalidInput("model class count differs from the training set's class table");
  }
  if (data.size() > 0 && params.dim() != data.dim()) throw InvalidInput("model dimension differs from the data");
}

// Contribution of actions [begin, end): log-likelihood and its gradient.
double accumulate(const TrainingSet& data, const ModelParameters& params, std::size_t begin, std::size_t end,
                  std::span<double> grad) {
  const std::size_t classes = params.num_classes();
  const std::size_t poses = params.num_poses();
  const std::size_t t2 = params.class_pose_offset();
  const std::size_t t3 = params.transition_offset();
  double total = 0.0;
  std::vector<engine::Messages> messages(classes);
  std::vector<double> log_z(classes);
  std::vector<double> weight(classes);
  std::vector<double> coefficient;

  for (std::size_t i = begin; i < end; ++i) {
    const auto& chain = data.chain(i);
    const std::size_t label = data.label(i);
    const auto unaries = engine::compute_unaries(chain, params);
    for (std::size_t y = 0; y < classes; ++y) {
      messages[y] = engine::forward_backward(unaries, y, params);
      log_z[y] = messages[y].log_z;
    }
    const double all = kernels::log_sum_exp(log_z);
    total += log_z[label] - all;
    for (std::size_t y = 0; y < classes; ++y) weight[y] = (y == label ? 1.0 : 0.0) - std::exp(log_z[y] - all);

    // Observed-minus-expected state occupancy, pooled over classes, drives
    // the pose templates; class tables get their own class's share.
    coefficient.assign(unaries.values.size(), 0.0);
    for (std::size_t y = 0; y < classes; ++y) {
      if (weight[y] == 0.0) continue;
      const auto& m = messages[y];
      const std::size_t length = unaries.length();
      for (std::size_t t = 0; t < length; ++t) {
        const std::size_t offset = unaries.offset[t];
        for (std::size_t s = 0; s < unaries.states[t]; ++s) {
          const std::size_t p = s % poses;
          const double marginal = std::exp(m.alpha[offset + s] + m.beta[t * poses + p] - m.log_z);
          if (marginal == 0.0) continue;
          coefficient[offset + s] += weight[y] * marginal;
          grad[t2 + y * poses + p] += weight[y] * marginal;
        }
        if (t + 1 == length) continue;
        for (std::size_t p = 0; p < poses; ++p) {
          const double head = m.pose_alpha[t * poses + p] - m.log_z;
          for (std::size_t q = 0; q < poses; ++q) {
            const double pair = std::exp(head + params.transition(y, p, q) + m.node_pose[(t + 1) * poses + q] +
                                         m.beta[(t + 1) * poses + q]);
            grad[t3 + (y * poses + p) * poses + q] += weight[y] * pair;
          }
        }
      }
    }
    for (std::size_t t = 0; t < chain.length(); ++t) {
      const auto& segment = chain.segments[t];
      const double* coef = coefficient.data() + unaries.offset[t];
      for (std::size_t o = 0; o < segment.observations.size(); ++o) {
        for (std::size_t p = 0; p < poses; ++p) {
          const double c = coef[o * poses + p];
          if (c != 0.0) kernels::axpy(c, segment.observations[o], grad.subspan(p * params.dim(), params.dim()));
        }
      }
    }
  }
  return total;
}

double likelihood_only(const TrainingSet& data, const ModelParameters& params, std::size_t begin,
                       std::size_t end) {
  std::vector<double> log_z(params.num_classes());
  std::vector<double> scratch;
  double total = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const auto unaries = engine::compute_unaries(data.chain(i), params);
    for (std::size_t y = 0; y < log_z.size(); ++y) log_z[y] = engine::class_log_score(unaries, y, params, scratch);
    total += log_z[data.label(i)] - kernels::log_sum_exp(log_z);
  }
  return total;
}

// Runs `work(begin, end, chunk)` over contiguous chunks, on threads when
// workers > 1. Callers reduce per-chunk results in chunk order.
template <typename Work>
void for_chunks(std::size_t n, std::size_t workers, Work&& work) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    work(0, n, 0);
    return;
  }
  std::vector<std::thread> threads;
  for (std::size_t c = 0; c < workers; ++c) {
    threads.emplace_back([&, c] { work(c * n / workers, (c + 1) * n / workers, c); });
  }
  for (auto& thread : threads) thread.join();
}

}  // namespace

TrainingSet::TrainingSet(const Dataset& dataset, std::vector<std::string> classes) : classes_(std::move(classes)) {
  for (const auto& action : dataset.actions) {
    if (!action.label) throw InvalidInput("training action '" + action.id + "' has no label");
    add(make_chain(action), class_index(classes_, *action.label));
  }
}

TrainingSet::TrainingSet(const AugmentedDataset& dataset, std::vector<std::string> classes)
    : classes_(std::move(classes)) {
  for (const auto& action : dataset.actions) {
    if (!action.label) throw InvalidInput("training action '" + action.id + "' has no label");
    add(make_chain(action), class_index(classes_, *action.label));
  }
}

void TrainingSet::add(ObservationChain chain, std::size_t label) {
  if (label >= classes_.size()) throw InvalidInput("training label out of range");
  if (chain.segments.empty() || chain.segments.front().observations.empty()) {
    throw InvalidInput("training chain is empty");
  }
  const std::size_t dim = chain.segments.front().observations.front().size();
  if (chains_.empty()) {
    dim_ = dim;
  } else if (dim != dim_) {
    throw InvalidInput("training chains differ in feature dimension");
  }
  chains_.push_back(std::move(chain));
  labels_.push_back(label);
}

double log_likelihood(const TrainingSet& data, const ModelParameters& params, std::size_t workers) {
  check_model(data, params);
  std::vector<double> partial(std::max<std::size_t>(1, workers), 0.0);
  for_chunks(data.size(), workers, [&](std::size_t b, std::size_t e, std::size_t c) {
    partial[c] = likelihood_only(data, params, b, e);
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

double objective(const TrainingSet& data, const ModelParameters& params, double sigma, std::size_t workers) {
  const double w = prior_weight(sigma);
  const double penalty = w == 0.0 ? 0.0 : 0.5 * w * params.squared_norm();
  return log_likelihood(data, params, workers) - penalty;
}

double objective_and_gradient(const TrainingSet& data, const ModelParameters& params, double sigma,
                              std::span<double> grad, std::size_t workers) {
  check_model(data, params);
  if (grad.size() != params.values().size()) throw InvalidInput("gradient buffer has the wrong size");
  const double w = prior_weight(sigma);

  const std::size_t chunks = std::max<std::size_t>(1, std::min(workers, data.size()));
  std::vector<std::vector<double>> partial_grad(chunks, std::vector<double>(grad.size(), 0.0));
  std::vector<double> partial_value(chunks, 0.0);
  for_chunks(data.size(), workers, [&](std::size_t b, std::size_t e, std::size_t c) {
    partial_value[c] = accumulate(data, params, b, e, partial_grad[c]);
  });

  double value = 0.0;
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    value += partial_value[c];
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += partial_grad[c][k];
  }
  if (w != 0.0) {
    const auto theta = params.values();
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] -= w * theta[k];
    value -= 0.5 * w * params.squared_norm();
  }
  return value;
}

std::vector<double> gradient(const TrainingSet& data, const ModelParameters& params, double sigma,
                             std::size_t workers) {
  std::vector<double> grad(params.values().size());
  objective_and_gradient(data, params, sigma, grad, workers);
  return grad;
}

}  // namespace ahcrf
