#include <algorithm>
#include <cmath>
#include <limits>

#include "ahcrf/crf.hpp"
#include "ahcrf/error.hpp"
#include "ahcrf/kernels.hpp"
#include "crf/engine.hpp"

namespace ahcrf {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log-sum-exp over v[k * stride] for k < count
double lse_strided(const double* v, std::size_t count, std::size_t stride) {
  double top = kNegInf;
  for (std::size_t k = 0; k < count; ++k) top = std::max(top, v[k * stride]);
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) sum += std::exp(v[k * stride] - top);
  return top + std::log(sum);
}

double max_strided(const double* v, std::size_t count, std::size_t stride) {
  double top = kNegInf;
  for (std::size_t k = 0; k < count; ++k) top = std::max(top, v[k * stride]);
  return top;
}

}  // namespace

namespace engine {

Messages forward_backward(const UnaryTable& unaries, std::size_t y, const ModelParameters& params) {
  const std::size_t length = unaries.length();
  const std::size_t poses = unaries.poses;
  Messages m;
  m.alpha.resize(unaries.values.size());
  m.pose_alpha.resize(length * poses);
  m.node_pose.resize(length * poses);
  m.beta.assign(length * poses, 0.0);

  std::vector<double> incoming(poses, 0.0);
  std::vector<double> buffer(poses);
  for (std::size_t t = 0; t < length; ++t) {
    const std::size_t observations = unaries.states[t] / poses;
    const double* unary = unaries.at(t);
    double* alpha = m.alpha.data() + unaries.offset[t];
    for (std::size_t p = 0; p < poses; ++p) {
      const double bias = params.class_pose(y, p) + incoming[p];
      for (std::size_t o = 0; o < observations; ++o) alpha[o * poses + p] = unary[o * poses + p] + bias;
      m.node_pose[t * poses + p] = lse_strided(unary + p, observations, poses) + params.class_pose(y, p);
      m.pose_alpha[t * poses + p] = m.node_pose[t * poses + p] + incoming[p];
    }
    if (t + 1 == length) break;
    for (std::size_t q = 0; q < poses; ++q) {
      for (std::size_t p = 0; p < poses; ++p) buffer[p] = m.pose_alpha[t * poses + p] + params.transition(y, p, q);
      incoming[q] = kernels::log_sum_exp(buffer);
    }
  }
  m.log_z = kernels::log_sum_exp(std::span<const double>(m.pose_alpha).subspan((length - 1) * poses, poses));

  for (std::size_t t = length - 1; t-- > 0;) {
    for (std::size_t p = 0; p < poses; ++p) {
      for (std::size_t q = 0; q < poses; ++q) {
        buffer[q] = params.transition(y, p, q) + m.node_pose[(t + 1) * poses + q] + m.beta[(t + 1) * poses + q];
      }
      m.beta[t * poses + p] = kernels::log_sum_exp(buffer);
    }
  }
  return m;
}

double class_log_score(const UnaryTable& unaries, std::size_t y, const ModelParameters& params,
                       std::vector<double>& scratch) {
  const std::size_t length = unaries.length();
  const std::size_t poses = unaries.poses;
  scratch.assign(3 * poses, 0.0);
  double* incoming = scratch.data();
  double* pose_alpha = incoming + poses;
  double* buffer = pose_alpha + poses;
  for (std::size_t t = 0; t < length; ++t) {
    const std::size_t observations = unaries.states[t] / poses;
    const double* unary = unaries.at(t);
    for (std::size_t p = 0; p < poses; ++p) {
      pose_alpha[p] = lse_strided(unary + p, observations, poses) + params.class_pose(y, p) + incoming[p];
    }
    if (t + 1 == length) break;
    for (std::size_t q = 0; q < poses; ++q) {
      for (std::size_t p = 0; p < poses; ++p) buffer[p] = pose_alpha[p] + params.transition(y, p, q);
      incoming[q] = kernels::log_sum_exp({buffer, poses});
    }
  }
  return kernels::log_sum_exp({pose_alpha, poses});
}

}  // namespace engine

double potential(std::size_t y, std::span<const CompositeState> configuration, const ObservationChain& chain,
                 const ModelParameters& params) {
  engine::check_chain(chain, params);
  if (y >= params.num_classes()) throw InvalidInput("potential: class out of range");
  if (configuration.size() != chain.length()) throw InvalidInput("potential: configuration length differs from T");
  double total = 0.0;
  for (std::size_t t = 0; t < chain.length(); ++t) {
    const auto& segment = chain.segments[t];
    const CompositeState state = configuration[t];
    if (state.observation >= segment.observations.size() || state.pose >= params.num_poses()) {
      throw InvalidInput("potential: state outside the segment's domain");
    }
    if (state.observation == 0 && !segment.original_allowed) {
      throw InvalidInput("potential: original observation is not in the domain");
    }
    total += unary_plain(segment.observations[state.observation], state.pose, params);
    if (state.observation == 0 && chain.biased) total += params.epsilon;
    total += params.class_pose(y, state.pose);
    if (t + 1 < chain.length()) total += params.transition(y, state.pose, configuration[t + 1].pose);
  }
  return total;
}

double log_partition(const ObservationChain& chain, const ModelParameters& params) {
  const auto unaries = engine::compute_unaries(chain, params);
  std::vector<double> scores(params.num_classes());
  std::vector<double> scratch;
  for (std::size_t y = 0; y < scores.size(); ++y) scores[y] = engine::class_log_score(unaries, y, params, scratch);
  return kernels::log_sum_exp(scores);
}

PosteriorResult class_posterior(const ObservationChain& chain, const ModelParameters& params, bool decode) {
  const auto unaries = engine::compute_unaries(chain, params);
  PosteriorResult result;
  result.log_posterior.resize(params.num_classes());
  std::vector<double> scratch;
  for (std::size_t y = 0; y < result.log_posterior.size(); ++y) {
    result.log_posterior[y] = engine::class_log_score(unaries, y, params, scratch);
  }
  const double log_z = kernels::log_sum_exp(result.log_posterior);
  for (double& v : result.log_posterior) v -= log_z;
  result.predicted = static_cast<std::size_t>(
      std::max_element(result.log_posterior.begin(), result.log_posterior.end()) - result.log_posterior.begin());
  if (decode) result.map = map_decode(chain, result.predicted, params);
  return result;
}

std::size_t predict(const ObservationChain& chain, const ModelParameters& params) {
  return class_posterior(chain, params).predicted;
}

ChainMarginals posterior_marginals(const ObservationChain& chain, std::size_t y, const ModelParameters& params) {
  if (y >= params.num_classes()) throw InvalidInput("posterior_marginals: class out of range");
  const auto unaries = engine::compute_unaries(chain, params);
  const auto m = engine::forward_backward(unaries, y, params);
  const std::size_t poses = params.num_poses();
  const std::size_t length = chain.length();

  ChainMarginals out;
  out.log_partition = m.log_z;
  out.states = unaries.states;
  out.unary.resize(length);
  out.pairwise.resize(length - 1);
  for (std::size_t t = 0; t < length; ++t) {
    const double* alpha = m.alpha.data() + unaries.offset[t];
    auto& marginal = out.unary[t];
    marginal.resize(unaries.states[t]);
    for (std::size_t s = 0; s < marginal.size(); ++s) {
      marginal[s] = std::exp(alpha[s] + m.beta[t * poses + s % poses] - m.log_z);
    }
    if (t + 1 == length) break;
    const std::size_t next_states = unaries.states[t + 1];
    const double* next_unary = unaries.at(t + 1);
    auto& pair = out.pairwise[t];
    pair.resize(marginal.size() * next_states);
    for (std::size_t s = 0; s < marginal.size(); ++s) {
      const std::size_t p = s % poses;
      for (std::size_t s2 = 0; s2 < next_states; ++s2) {
        const std::size_t q = s2 % poses;
        pair[s * next_states + s2] = std::exp(alpha[s] + params.transition(y, p, q) + next_unary[s2] +
                                              params.class_pose(y, q) + m.beta[(t + 1) * poses + q] - m.log_z);
      }
    }
  }
  return out;
}

Configuration map_decode(const ObservationChain& chain, std::size_t y, const ModelParameters& params) {
  if (y >= params.num_classes()) throw InvalidInput("map_decode: class out of range");
  const auto unaries = engine::compute_unaries(chain, params);
  const std::size_t poses = params.num_poses();
  const std::size_t length = chain.length();

  // value[t][s]: best score of segments t..T-1 with state s at t. Decoding
  // runs forward so the first maximizer at each step gives the
  // lexicographically smallest optimal configuration.
  std::vector<std::vector<double>> value(length);
  std::vector<double> best_tail(poses, 0.0);  // max over states at t+1 for pose q
  for (std::size_t t = length; t-- > 0;) {
    const double* unary = unaries.at(t);
    auto& v = value[t];
    v.resize(unaries.states[t]);
    std::vector<double> suffix(poses, 0.0);
    if (t + 1 < length) {
      for (std::size_t p = 0; p < poses; ++p) {
        double top = kNegInf;
        for (std::size_t q = 0; q < poses; ++q) top = std::max(top, params.transition(y, p, q) + best_tail[q]);
        suffix[p] = top;
      }
    }
    for (std::size_t s = 0; s < v.size(); ++s) v[s] = unary[s] + params.class_pose(y, s % poses) + suffix[s % poses];
    const std::size_t observations = v.size() / poses;
    for (std::size_t q = 0; q < poses; ++q) best_tail[q] = max_strided(v.data() + q, observations, poses);
  }

  Configuration config;
  config.states.reserve(length);
  std::size_t previous_pose = 0;
  for (std::size_t t = 0; t < length; ++t) {
    const auto& v = value[t];
    std::size_t best = 0;
    double best_score = kNegInf;
    for (std::size_t s = 0; s < v.size(); ++s) {
      const double score = v[s] + (t > 0 ? params.transition(y, previous_pose, s % poses) : 0.0);
      if (score > best_score) {
        best_score = score;
        best = s;
      }
    }
    config.states.push_back({best / poses, best % poses});
    previous_pose = best % poses;
  }
  config.potential = potential(y, config.states, chain, params);
  return config;
}

}  // namespace ahcrf
