#include <cmath>
#include <limits>

#include "ahcrf/crf.hpp"
#include "ahcrf/error.hpp"
#include "ahcrf/kernels.hpp"
#include "crf/engine.hpp"

namespace ahcrf {

ObservationChain make_chain(const ActionSequence& action) {
  ObservationChain chain;
  for (const auto& segment : action.segments) chain.segments.push_back({{segment}, true});
  return chain;
}

ObservationChain make_chain(const AugmentedAction& action) {
  ObservationChain chain;
  chain.biased = true;
  for (const auto& segment : action.segments) {
    ChainSegment view;
    view.original_allowed = segment.original_allowed;
    view.observations.reserve(1 + segment.alternatives.size());
    view.observations.emplace_back(segment.original);
    for (const auto& alternative : segment.alternatives) view.observations.emplace_back(alternative.vector);
    chain.segments.push_back(std::move(view));
  }
  return chain;
}

double unary_plain(std::span<const double> observation, std::size_t pose, const ModelParameters& params) {
  if (observation.size() != params.dim()) throw InvalidInput("unary: feature dimension does not match the model");
  if (pose >= params.num_poses()) throw InvalidInput("unary: pose out of range");
  return kernels::dot(observation, params.pose(pose));
}

double unary_composite(const AugmentedSegment& segment, CompositeState state, const ModelParameters& params) {
  if (state.observation > segment.alternatives.size()) throw InvalidInput("unary: observation index out of range");
  if (state.observation == 0) {
    if (!segment.original_allowed) throw InvalidInput("unary: original observation is not in the domain");
    return unary_plain(segment.original, state.pose, params) + params.epsilon;
  }
  return unary_plain(segment.alternatives[state.observation - 1].vector, state.pose, params);
}

double unary_composite_materialized(const AugmentedSegment& segment, CompositeState state,
                                    const ModelParameters& params) {
  const std::size_t d = params.dim();
  const std::size_t blocks = 1 + segment.alternatives.size();
  if (state.observation >= blocks) throw InvalidInput("unary: observation index out of range");
  if (state.pose >= params.num_poses()) throw InvalidInput("unary: pose out of range");
  if (state.observation == 0 && !segment.original_allowed) {
    throw InvalidInput("unary: original observation is not in the domain");
  }

  std::vector<double> features;
  features.reserve(blocks * d);
  features.insert(features.end(), segment.original.begin(), segment.original.end());
  for (const auto& alternative : segment.alternatives) {
    if (alternative.vector.size() != d) throw InvalidInput("unary: alternative dimension does not match the model");
    features.insert(features.end(), alternative.vector.begin(), alternative.vector.end());
  }
  if (features.size() != blocks * d) throw InvalidInput("unary: feature dimension does not match the model");

  std::vector<double> weights(blocks * d, 0.0);
  const auto lambda = params.pose(state.pose);
  for (std::size_t k = 0; k < d; ++k) weights[state.observation * d + k] = lambda[k];

  double value = 0.0;
  for (std::size_t k = 0; k < features.size(); ++k) value += features[k] * weights[k];
  if (state.observation == 0) value += params.epsilon;
  return value;
}

namespace engine {

void check_chain(const ObservationChain& chain, const ModelParameters& params) {
  if (chain.segments.empty()) throw InvalidInput("chain has no segments");
  for (const auto& segment : chain.segments) {
    if (segment.observations.empty()) throw InvalidInput("chain segment has no observations");
    if (!segment.original_allowed && segment.observations.size() == 1) {
      throw InvalidInput("chain segment excludes its original and has no alternatives");
    }
    for (const auto& observation : segment.observations) {
      if (observation.size() != params.dim()) throw InvalidInput("feature dimension does not match the model");
    }
  }
}

UnaryTable compute_unaries(const ObservationChain& chain, const ModelParameters& params) {
  check_chain(chain, params);
  const std::size_t poses = params.num_poses();
  UnaryTable table;
  table.poses = poses;
  std::size_t total = 0;
  for (const auto& segment : chain.segments) {
    table.offset.push_back(total);
    table.states.push_back(segment.states(poses));
    total += segment.states(poses);
  }
  table.values.resize(total);
  const auto& kernel = kernels::current();
  for (std::size_t t = 0; t < chain.length(); ++t) {
    const auto& segment = chain.segments[t];
    double* out = table.values.data() + table.offset[t];
    for (std::size_t o = 0; o < segment.observations.size(); ++o) {
      kernel.gemv(params.poses().data(), poses, params.dim(), segment.observations[o].data(), out + o * poses);
    }
    if (!segment.original_allowed) {
      for (std::size_t p = 0; p < poses; ++p) out[p] = -std::numeric_limits<double>::infinity();
    } else if (chain.biased) {
      for (std::size_t p = 0; p < poses; ++p) out[p] += params.epsilon;
    }
  }
  return table;
}

}  // namespace engine
}  // namespace ahcrf
