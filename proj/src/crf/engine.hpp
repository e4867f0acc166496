#pragma once

// Shared by inference and training: class-independent unary scores and
// per-class log-space forward/backward messages over the flattened chain.
//
// Transitions only see the pose component, so messages between t and t+1
// are reduced over the observation component first. That keeps each step
// at O(|H_t| + S^2) per class instead of O(|H_t| |H_{t+1}|).

#include <cstddef>
#include <vector>

#include "ahcrf/crf.hpp"

namespace ahcrf::engine {

struct UnaryTable {
  std::size_t poses = 0;
  std::vector<std::size_t> offset;  // start of segment t in `values`
  std::vector<std::size_t> states;  // flat domain size of segment t
  std::vector<double> values;       // unary score (with bias), -inf if disallowed

  std::size_t length() const noexcept { return offset.size(); }
  const double* at(std::size_t t) const noexcept { return values.data() + offset[t]; }
};

/// Throws InvalidInput when the chain is empty, a dimension disagrees with
/// the parameters, or a segment has an empty observation domain.
void check_chain(const ObservationChain& chain, const ModelParameters& params);

UnaryTable compute_unaries(const ObservationChain& chain, const ModelParameters& params);

struct Messages {
  std::vector<double> alpha;       // forward scores, unary layout
  std::vector<double> pose_alpha;  // T x S, alpha reduced over observations
  std::vector<double> node_pose;   // T x S, node scores reduced over observations
  std::vector<double> beta;        // T x S, suffix score after t given pose p_t
  double log_z = 0.0;              // log sum_h exp Psi(y, h, x)
};

Messages forward_backward(const UnaryTable& unaries, std::size_t y, const ModelParameters& params);

/// Forward pass only; cheaper when marginals are not needed.
double class_log_score(const UnaryTable& unaries, std::size_t y, const ModelParameters& params,
                       std::vector<double>& scratch);

}  // namespace ahcrf::engine
