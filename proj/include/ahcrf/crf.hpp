#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ahcrf/augmentation.hpp"
#include "ahcrf/dataset.hpp"

namespace ahcrf {

/// Parameters of the (augmented) chain HCRF, stored in one contiguous
/// vector so the optimizer can work on it directly:
///   [ pose templates S x d | class-pose table C x S | class-transition table C x S x S ]
/// epsilon (bias for keeping the original observation) and sigma (prior
/// scale) are fixed hyperparameters and are not part of values().
class ModelParameters {
 public:
  ModelParameters() = default;
  ModelParameters(std::size_t classes, std::size_t poses, std::size_t dim);

  std::size_t num_classes() const noexcept { return classes_; }
  std::size_t num_poses() const noexcept { return poses_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<double> pose(std::size_t p) noexcept { return {values_.data() + p * dim_, dim_}; }
  std::span<const double> pose(std::size_t p) const noexcept { return {values_.data() + p * dim_, dim_}; }
  std::span<const double> poses() const noexcept { return {values_.data(), poses_ * dim_}; }

  double& class_pose(std::size_t y, std::size_t p) noexcept { return values_[class_pose_offset() + y * poses_ + p]; }
  double class_pose(std::size_t y, std::size_t p) const noexcept {
    return values_[class_pose_offset() + y * poses_ + p];
  }
  double& transition(std::size_t y, std::size_t p, std::size_t q) noexcept {
    return values_[transition_offset() + (y * poses_ + p) * poses_ + q];
  }
  double transition(std::size_t y, std::size_t p, std::size_t q) const noexcept {
    return values_[transition_offset() + (y * poses_ + p) * poses_ + q];
  }

  std::size_t class_pose_offset() const noexcept { return poses_ * dim_; }
  std::size_t transition_offset() const noexcept { return class_pose_offset() + classes_ * poses_; }

  /// Sum of squares over values(); epsilon is excluded.
  double squared_norm() const noexcept;

  double epsilon = 0.0;
  double sigma = 1.0;
  std::vector<std::string> class_names;

  bool operator==(const ModelParameters&) const = default;

 private:
  std::size_t classes_ = 0;
  std::size_t poses_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

/// Hidden state [observation, pose]: `observation` 0 picks the original
/// segment, j >= 1 picks alternative j. Flattened as observation * S + pose.
struct CompositeState {
  std::size_t observation = 0;
  std::size_t pose = 0;

  bool operator==(const CompositeState&) const = default;
};

struct Configuration {
  std::vector<CompositeState> states;
  double potential = 0.0;
};

struct PosteriorResult {
  std::vector<double> log_posterior;  // per class, log-normalized
  std::size_t predicted = 0;          // argmax, ties to the lowest class
  std::optional<Configuration> map;   // MAP configuration under `predicted`
};

/// Non-owning view of one action as a chain of observation sets. The
/// referenced action must outlive the chain.
struct ChainSegment {
  std::vector<std::span<const double>> observations;  // [0] is the original
  bool original_allowed = true;

  std::size_t states(std::size_t poses) const noexcept { return observations.size() * poses; }
};

struct ObservationChain {
  std::vector<ChainSegment> segments;
  // Augmented chains add epsilon to every state that keeps the original.
  bool biased = false;

  std::size_t length() const noexcept { return segments.size(); }
};

ObservationChain make_chain(const ActionSequence& action);
ObservationChain make_chain(const AugmentedAction& action);

/// <x, lambda_p>
double unary_plain(std::span<const double> observation, std::size_t pose, const ModelParameters& params);

/// <x_t, lambda_p> + epsilon for the original, <x~_t^j, lambda_p> for
/// alternative j. Uses the block structure of the composite template.
double unary_composite(const AugmentedSegment& segment, CompositeState state, const ModelParameters& params);

/// Same value computed the long way: the (1+n)d concatenated observation
/// against a zero-padded template holding lambda_p in block j, plus the
/// bias. For cross-checking only.
double unary_composite_materialized(const AugmentedSegment& segment, CompositeState state,
                                    const ModelParameters& params);

/// Psi(y, h, x): unaries + class-pose terms + transitions between
/// consecutive poses. Transitions never depend on the observation choice.
double potential(std::size_t y, std::span<const CompositeState> configuration, const ObservationChain& chain,
                 const ModelParameters& params);

/// log sum_{y,h} exp Psi(y, h, x) by forward recursion in log-space.
double log_partition(const ObservationChain& chain, const ModelParameters& params);

PosteriorResult class_posterior(const ObservationChain& chain, const ModelParameters& params,
                                bool decode = false);

std::size_t predict(const ObservationChain& chain, const ModelParameters& params);

struct ChainMarginals {
  double log_partition = 0.0;  // log sum_h exp Psi(y, h, x) for the given y
  std::vector<std::size_t> states;             // flat domain size per t
  std::vector<std::vector<double>> unary;      // [t][flat]
  std::vector<std::vector<double>> pairwise;   // [t][flat_t * states[t+1] + flat_{t+1}]
};

/// Exact P(h_t | y, x) and P(h_t, h_{t+1} | y, x).
ChainMarginals posterior_marginals(const ObservationChain& chain, std::size_t y, const ModelParameters& params);

/// Highest-potential configuration under class y. Among equal potentials
/// the lexicographically smallest sequence of flat states wins.
Configuration map_decode(const ObservationChain& chain, std::size_t y, const ModelParameters& params);

}  // namespace ahcrf
