#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ahcrf/dataset.hpp"

namespace ahcrf {

enum class CorruptionKind {
  kGap,             // one centered contiguous run
  kTruncate,        // one run at the tail
  kRandomSegments,  // distinct random positions
  kNoiseOverlay,    // random positions, Gaussian noise added on top
};

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::kRandomSegments;
  double ratio = 0.0;  // fraction of segments, in [0, 0.8]
  bool known = false;  // expose the mask to the pipeline
  double noise_std = 1.0;  // noise-overlay only
  std::uint64_t seed = 1;
  double action_fraction = 1.0;  // fraction of actions that get corrupted
};

const char* to_string(CorruptionKind kind) noexcept;
CorruptionKind corruption_kind_from_string(const std::string& name);

/// round(ratio * T), half away from zero.
std::size_t corrupted_count(double ratio, std::size_t length);

/// Positions to corrupt in one action of length T.
std::vector<bool> corruption_mask(CorruptionKind kind, double ratio, std::size_t length, std::mt19937_64& rng);

/// Replaces (or, for noise-overlay, perturbs) the selected segments. Every
/// action gets a ground-truth mask; known_outlier_mask is only set when
/// spec.known. Replacement vectors are N(0, replacement_std^2), where the
/// default is the input dataset's feature standard deviation.
Dataset inject_corruption(const Dataset& dataset, const CorruptionSpec& spec,
                          std::optional<double> replacement_std = std::nullopt);

}  // namespace ahcrf
