#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ahcrf/dataset.hpp"

namespace ahcrf {

enum class Modality { kDescriptor, kSkeleton };

/// Raw per-frame observations preceding segment features. Skeleton frames
/// store J joints as x,y,z triples (z is the vertical axis).
struct FrameStream {
  std::vector<std::vector<double>> frames;
  Modality modality = Modality::kDescriptor;
};

/// Frame indices belonging to one temporal window.
using FrameWindow = std::vector<std::size_t>;

/// Splits F frames into T windows; window t covers
/// [floor(t*F/T), floor((t+1)*F/T)). When F < T an empty window holds a copy
/// of the nearest preceding frame (frame 0 if there is none).
std::vector<FrameWindow> segment_uniform(const FrameStream& stream, std::size_t windows);

// ---------------------------------------------------------------------------
// Skeletons

using Joint = std::array<double, 3>;
using Skeleton = std::vector<Joint>;

/// Kinematic tree. parent[hip_center] must be -1; every other joint has a
/// parent that is reachable from the hip center.
struct SkeletonTopology {
  std::vector<int> parent;
  std::size_t hip_center = 0;
  std::size_t left_hip = 1;
  std::size_t right_hip = 2;

  std::size_t joints() const noexcept { return parent.size(); }
};

struct NormalizedSkeleton {
  Skeleton joints;
  // Left and right hip coincide in the ground plane, so no heading exists.
  bool rotation_skipped = false;
};

/// Person-centric normalization: hip center to the origin, bone lengths
/// matched to `reference` (breadth-first from the hip center), then a
/// rotation about the vertical axis that puts the ground-plane projection
/// of left-hip -> right-hip on the positive x-axis.
NormalizedSkeleton normalize_skeleton(const Skeleton& frame, const Skeleton& reference,
                                      const SkeletonTopology& topology);

Skeleton skeleton_from_frame(std::span<const double> frame);

// ---------------------------------------------------------------------------
// Bag of words

struct Codebook {
  std::vector<FeatureVector> centers;

  std::size_t size() const noexcept { return centers.size(); }
  std::size_t dim() const noexcept { return centers.empty() ? 0 : centers.front().size(); }
};

struct KMeansOptions {
  std::size_t max_iterations = 300;
  double tolerance = 1e-6;  // on the largest center movement
};

struct KMeansResult {
  Codebook codebook;
  // Sum of squared distances to the assigned center, one entry after the
  // initial assignment and one after each Lloyd iteration.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
};

/// k-means++ seeding followed by Lloyd iterations. Requires at least k
/// distinct descriptors. Deterministic for a given seed.
KMeansResult kmeans(std::span<const FeatureVector> descriptors, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

Codebook build_codebook(std::span<const FeatureVector> descriptors, std::size_t k, std::uint64_t seed);

/// Index of the nearest center; ties go to the lowest index.
std::size_t nearest_center(const Codebook& codebook, std::span<const double> descriptor);

/// L1-normalized histogram of nearest-center assignments. An empty window
/// yields the uniform histogram 1/k.
FeatureVector bow_histogram(std::span<const FeatureVector> window, const Codebook& codebook);

/// Segments a descriptor stream and builds one histogram per window.
ActionSequence descriptor_action(const FrameStream& stream, std::size_t segments, const Codebook& codebook,
                                 std::string id);

/// Segments a skeleton stream, normalizes each frame and averages the
/// normalized joint coordinates within each window.
ActionSequence skeleton_action(const FrameStream& stream, std::size_t segments, const Skeleton& reference,
                               const SkeletonTopology& topology, std::string id);

// ---------------------------------------------------------------------------
// Synthetic data

struct SyntheticSpec {
  std::size_t num_classes = 5;
  std::size_t actions_per_class = 40;
  std::size_t length = 10;  // T
  std::size_t dim = 8;      // d
  std::size_t poses_per_class = 4;
  double noise_std = 0.3;
  double prototype_scale = 1.0;
  std::uint64_t seed = 1;
};

/// Labels are "c0", "c1", ... (zero-padded when there are ten or more
/// classes). Segment t of every class-c action is prototype
/// floor(t * poses / T) of class c plus isotropic Gaussian noise.
Dataset generate_synthetic_dataset(const SyntheticSpec& spec);

}  // namespace ahcrf
