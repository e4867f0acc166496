#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ahcrf/error.hpp"
#include "ahcrf/features.hpp"
#include "ahcrf/kernels.hpp"

namespace ahcrf {
namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t count_distinct(std::span<const FeatureVector> points) {
  std::vector<const FeatureVector*> sorted;
  sorted.reserve(points.size());
  for (const auto& p : points) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return *a < *b; });
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || *sorted[i] != *sorted[i - 1]) ++distinct;
  }
  return distinct;
}

std::vector<FeatureVector> seed_plus_plus(std::span<const FeatureVector> points, std::size_t k,
                                          std::mt19937_64& rng) {
  std::vector<FeatureVector> centers;
  centers.push_back(points[static_cast<std::size_t>(unit_uniform(rng) * points.size())]);
  std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      nearest[i] = std::min(nearest[i], kernels::squared_distance(points[i], centers.back()));
      total += nearest[i];
    }
    const double target = unit_uniform(rng) * total;
    double running = 0.0;
    std::size_t pick = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (nearest[i] <= 0.0) continue;
      running += nearest[i];
      pick = i;
      if (running > target) break;
    }
    centers.push_back(points[pick]);
  }
  return centers;
}

}  // namespace

std::size_t nearest_center(const Codebook& codebook, std::span<const double> descriptor) {
  if (codebook.centers.empty()) throw InvalidInput("codebook is empty");
  if (descriptor.size() != codebook.dim()) throw InvalidInput("descriptor dimension does not match codebook");
  std::size_t best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < codebook.centers.size(); ++c) {
    const double distance = kernels::squared_distance(descriptor, codebook.centers[c]);
    if (distance < best_distance) {
      best_distance = distance;
      best = c;
    }
  }
  return best;
}

KMeansResult kmeans(std::span<const FeatureVector> descriptors, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (k == 0) throw InvalidInput("kmeans: k must be >= 1");
  if (descriptors.empty()) throw InvalidInput("kmeans: no descriptors");
  const std::size_t dim = descriptors.front().size();
  for (const auto& d : descriptors) {
    if (d.size() != dim) throw InvalidInput("kmeans: descriptors differ in dimension");
  }
  if (count_distinct(descriptors) < k) throw InvalidInput("kmeans: fewer than k distinct descriptors");

  std::mt19937_64 rng(seed);
  KMeansResult result;
  result.codebook.centers = seed_plus_plus(descriptors, k, rng);
  auto& centers = result.codebook.centers;

  std::vector<std::size_t> assignment(descriptors.size());
  std::vector<double> distance(descriptors.size());
  for (std::size_t iter = 0;; ++iter) {
    double objective = 0.0;
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
      assignment[i] = nearest_center(result.codebook, descriptors[i]);
      distance[i] = kernels::squared_distance(descriptors[i], centers[assignment[i]]);
      objective += distance[i];
    }
    result.objective_trace.push_back(objective);
    if (iter == options.max_iterations) break;

    std::vector<FeatureVector> sums(k, FeatureVector(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
      kernels::axpy(1.0, descriptors[i], sums[assignment[i]]);
      ++counts[assignment[i]];
    }
    double movement = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      FeatureVector next;
      if (counts[c] > 0) {
        next = std::move(sums[c]);
        for (double& v : next) v /= static_cast<double>(counts[c]);
      } else {
        // Empty cluster: take the point worst served by its center.
        const auto worst = std::max_element(distance.begin(), distance.end()) - distance.begin();
        next = descriptors[static_cast<std::size_t>(worst)];
        distance[static_cast<std::size_t>(worst)] = 0.0;
      }
      movement = std::max(movement, std::sqrt(kernels::squared_distance(next, centers[c])));
      centers[c] = std::move(next);
    }
    result.iterations = iter + 1;
    if (movement <= options.tolerance) {
      // Final assignment against the settled centers.
      double settled = 0.0;
      for (const auto& d : descriptors) {
        settled += kernels::squared_distance(d, centers[nearest_center(result.codebook, d)]);
      }
      result.objective_trace.push_back(settled);
      break;
    }
  }
  return result;
}

Codebook build_codebook(std::span<const FeatureVector> descriptors, std::size_t k, std::uint64_t seed) {
  return kmeans(descriptors, k, seed).codebook;
}

FeatureVector bow_histogram(std::span<const FeatureVector> window, const Codebook& codebook) {
  const std::size_t k = codebook.size();
  if (k == 0) throw InvalidInput("bow_histogram: codebook is empty");
  if (window.empty()) return FeatureVector(k, 1.0 / static_cast<double>(k));
  FeatureVector histogram(k, 0.0);
  for (const auto& descriptor : window) histogram[nearest_center(codebook, descriptor)] += 1.0;
  const double n = static_cast<double>(window.size());
  for (double& v : histogram) v /= n;
  return histogram;
}

ActionSequence descriptor_action(const FrameStream& stream, std::size_t segments, const Codebook& codebook,
                                 std::string id) {
  const auto windows = segment_uniform(stream, segments);
  ActionSequence action;
  action.id = std::move(id);
  for (const auto& window : windows) {
    std::vector<FeatureVector> descriptors;
    descriptors.reserve(window.size());
    for (std::size_t f : window) descriptors.push_back(stream.frames[f]);
    action.segments.push_back(bow_histogram(descriptors, codebook));
  }
  return action;
}

}  // namespace ahcrf
