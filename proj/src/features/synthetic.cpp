#include <random>
#include <string>

#include "ahcrf/error.hpp"
#include "ahcrf/features.hpp"

namespace ahcrf {
namespace {

std::string padded(std::size_t value, std::size_t width) {
  std::string digits = std::to_string(value);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return digits;
}

}  // namespace

Dataset generate_synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.num_classes == 0 || spec.actions_per_class == 0 || spec.length == 0 || spec.dim == 0 ||
      spec.poses_per_class == 0) {
    throw InvalidInput("synthetic spec: all counts must be >= 1");
  }
  if (!(spec.noise_std >= 0.0)) throw InvalidInput("synthetic spec: noise_std must be >= 0");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  // prototypes[c][k] is the k-th key pose of class c
  std::vector<std::vector<FeatureVector>> prototypes(spec.num_classes);
  for (auto& poses : prototypes) {
    for (std::size_t k = 0; k < spec.poses_per_class; ++k) {
      FeatureVector pose(spec.dim);
      for (double& v : pose) v = spec.prototype_scale * unit(rng);
      poses.push_back(std::move(pose));
    }
  }

  const std::size_t label_width = std::to_string(spec.num_classes - 1).size();
  const std::size_t total = spec.num_classes * spec.actions_per_class;
  const std::size_t id_width = std::to_string(total - 1).size();

  Dataset dataset;
  dataset.actions.reserve(total);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    for (std::size_t a = 0; a < spec.actions_per_class; ++a) {
      ActionSequence action;
      action.id = "s" + padded(dataset.actions.size(), id_width);
      action.label = "c" + padded(c, label_width);
      for (std::size_t t = 0; t < spec.length; ++t) {
        const std::size_t pose = t * spec.poses_per_class / spec.length;
        FeatureVector segment = prototypes[c][pose];
        if (spec.noise_std > 0.0) {
          for (double& v : segment) v += spec.noise_std * unit(rng);
        }
        action.segments.push_back(std::move(segment));
      }
      dataset.actions.push_back(std::move(action));
    }
  }
  return dataset;
}

}  // namespace ahcrf
