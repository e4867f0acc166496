#include "ahcrf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ahcrf/error.hpp"

namespace ahcrf {

SequenceShape validate(const Dataset& dataset) {
  SequenceShape shape;
  std::unordered_set<std::string> ids;
  for (const auto& action : dataset.actions) {
    if (action.segments.empty()) throw InvalidInput("action '" + action.id + "' has no segments");
    if (!ids.insert(action.id).second) throw InvalidInput("duplicate action id '" + action.id + "'");
    const std::size_t dim = action.dim();
    if (dim == 0) throw InvalidInput("action '" + action.id + "' has zero-dimensional features");
    for (const auto& segment : action.segments) {
      if (segment.size() != dim) throw InvalidInput("action '" + action.id + "' mixes feature dimensions");
      for (double v : segment) {
        if (!std::isfinite(v)) throw InvalidInput("action '" + action.id + "' has a non-finite feature");
      }
    }
    for (const auto* mask : {&action.known_outlier_mask, &action.truth_mask}) {
      if (*mask && (*mask)->size() != action.length()) {
        throw InvalidInput("action '" + action.id + "' has a mask of the wrong length");
      }
    }
    if (shape.length == 0) {
      shape = {action.length(), dim};
    } else if (shape.length != action.length() || shape.dim != dim) {
      throw InvalidInput("action '" + action.id + "' does not share the dataset's T and d");
    }
  }
  return shape;
}

std::vector<std::string> class_names(const Dataset& dataset) {
  std::vector<std::string> names;
  for (const auto& action : dataset.actions) {
    if (action.label) names.push_back(*action.label);
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

std::size_t class_index(std::span<const std::string> names, const std::string& label) {
  const auto it = std::find(names.begin(), names.end(), label);
  if (it == names.end()) throw InvalidInput("label '" + label + "' is not in the class domain");
  return static_cast<std::size_t>(it - names.begin());
}

double feature_std(const Dataset& dataset) {
  double sum = 0.0;
  double count = 0.0;
  for (const auto& action : dataset.actions) {
    for (const auto& segment : action.segments) {
      for (double v : segment) sum += v;
      count += static_cast<double>(segment.size());
    }
  }
  if (count == 0.0) return 0.0;
  const double mean = sum / count;
  double ss = 0.0;
  for (const auto& action : dataset.actions) {
    for (const auto& segment : action.segments) {
      for (double v : segment) ss += (v - mean) * (v - mean);
    }
  }
  return std::sqrt(ss / count);
}

}  // namespace ahcrf
