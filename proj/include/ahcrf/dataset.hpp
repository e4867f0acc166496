#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ahcrf {

/// Feature representation of one temporal segment.
using FeatureVector = std::vector<double>;

/// A length-T sequence of segment features. Positions are 0-based in code
/// and 1-based in every file format and CLI output.
struct ActionSequence {
  std::string id;
  std::vector<FeatureVector> segments;
  std::optional<std::string> label;
  // Corruption annotation visible to the pipeline (known-location modes).
  std::optional<std::vector<bool>> known_outlier_mask;
  // Ground truth recorded by corruption injection; evaluation only.
  std::optional<std::vector<bool>> truth_mask;

  std::size_t length() const noexcept { return segments.size(); }
  std::size_t dim() const noexcept { return segments.empty() ? 0 : segments.front().size(); }

  bool operator==(const ActionSequence&) const = default;
};

struct Dataset {
  std::vector<ActionSequence> actions;

  bool empty() const noexcept { return actions.empty(); }
  std::size_t size() const noexcept { return actions.size(); }

  bool operator==(const Dataset&) const = default;
};

/// Shape shared by every action of a dataset.
struct SequenceShape {
  std::size_t length = 0;
  std::size_t dim = 0;
};

/// Checks the per-action invariants (T >= 1, uniform d, finite values,
/// mask lengths, unique ids) and that all actions share one shape.
/// Throws InvalidInput on violation. An empty dataset has shape {0, 0}.
SequenceShape validate(const Dataset& dataset);

/// Sorted unique labels present in the dataset. Sorting makes the class
/// index independent of action order.
std::vector<std::string> class_names(const Dataset& dataset);

/// Index of `label` in `names`, or InvalidInput when absent.
std::size_t class_index(std::span<const std::string> names, const std::string& label);

/// Population standard deviation over every feature entry of every segment.
double feature_std(const Dataset& dataset);

}  // namespace ahcrf
