#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ahcrf/augmentation.hpp"
#include "ahcrf/crf.hpp"

namespace ahcrf {

struct AlternativeQuality {
  double mean_accurate_fraction = 0.0;  // averaged over augmented segments
  double at_least_one_accurate = 0.0;   // probability over augmented segments
  std::size_t segments = 0;             // segments with >= 1 alternative
};

/// An alternative is accurate when its source label equals the action's
/// label. Segments without alternatives are skipped. Throws InvalidInput on
/// a missing action label or source label.
AlternativeQuality metric_alternative_quality(const AugmentedDataset& dataset);

struct ReplacementStats {
  std::size_t replaced_outliers = 0;  // truth-masked segments decoded with o_t != 0
  std::size_t correct = 0;            // ... whose alternative comes from the true class

  /// nullopt when nothing was replaced.
  std::optional<double> probability() const;
};

/// configurations[i] is the decoded configuration of dataset.actions[i].
/// Uses each action's truth_mask and label.
ReplacementStats metric_correct_replacement(std::span<const Configuration> configurations,
                                            const AugmentedDataset& dataset);

class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {}

  void add(std::size_t truth, std::size_t predicted);
  void merge(const ConfusionMatrix& other);

  std::size_t classes() const noexcept { return classes_; }
  std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * classes_ + predicted]; }
  std::size_t total() const noexcept;
  std::size_t row_total(std::size_t truth) const;
  double accuracy() const noexcept;

  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  static ConfusionMatrix from_counts(std::size_t classes, std::vector<std::size_t> counts);

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t classes_ = 0;
  std::vector<std::size_t> counts_;
};

}  // namespace ahcrf
