#include "ahcrf/metrics.hpp"

#include "ahcrf/error.hpp"

namespace ahcrf {

AlternativeQuality metric_alternative_quality(const AugmentedDataset& dataset) {
  AlternativeQuality quality;
  double fraction_sum = 0.0;
  std::size_t with_accurate = 0;
  for (const auto& action : dataset.actions) {
    if (!action.label) throw InvalidInput("alternative quality: action '" + action.id + "' has no label");
    for (const auto& segment : action.segments) {
      if (segment.alternatives.empty()) continue;
      std::size_t accurate = 0;
      for (const auto& alternative : segment.alternatives) {
        if (!alternative.source_label) {
          throw InvalidInput("alternative quality: alternative from '" + alternative.source_id + "' has no source label");
        }
        if (*alternative.source_label == *action.label) ++accurate;
      }
      fraction_sum += static_cast<double>(accurate) / static_cast<double>(segment.alternatives.size());
      if (accurate > 0) ++with_accurate;
      ++quality.segments;
    }
  }
  if (quality.segments > 0) {
    quality.mean_accurate_fraction = fraction_sum / static_cast<double>(quality.segments);
    quality.at_least_one_accurate = static_cast<double>(with_accurate) / static_cast<double>(quality.segments);
  }
  return quality;
}

std::optional<double> ReplacementStats::probability() const {
  if (replaced_outliers == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(replaced_outliers);
}

ReplacementStats metric_correct_replacement(std::span<const Configuration> configurations,
                                            const AugmentedDataset& dataset) {
  if (configurations.size() != dataset.size()) {
    throw InvalidInput("correct replacement: one configuration per action is required");
  }
  ReplacementStats stats;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& action = dataset.actions[i];
    const auto& config = configurations[i];
    if (!action.truth_mask) throw InvalidInput("correct replacement: action '" + action.id + "' has no truth mask");
    if (!action.label) throw InvalidInput("correct replacement: action '" + action.id + "' has no label");
    if (config.states.size() != action.length()) throw InvalidInput("correct replacement: configuration length mismatch");
    for (std::size_t t = 0; t < action.length(); ++t) {
      const std::size_t o = config.states[t].observation;
      if (!(*action.truth_mask)[t] || o == 0) continue;
      const auto& segment = action.segments[t];
      if (o > segment.alternatives.size()) throw InvalidInput("correct replacement: observation index out of range");
      const auto& alternative = segment.alternatives[o - 1];
      if (!alternative.source_label) throw InvalidInput("correct replacement: alternative has no source label");
      ++stats.replaced_outliers;
      if (*alternative.source_label == *action.label) ++stats.correct;
    }
  }
  return stats;
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) {
  if (truth >= classes_ || predicted >= classes_) throw InvalidInput("confusion: class out of range");
  ++counts_[truth * classes_ + predicted];
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw InvalidInput("confusion: class counts differ");
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
}

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t n = 0;
  for (auto c : counts_) n += c;
  return n;
}

std::size_t ConfusionMatrix::row_total(std::size_t truth) const {
  std::size_t n = 0;
  for (std::size_t p = 0; p < classes_; ++p) n += at(truth, p);
  return n;
}

double ConfusionMatrix::accuracy() const noexcept {
  const std::size_t n = total();
  if (n == 0) return 0.0;
  std::size_t hit = 0;
  for (std::size_t c = 0; c < classes_; ++c) hit += at(c, c);
  return static_cast<double>(hit) / static_cast<double>(n);
}

ConfusionMatrix ConfusionMatrix::from_counts(std::size_t classes, std::vector<std::size_t> counts) {
  if (counts.size() != classes * classes) throw InvalidInput("confusion: wrong number of cells");
  ConfusionMatrix m(classes);
  m.counts_ = std::move(counts);
  return m;
}

}  // namespace ahcrf
