#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ahcrf/dataset.hpp"

namespace ahcrf {

/// A training segment offered as a replacement for segment `target` of an
/// action because that action's segment `recommender` retrieved it.
struct Alternative {
  FeatureVector vector;
  std::string source_id;
  std::size_t source_position = 0;  // 0-based t inside the source action
  std::size_t recommender = 0;      // 0-based query position j
  std::optional<std::string> source_label;  // metrics only

  bool operator==(const Alternative&) const = default;
};

struct AugmentedSegment {
  FeatureVector original;
  std::vector<Alternative> alternatives;
  // False when the original observation is known to be missing; the
  // segment then has to be explained by one of its alternatives.
  bool original_allowed = true;

  bool operator==(const AugmentedSegment&) const = default;
};

struct AugmentedAction {
  std::string id;
  std::optional<std::string> label;
  std::vector<AugmentedSegment> segments;
  std::optional<std::vector<bool>> truth_mask;

  std::size_t length() const noexcept { return segments.size(); }
  bool operator==(const AugmentedAction&) const = default;
};

struct AugmentedDataset {
  std::vector<AugmentedAction> actions;

  std::size_t size() const noexcept { return actions.size(); }
  bool operator==(const AugmentedDataset&) const = default;
};

enum class IndexBackend { kLinearScan, kKdTree };

struct Neighbor {
  std::size_t action = 0;  // insertion index in the training set
  double distance = 0.0;   // Euclidean

  bool operator==(const Neighbor&) const = default;
};

/// Exact nearest-neighbour search over the training set, one search space
/// per segment position. Immutable after build; queries are thread-safe.
class RetrievalIndex {
 public:
  static RetrievalIndex build(const Dataset& training, IndexBackend backend = IndexBackend::kLinearScan);

  RetrievalIndex(RetrievalIndex&&) noexcept;
  RetrievalIndex& operator=(RetrievalIndex&&) noexcept;
  ~RetrievalIndex();

  /// argmin_i ||query - x_{i,position}||, ties to the lowest insertion
  /// index. `exclude` skips one action by id. Counts as one NNS call.
  Neighbor nearest(std::span<const double> query, std::size_t position,
                   std::optional<std::string_view> exclude = std::nullopt) const;

  const ActionSequence& action(std::size_t i) const { return actions_[i]; }
  std::size_t size() const noexcept { return actions_.size(); }
  std::size_t length() const noexcept { return length_; }
  std::size_t dim() const noexcept { return dim_; }
  IndexBackend backend() const noexcept { return backend_; }

  std::uint64_t query_count() const noexcept { return queries_->load(std::memory_order_relaxed); }
  void reset_query_count() const noexcept { queries_->store(0, std::memory_order_relaxed); }

 private:
  struct KdTree;

  RetrievalIndex() = default;
  Neighbor scan(std::span<const double> query, std::size_t position, std::size_t skip) const;

  std::vector<ActionSequence> actions_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::size_t length_ = 0;
  std::size_t dim_ = 0;
  IndexBackend backend_ = IndexBackend::kLinearScan;
  std::vector<std::unique_ptr<KdTree>> trees_;
  std::unique_ptr<std::atomic<std::uint64_t>> queries_;
};

/// Id of the training action whose segment `position` is closest to `query`.
std::string nearest_training_action(const RetrievalIndex& index, std::span<const double> query,
                                    std::size_t position, std::optional<std::string_view> exclude = std::nullopt);

/// One NNS query with segment `j` of `action`; every segment of the winning
/// training action becomes an alternative (entry t is for position t).
std::vector<Alternative> recommend(const RetrievalIndex& index, const ActionSequence& action, std::size_t j,
                                   std::optional<std::string_view> exclude = std::nullopt);

struct AugmentOptions {
  bool exclude_self = false;
  // Alternative x~_t^j is also appended to segments t-w..t+w.
  std::size_t duplicate_window = 0;
  // With a known outlier mask, only masked segments receive alternatives.
  bool known_mask_mode = false;
  // With a known outlier mask, masked originals are removed from the
  // observation domain (used for early prediction).
  bool drop_masked_original = false;

  bool operator==(const AugmentOptions&) const = default;
};

AugmentedAction augment_action(const RetrievalIndex& index, const ActionSequence& action,
                               const AugmentOptions& options);

/// A plain action viewed as augmented with zero alternatives.
AugmentedAction without_alternatives(const ActionSequence& action);

struct AugmentedSplit {
  AugmentedDataset train;
  AugmentedDataset test;
  std::uint64_t nns_queries = 0;
};

/// Training actions are augmented with themselves excluded; test actions
/// query the full training set. `options.exclude_self` is ignored.
AugmentedSplit augment_dataset(const Dataset& training, const Dataset& test, const AugmentOptions& options,
                               IndexBackend backend = IndexBackend::kLinearScan);

}  // namespace ahcrf
