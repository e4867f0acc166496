#include "ahcrf/augmentation.hpp"
#include "ahcrf/error.hpp"

namespace ahcrf {

std::vector<Alternative> recommend(const RetrievalIndex& index, const ActionSequence& action, std::size_t j,
                                   std::optional<std::string_view> exclude) {
  if (j >= action.length()) throw InvalidInput("recommend: query position out of range");
  const Neighbor winner = index.nearest(action.segments[j], j, exclude);
  const ActionSequence& source = index.action(winner.action);
  std::vector<Alternative> out;
  out.reserve(source.length());
  for (std::size_t t = 0; t < source.length(); ++t) {
    out.push_back({source.segments[t], source.id, t, j, source.label});
  }
  return out;
}

AugmentedAction without_alternatives(const ActionSequence& action) {
  AugmentedAction out;
  out.id = action.id;
  out.label = action.label;
  out.truth_mask = action.truth_mask;
  for (const auto& segment : action.segments) out.segments.push_back({segment, {}, true});
  return out;
}

AugmentedAction augment_action(const RetrievalIndex& index, const ActionSequence& action,
                               const AugmentOptions& options) {
  const std::size_t length = action.length();
  if (length != index.length() || action.dim() != index.dim()) {
    throw InvalidInput("augment_action: action '" + action.id + "' does not match the index shape");
  }
  const std::vector<bool>* mask = nullptr;
  if (options.known_mask_mode && action.known_outlier_mask) {
    mask = &*action.known_outlier_mask;
    if (mask->size() != length) throw InvalidInput("augment_action: mask length differs from T");
  }
  const auto wants_alternatives = [&](std::size_t t) { return mask == nullptr || (*mask)[t]; };

  AugmentedAction out = without_alternatives(action);
  if (mask != nullptr && options.drop_masked_original) {
    for (std::size_t t = 0; t < length; ++t) out.segments[t].original_allowed = !(*mask)[t];
  }

  std::optional<std::string_view> exclude;
  if (options.exclude_self) exclude = action.id;

  // recommendations[j][t] = x~_t^j
  std::vector<std::vector<Alternative>> recommendations;
  recommendations.reserve(length);
  for (std::size_t j = 0; j < length; ++j) recommendations.push_back(recommend(index, action, j, exclude));

  for (std::size_t t = 0; t < length; ++t) {
    if (!wants_alternatives(t)) continue;
    for (std::size_t j = 0; j < length; ++j) out.segments[t].alternatives.push_back(recommendations[j][t]);
  }
  for (std::size_t t = 0; t < length; ++t) {
    if (!wants_alternatives(t)) continue;
    for (std::size_t j = 0; j < length; ++j) {
      for (std::size_t offset = 1; offset <= options.duplicate_window; ++offset) {
        if (t >= offset) out.segments[t].alternatives.push_back(recommendations[j][t - offset]);
        if (t + offset < length) out.segments[t].alternatives.push_back(recommendations[j][t + offset]);
      }
    }
  }
  return out;
}

AugmentedSplit augment_dataset(const Dataset& training, const Dataset& test, const AugmentOptions& options,
                               IndexBackend backend) {
  const auto index = RetrievalIndex::build(training, backend);
  const SequenceShape test_shape = validate(test);
  if (!test.empty() && (test_shape.length != index.length() || test_shape.dim != index.dim())) {
    throw InvalidInput("augment_dataset: training and test sets differ in T or d");
  }

  AugmentedSplit split;
  AugmentOptions train_options = options;
  train_options.exclude_self = true;
  AugmentOptions test_options = options;
  test_options.exclude_self = false;
  for (const auto& action : training.actions) split.train.actions.push_back(augment_action(index, action, train_options));
  for (const auto& action : test.actions) split.test.actions.push_back(augment_action(index, action, test_options));
  split.nns_queries = index.query_count();
  return split;
}

}  // namespace ahcrf
