#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ahcrf/augmentation.hpp"
#include "ahcrf/error.hpp"
#include "ahcrf/kernels.hpp"

namespace ahcrf {

// Exact k-d tree over the segments of one position. Leaves hold point
// indices in insertion order; the search keeps the lowest index on exact
// distance ties, matching the linear scan.
struct RetrievalIndex::KdTree {
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t axis = 0;
    double split = 0.0;
    int left = -1;
    int right = -1;
  };

  static constexpr std::size_t kLeafSize = 8;

  std::vector<Node> nodes;
  std::vector<std::size_t> order;
  // Points into the index's action storage, which survives moves.
  const ActionSequence* actions = nullptr;
  std::size_t position = 0;

  std::span<const double> point(std::size_t i) const { return actions[i].segments[position]; }

  int build(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({begin, end});
    if (end - begin <= kLeafSize) {
      std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end));
      return id;
    }
    const std::size_t dim = point(order[begin]).size();
    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t a = 0; a < dim; ++a) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t k = begin; k < end; ++k) {
        lo = std::min(lo, point(order[k])[a]);
        hi = std::max(hi, point(order[k])[a]);
      }
      if (hi - lo > widest) {
        widest = hi - lo;
        axis = a;
      }
    }
    if (widest <= 0.0) {
      // All points coincide.
      std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end));
      return id;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    auto first = order.begin() + static_cast<std::ptrdiff_t>(begin);
    std::nth_element(first, order.begin() + static_cast<std::ptrdiff_t>(mid),
                     order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return point(a)[axis] < point(b)[axis]; });
    const double split = point(order[mid])[axis];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes[static_cast<std::size_t>(id)].axis = axis;
    nodes[static_cast<std::size_t>(id)].split = split;
    nodes[static_cast<std::size_t>(id)].left = left;
    nodes[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  struct Best {
    std::size_t index = std::numeric_limits<std::size_t>::max();
    double squared = std::numeric_limits<double>::infinity();

    void offer(std::size_t i, double d) {
      if (d < squared || (d == squared && i < index)) {
        squared = d;
        index = i;
      }
    }
  };

  void search(int id, std::span<const double> query, std::size_t skip, Best& best) const {
    const Node& node = nodes[static_cast<std::size_t>(id)];
    if (node.left < 0) {
      for (std::size_t k = node.begin; k < node.end; ++k) {
        const std::size_t i = order[k];
        if (i == skip) continue;
        best.offer(i, kernels::squared_distance(query, point(i)));
      }
      return;
    }
    // Left holds coordinates <= split, right holds >= split.
    const double diff = query[node.axis] - node.split;
    const int near = diff <= 0.0 ? node.left : node.right;
    const int far = diff <= 0.0 ? node.right : node.left;
    search(near, query, skip, best);
    if (diff * diff <= best.squared) search(far, query, skip, best);
  }
};

RetrievalIndex::RetrievalIndex(RetrievalIndex&&) noexcept = default;
RetrievalIndex& RetrievalIndex::operator=(RetrievalIndex&&) noexcept = default;
RetrievalIndex::~RetrievalIndex() = default;

RetrievalIndex RetrievalIndex::build(const Dataset& training, IndexBackend backend) {
  if (training.empty()) throw InvalidInput("retrieval index: empty training set");
  const SequenceShape shape = validate(training);

  RetrievalIndex index;
  index.actions_ = training.actions;
  index.length_ = shape.length;
  index.dim_ = shape.dim;
  index.backend_ = backend;
  index.queries_ = std::make_unique<std::atomic<std::uint64_t>>(0);
  for (std::size_t i = 0; i < index.actions_.size(); ++i) index.by_id_.emplace(index.actions_[i].id, i);

  if (backend == IndexBackend::kKdTree) {
    for (std::size_t position = 0; position < shape.length; ++position) {
      auto tree = std::make_unique<KdTree>();
      tree->actions = index.actions_.data();
      tree->position = position;
      tree->order.resize(index.actions_.size());
      std::iota(tree->order.begin(), tree->order.end(), 0);
      tree->build(0, tree->order.size());
      index.trees_.push_back(std::move(tree));
    }
  }
  return index;
}

Neighbor RetrievalIndex::scan(std::span<const double> query, std::size_t position, std::size_t skip) const {
  Neighbor best{actions_.size(), std::numeric_limits<double>::infinity()};
  double best_squared = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    if (i == skip) continue;
    const double d = kernels::squared_distance(query, actions_[i].segments[position]);
    if (d < best_squared) {
      best_squared = d;
      best.action = i;
    }
  }
  best.distance = std::sqrt(best_squared);
  return best;
}

Neighbor RetrievalIndex::nearest(std::span<const double> query, std::size_t position,
                                 std::optional<std::string_view> exclude) const {
  if (position >= length_) throw InvalidInput("nearest: position out of range");
  if (query.size() != dim_) throw InvalidInput("nearest: query dimension does not match the index");
  std::size_t skip = actions_.size();
  if (exclude) {
    if (auto it = by_id_.find(std::string(*exclude)); it != by_id_.end()) skip = it->second;
  }
  if (skip < actions_.size() && actions_.size() == 1) {
    throw InvalidInput("nearest: every candidate is excluded");
  }
  queries_->fetch_add(1, std::memory_order_relaxed);

  if (backend_ == IndexBackend::kLinearScan) return scan(query, position, skip);

  KdTree::Best best;
  const auto& tree = *trees_[position];
  tree.search(0, query, skip, best);
  return {best.index, std::sqrt(best.squared)};
}

std::string nearest_training_action(const RetrievalIndex& index, std::span<const double> query,
                                    std::size_t position, std::optional<std::string_view> exclude) {
  return index.action(index.nearest(query, position, exclude).action).id;
}

}  // namespace ahcrf
