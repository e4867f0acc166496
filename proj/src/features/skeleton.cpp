#include <cmath>
#include <queue>

#include "ahcrf/error.hpp"
#include "ahcrf/features.hpp"

namespace ahcrf {
namespace {

constexpr double kDegenerateHipSpan = 1e-12;

double length(const Joint& a, const Joint& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Joints in breadth-first order from the hip center, with the topology
// checked along the way.
std::vector<std::size_t> bfs_order(const SkeletonTopology& topology) {
  const std::size_t n = topology.joints();
  if (n < 2) throw InvalidInput("skeleton needs at least two joints");
  for (std::size_t idx : {topology.hip_center, topology.left_hip, topology.right_hip}) {
    if (idx >= n) throw InvalidInput("skeleton: designated joint index out of range");
  }
  if (topology.parent[topology.hip_center] != -1) throw InvalidInput("skeleton: hip center must be the root");

  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == topology.hip_center) continue;
    const int p = topology.parent[j];
    if (p < 0 || static_cast<std::size_t>(p) >= n) throw InvalidInput("skeleton: invalid parent index");
    children[static_cast<std::size_t>(p)].push_back(j);
  }
  std::vector<std::size_t> order;
  std::queue<std::size_t> pending;
  pending.push(topology.hip_center);
  while (!pending.empty()) {
    const std::size_t j = pending.front();
    pending.pop();
    order.push_back(j);
    for (std::size_t c : children[j]) pending.push(c);
  }
  if (order.size() != n) throw InvalidInput("skeleton: joints unreachable from the hip center");
  return order;
}

}  // namespace

NormalizedSkeleton normalize_skeleton(const Skeleton& frame, const Skeleton& reference,
                                      const SkeletonTopology& topology) {
  const std::size_t n = topology.joints();
  if (frame.size() != n || reference.size() != n) {
    throw InvalidInput("normalize_skeleton: joint count does not match the topology");
  }
  const auto order = bfs_order(topology);

  NormalizedSkeleton out;
  out.joints.assign(n, Joint{0.0, 0.0, 0.0});

  // Root goes to the origin; every child is re-placed from its already
  // re-placed parent so each rescale preserves the parent joint.
  for (std::size_t k = 1; k < order.size(); ++k) {
    const std::size_t j = order[k];
    const auto p = static_cast<std::size_t>(topology.parent[j]);
    const double target = length(reference[j], reference[p]);
    const double current = length(frame[j], frame[p]);
    const Joint& src = current > 0.0 ? frame[j] : reference[j];
    const Joint& src_parent = current > 0.0 ? frame[p] : reference[p];
    const double scale = current > 0.0 ? target / current : 1.0;
    for (int axis = 0; axis < 3; ++axis) {
      out.joints[j][axis] = out.joints[p][axis] + (src[axis] - src_parent[axis]) * scale;
    }
  }

  const double vx = out.joints[topology.right_hip][0] - out.joints[topology.left_hip][0];
  const double vy = out.joints[topology.right_hip][1] - out.joints[topology.left_hip][1];
  const double span = std::hypot(vx, vy);
  if (span <= kDegenerateHipSpan) {
    out.rotation_skipped = true;
    return out;
  }
  const double c = vx / span;
  const double s = vy / span;
  for (auto& joint : out.joints) {
    const double x = joint[0];
    const double y = joint[1];
    joint[0] = c * x + s * y;
    joint[1] = -s * x + c * y;
  }
  return out;
}

Skeleton skeleton_from_frame(std::span<const double> frame) {
  if (frame.size() % 3 != 0) throw InvalidInput("skeleton frame length is not a multiple of 3");
  Skeleton joints(frame.size() / 3);
  for (std::size_t j = 0; j < joints.size(); ++j) {
    joints[j] = {frame[3 * j], frame[3 * j + 1], frame[3 * j + 2]};
  }
  return joints;
}

ActionSequence skeleton_action(const FrameStream& stream, std::size_t segments, const Skeleton& reference,
                               const SkeletonTopology& topology, std::string id) {
  if (stream.modality != Modality::kSkeleton) throw InvalidInput("skeleton_action: stream is not skeletal");
  const auto windows = segment_uniform(stream, segments);
  ActionSequence action;
  action.id = std::move(id);
  for (const auto& window : windows) {
    FeatureVector mean(3 * topology.joints(), 0.0);
    for (std::size_t f : window) {
      const auto normalized = normalize_skeleton(skeleton_from_frame(stream.frames[f]), reference, topology);
      for (std::size_t j = 0; j < normalized.joints.size(); ++j) {
        for (int axis = 0; axis < 3; ++axis) mean[3 * j + axis] += normalized.joints[j][axis];
      }
    }
    for (double& v : mean) v /= static_cast<double>(window.size());
    action.segments.push_back(std::move(mean));
  }
  return action;
}

}  // namespace ahcrf
