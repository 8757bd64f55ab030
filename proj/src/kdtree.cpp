#include "slrbf/geometry.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "slrbf/errors.hpp"

namespace slrbf {

namespace {

constexpr std::int32_t kLeafSize = 8;

struct Candidate {
  double d2;
  Index index;
  bool operator<(const Candidate& o) const {
    return d2 < o.d2 || (d2 == o.d2 && index < o.index);
  }
};

double coord(const Vec3& p, int axis) { return axis == 0 ? p.x : (axis == 1 ? p.y : p.z); }

}  // namespace

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  if (points_.size() > static_cast<std::size_t>(std::numeric_limits<Index>::max())) {
    throw ArgumentError("kd-tree: too many points");
  }
  perm_.resize(points_.size());
  for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = static_cast<Index>(i);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    build(0, static_cast<std::int32_t>(points_.size()));
  }
}

std::int32_t KdTree::build(std::int32_t begin, std::int32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{0.0, begin, end, -1, -1, -1});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo{1e300, 1e300, 1e300};
  Vec3 hi{-1e300, -1e300, -1e300};
  for (std::int32_t i = begin; i < end; ++i) {
    const Vec3& p = points_[perm_[i]];
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const Vec3 ext = hi - lo;
  int axis = 0;
  if (ext.y > ext.x) axis = 1;
  if (ext.z > coord(ext, axis)) axis = 2;

  const std::int32_t mid = begin + (end - begin) / 2;
  std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                   [&](Index a, Index b) {
                     const double ca = coord(points_[a], axis);
                     const double cb = coord(points_[b], axis);
                     return ca < cb || (ca == cb && a < b);
                   });
  const double split = coord(points_[perm_[mid]], axis);
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& node = nodes_[id];
  node.axis = static_cast<std::int8_t>(axis);
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

Index KdTree::nearest(const Vec3& q) const {
  if (points_.empty()) throw ArgumentError("nearest: empty point set");
  Candidate best{std::numeric_limits<double>::infinity(), std::numeric_limits<Index>::max()};

  // Explicit stack of (node, lower bound on distance2).
  std::vector<std::pair<std::int32_t, double>> stack;
  stack.reserve(64);
  stack.emplace_back(0, 0.0);
  while (!stack.empty()) {
    auto [id, bound] = stack.back();
    stack.pop_back();
    if (bound > best.d2) continue;
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::int32_t i = node.begin; i < node.end; ++i) {
        const Candidate c{distance2(q, points_[perm_[i]]), perm_[i]};
        if (c < best) best = c;
      }
      continue;
    }
    const double diff = coord(q, node.axis) - node.split;
    const double far_bound = std::max(bound, diff * diff);
    const std::int32_t near_child = diff < 0.0 ? node.left : node.right;
    const std::int32_t far_child = diff < 0.0 ? node.right : node.left;
    stack.emplace_back(far_child, far_bound);
    stack.emplace_back(near_child, bound);
  }
  return best.index;
}

std::vector<Index> KdTree::knn(const Vec3& q, std::size_t k) const {
  if (k > points_.size()) throw ArgumentError("knn: k exceeds number of points");
  std::vector<Index> out;
  if (k == 0) return out;

  std::priority_queue<Candidate> heap;  // max-heap: top is the worst kept
  std::vector<std::pair<std::int32_t, double>> stack;
  stack.reserve(64);
  stack.emplace_back(0, 0.0);
  while (!stack.empty()) {
    auto [id, bound] = stack.back();
    stack.pop_back();
    if (heap.size() == k && bound > heap.top().d2) continue;
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::int32_t i = node.begin; i < node.end; ++i) {
        const Candidate c{distance2(q, points_[perm_[i]]), perm_[i]};
        if (heap.size() < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      continue;
    }
    const double diff = coord(q, node.axis) - node.split;
    const double far_bound = std::max(bound, diff * diff);
    const std::int32_t near_child = diff < 0.0 ? node.left : node.right;
    const std::int32_t far_child = diff < 0.0 ? node.right : node.left;
    stack.emplace_back(far_child, far_bound);
    stack.emplace_back(near_child, bound);
  }
  out.resize(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top().index;
    heap.pop();
  }
  return out;
}

void KdTree::within_radius(const Vec3& q, double radius, std::vector<Index>& out) const {
  if (points_.empty()) return;
  const double r2 = radius * radius;
  const std::size_t first = out.size();
  std::vector<std::pair<std::int32_t, double>> stack;
  stack.reserve(64);
  stack.emplace_back(0, 0.0);
  while (!stack.empty()) {
    auto [id, bound] = stack.back();
    stack.pop_back();
    if (bound >= r2) continue;
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::int32_t i = node.begin; i < node.end; ++i) {
        if (distance2(q, points_[perm_[i]]) < r2) out.push_back(perm_[i]);
      }
      continue;
    }
    const double diff = coord(q, node.axis) - node.split;
    const double far_bound = std::max(bound, diff * diff);
    stack.emplace_back(diff < 0.0 ? node.right : node.left, far_bound);
    stack.emplace_back(diff < 0.0 ? node.left : node.right, bound);
  }
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

}  // namespace slrbf
