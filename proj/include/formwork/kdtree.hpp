#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "cloud.hpp"

namespace formwork {

// Static 3-d tree over a point span; the span must outlive the tree.
// Neighbor results are ordered by (squared distance, index), so equal
// distances resolve to the lower input index.
class KdTree {
 public:
  struct Neighbor {
    double dist2;
    std::size_t index;
    friend bool operator<(const Neighbor& a, const Neighbor& b) {
      return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
    }
  };

  explicit KdTree(std::span<const Point3> points) : points_(points), order_(points.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (!points_.empty()) {
      nodes_.reserve(2 * points_.size() / kLeafSize + 2);
      build(0, order_.size());
    }
  }

  std::size_t size() const noexcept { return points_.size(); }

  // k nearest neighbors of `query`, skipping input index `skip` (pass
  // npos to keep all points).
  std::vector<Neighbor> knn(const Point3& query, std::size_t k, std::size_t skip = npos) const {
    std::vector<Neighbor> heap;
    if (k == 0 || nodes_.empty()) return heap;
    heap.reserve(k + 1);
    knn_search(0, query, k, skip, heap);
    std::sort_heap(heap.begin(), heap.end());
    return heap;
  }

  // All indices with distance <= radius, ascending by index.
  std::vector<std::size_t> radius(const Point3& query, double radius) const {
    std::vector<std::size_t> out;
    if (!nodes_.empty()) radius_search(0, query, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  static constexpr std::size_t kLeafSize = 12;

  struct Node {
    std::size_t begin, end;  // range in order_
    int axis = -1;           // -1 for leaves
    double split = 0.0;
    std::size_t left = 0, right = 0;
    Point3 lo, hi;  // bounding box of the node's points
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{begin, end});
    Point3 lo = points_[order_[begin]], hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    nodes_[id].lo = lo;
    nodes_[id].hi = hi;
    if (end - begin <= kLeafSize) return id;

    int axis;
    (hi - lo).maxCoeff(&axis);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = points_[order_[mid]][axis];
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  static double box_dist2(const Node& n, const Point3& q) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double d = q[a] < n.lo[a] ? n.lo[a] - q[a] : (q[a] > n.hi[a] ? q[a] - n.hi[a] : 0.0);
      d2 += d * d;
    }
    return d2;
  }

  void knn_search(std::size_t id, const Point3& q, std::size_t k, std::size_t skip, std::vector<Neighbor>& heap) const {
    const Node& n = nodes_[id];
    if (heap.size() == k && box_dist2(n, q) > heap.front().dist2) return;
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t idx = order_[i];
        if (idx == skip) continue;
        const Neighbor cand{(points_[idx] - q).squaredNorm(), idx};
        if (heap.size() < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }
    const bool go_left = q[n.axis] < n.split;
    knn_search(go_left ? n.left : n.right, q, k, skip, heap);
    knn_search(go_left ? n.right : n.left, q, k, skip, heap);
  }

  void radius_search(std::size_t id, const Point3& q, double r2, std::vector<std::size_t>& out) const {
    const Node& n = nodes_[id];
    if (box_dist2(n, q) > r2) return;
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        if ((points_[order_[i]] - q).squaredNorm() <= r2) out.push_back(order_[i]);
      }
      return;
    }
    radius_search(n.left, q, r2, out);
    radius_search(n.right, q, r2, out);
  }

  std::span<const Point3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace formwork
