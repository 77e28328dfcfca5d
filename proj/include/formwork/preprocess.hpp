#pragma once

// Cloud cleanup ahead of member analysis: crop, ground removal, statistical
// outlier removal and voxel downsampling. Every filter keeps the relative
// input order of the points it retains.

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cloud.hpp"
#include "error.hpp"
#include "kdtree.hpp"

namespace formwork {

enum class Keep { Inside, Outside };

inline PointCloud pass_through(const PointCloud& cloud, const Aabb& box, Keep keep = Keep::Inside) {
  if (!box.valid()) throw ParameterError("crop box min must be <= max");
  std::vector<std::size_t> idx;
  idx.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (box.contains(cloud[i]) == (keep == Keep::Inside)) idx.push_back(i);
  }
  return select(cloud, idx);
}

struct GroundRemoval {
  PointCloud cloud;          // points above the ground level
  double ground_level = 0;   // upper edge of the peak bin
  AxisHistogram histogram;   // Z histogram the peak was taken from
  bool all_removed = false;  // warning: nothing survived
};

// Single-peak ground removal: the fullest Z bin is taken as the ground and
// every point at or below its upper edge is dropped. Widening the bin folds
// low clutter next to the ground into the peak.
inline GroundRemoval remove_ground(const PointCloud& cloud, double bin_size) {
  if (cloud.empty()) throw ParameterError("empty cloud");
  GroundRemoval out;
  out.histogram = axis_histogram(cloud, Axis::Z, bin_size);
  out.ground_level = out.histogram.upper_edge(highest_peak(out.histogram));
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud[i].z() > out.ground_level) idx.push_back(i);
  }
  out.cloud = select(cloud, idx);
  out.all_removed = out.cloud.empty();
  return out;
}

struct OutlierSplit {
  PointCloud kept;
  PointCloud removed;
  std::vector<std::size_t> kept_indices;
  std::vector<std::size_t> removed_indices;
  std::vector<double> mean_distances;  // d_i per input point
  double mean = 0.0;                   // mu over d_i
  double stddev = 0.0;                 // population sigma over d_i
  double threshold = 0.0;              // mu + std_ratio * sigma
};

// Mean distance from every point to its k nearest neighbors (self excluded).
// Distances are accumulated nearest first, ties by index.
inline std::vector<double> mean_knn_distances(std::span<const Point3> points, std::size_t k) {
  KdTree tree(points);
  std::vector<double> d(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double sum = 0.0;
    for (const auto& nb : tree.knn(points[i], k, i)) sum += std::sqrt(nb.dist2);
    d[i] = sum / static_cast<double>(k);
  }
  return d;
}

// Keeps point i iff d_i <= mu + std_ratio * sigma (one-sided: only sparse,
// far-from-everything points are outliers).
inline OutlierSplit statistical_outlier_removal(const PointCloud& cloud, std::size_t k, double std_ratio) {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (!(std_ratio > 0.0)) throw ParameterError("std_ratio must be > 0");
  if (cloud.size() <= k) throw ParameterError("k too large for cloud");

  OutlierSplit out;
  out.mean_distances = mean_knn_distances(cloud.points, k);
  const double n = static_cast<double>(cloud.size());
  double sum = 0.0;
  for (double d : out.mean_distances) sum += d;
  out.mean = sum / n;
  double var = 0.0;
  for (double d : out.mean_distances) var += (d - out.mean) * (d - out.mean);
  out.stddev = std::sqrt(var / n);
  out.threshold = out.mean + std_ratio * out.stddev;

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    (out.mean_distances[i] <= out.threshold ? out.kept_indices : out.removed_indices).push_back(i);
  }
  out.kept = select(cloud, out.kept_indices);
  out.removed = select(cloud, out.removed_indices);
  return out;
}

namespace detail {

struct VoxelKey {
  std::int64_t x, y, z;
  friend auto operator<=>(const VoxelKey&, const VoxelKey&) = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

// Replaces the points of each occupied cubic voxel by their centroid. The grid
// is anchored at `anchor`, or at the cloud's minimum corner when omitted.
// Output order follows the first occurrence of each voxel in the input;
// `keys_out` receives the parallel integer voxel coordinates.
inline PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size,
                                   std::optional<Point3> anchor = std::nullopt,
                                   std::vector<detail::VoxelKey>* keys_out = nullptr) {
  if (!(voxel_size > 0.0)) throw ParameterError("voxel_size must be > 0");
  if (keys_out) keys_out->clear();
  if (cloud.empty()) return {};
  const Point3 origin = anchor ? *anchor : bounds(cloud).min;

  struct Acc {
    Point3 sum = Point3::Zero();
    Eigen::Vector3d color = Eigen::Vector3d::Zero();
    std::size_t count = 0;
  };
  std::unordered_map<detail::VoxelKey, std::size_t, detail::VoxelKeyHash> slot;
  std::vector<Acc> acc;
  slot.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3 t = (cloud[i] - origin) / voxel_size;
    const detail::VoxelKey key{static_cast<std::int64_t>(std::floor(t.x())), static_cast<std::int64_t>(std::floor(t.y())),
                               static_cast<std::int64_t>(std::floor(t.z()))};
    auto [it, inserted] = slot.try_emplace(key, acc.size());
    if (inserted) {
      acc.emplace_back();
      if (keys_out) keys_out->push_back(key);
    }
    Acc& a = acc[it->second];
    a.sum += cloud[i];
    if (cloud.has_colors()) a.color += Eigen::Vector3d(cloud.colors[i].r, cloud.colors[i].g, cloud.colors[i].b);
    ++a.count;
  }

  PointCloud out;
  out.points.reserve(acc.size());
  for (const auto& a : acc) {
    const double n = static_cast<double>(a.count);
    out.points.push_back(a.sum / n);
    if (cloud.has_colors()) {
      const Eigen::Vector3d c = (a.color / n).array().round();
      out.colors.push_back(Rgb{static_cast<std::uint8_t>(c.x()), static_cast<std::uint8_t>(c.y()),
                               static_cast<std::uint8_t>(c.z())});
    }
  }
  return out;
}

}  // namespace formwork
