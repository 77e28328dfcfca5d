#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "error.hpp"

namespace formwork {

// Coordinates are meters throughout.
using Point3 = Eigen::Vector3d;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Ordered point set. `colors` is either empty or parallel to `points`.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<Rgb> colors;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  bool has_colors() const noexcept { return !colors.empty(); }

  const Point3& operator[](std::size_t i) const { return points[i]; }

  void push_back(const Point3& p) { points.push_back(p); }
  void push_back(const Point3& p, const Rgb& c) {
    points.push_back(p);
    colors.push_back(c);
  }
};

inline bool is_finite(const Point3& p) {
  return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

// Sub-cloud at the given indices, in the given order.
inline PointCloud select(const PointCloud& cloud, std::span<const std::size_t> indices) {
  PointCloud out;
  out.points.reserve(indices.size());
  for (std::size_t i : indices) out.points.push_back(cloud.points[i]);
  if (cloud.has_colors()) {
    out.colors.reserve(indices.size());
    for (std::size_t i : indices) out.colors.push_back(cloud.colors[i]);
  }
  return out;
}

// Complement of a sorted index list, ascending.
inline std::vector<std::size_t> complement(std::size_t n, std::span<const std::size_t> sorted_indices) {
  std::vector<std::size_t> out;
  out.reserve(n - std::min(n, sorted_indices.size()));
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (j < sorted_indices.size() && sorted_indices[j] < i) ++j;
    if (j < sorted_indices.size() && sorted_indices[j] == i) continue;
    out.push_back(i);
  }
  return out;
}

// Closed axis-aligned box.
struct Aabb {
  Point3 min = Point3::Zero();
  Point3 max = Point3::Zero();

  bool contains(const Point3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool valid() const { return (min.array() <= max.array()).all(); }
};

inline Aabb bounds(const PointCloud& cloud) {
  if (cloud.empty()) throw ParameterError("empty cloud");
  Aabb box{cloud[0], cloud[0]};
  for (const auto& p : cloud.points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

// World axes and the axes of a principal frame. A cloud expressed in a
// principal frame stores its a1/a2/a3 coordinates in x/y/z, so both families
// map onto the same coordinate slot.
enum class Axis { X, Y, Z, Principal1, Principal2, Principal3 };

constexpr int coordinate_index(Axis axis) {
  switch (axis) {
    case Axis::X:
    case Axis::Principal1:
      return 0;
    case Axis::Y:
    case Axis::Principal2:
      return 1;
    case Axis::Z:
    case Axis::Principal3:
      return 2;
  }
  return 0;
}

// Point counts per bin along one axis. Bin i covers
// [origin + i*bin_size, origin + (i+1)*bin_size); the origin is the minimum
// coordinate, and the maximum coordinate always lands in the last bin.
struct AxisHistogram {
  Axis axis = Axis::Z;
  double bin_size = 0.0;
  double origin = 0.0;
  std::vector<std::size_t> counts;

  double lower_edge(std::size_t bin) const { return origin + static_cast<double>(bin) * bin_size; }
  double upper_edge(std::size_t bin) const { return origin + static_cast<double>(bin + 1) * bin_size; }

  std::size_t bin_of(double c) const {
    const double t = std::floor((c - origin) / bin_size);
    if (t <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(t), counts.size() - 1);
  }

  std::size_t total() const {
    std::size_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

inline AxisHistogram axis_histogram(std::span<const Point3> points, Axis axis, double bin_size) {
  if (!(bin_size > 0.0) || !std::isfinite(bin_size)) throw ParameterError("bin_size must be > 0");
  if (points.empty()) throw ParameterError("empty cloud");
  const int k = coordinate_index(axis);
  double lo = points[0][k], hi = points[0][k];
  for (const auto& p : points) {
    lo = std::min(lo, p[k]);
    hi = std::max(hi, p[k]);
  }
  AxisHistogram h;
  h.axis = axis;
  h.bin_size = bin_size;
  h.origin = lo;
  h.counts.assign(static_cast<std::size_t>(std::floor((hi - lo) / bin_size)) + 1, 0);
  for (const auto& p : points) ++h.counts[h.bin_of(p[k])];
  return h;
}

inline AxisHistogram axis_histogram(const PointCloud& cloud, Axis axis, double bin_size) {
  return axis_histogram(std::span<const Point3>(cloud.points), axis, bin_size);
}

// Index of the fullest bin; the lowest index wins a tie.
inline std::size_t highest_peak(const AxisHistogram& hist) {
  if (hist.counts.empty()) throw ParameterError("histogram has no bins");
  return static_cast<std::size_t>(std::max_element(hist.counts.begin(), hist.counts.end()) - hist.counts.begin());
}

}  // namespace formwork
