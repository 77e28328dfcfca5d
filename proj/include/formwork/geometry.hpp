#pragma once

// Model fitting: RANSAC planes and lines, PCA frames and the rigid change of
// basis into a frame. detect_stud_frame chains them to recover the frame of
// the studs' front surface.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cloud.hpp"
#include "config.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace formwork {

// Plane {p : normal . p + offset = 0} with a unit normal.
struct PlaneModel {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;

  double signed_distance(const Point3& p) const { return normal.dot(p) + offset; }
  double distance(const Point3& p) const { return std::abs(signed_distance(p)); }
};

// Line through `origin` with unit `direction`.
struct LineModel {
  Point3 origin = Point3::Zero();
  Eigen::Vector3d direction = Eigen::Vector3d::UnitX();

  double distance(const Point3& p) const { return (p - origin).cross(direction).norm(); }
};

// Orthonormal right-handed basis. axes[0..2] are the first, second and third
// principal axes.
struct Frame {
  Point3 origin = Point3::Zero();
  std::array<Eigen::Vector3d, 3> axes{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()};

  // Rows are the axes: local = rotation() * (p - origin).
  Eigen::Matrix3d rotation() const {
    Eigen::Matrix3d r;
    r.row(0) = axes[0].transpose();
    r.row(1) = axes[1].transpose();
    r.row(2) = axes[2].transpose();
    return r;
  }

  Point3 to_local(const Point3& p) const {
    const Eigen::Vector3d d = p - origin;
    return {d.dot(axes[0]), d.dot(axes[1]), d.dot(axes[2])};
  }
};

template <class Model>
struct RansacResult {
  Model model;      // least-squares refit over `inliers`
  Model consensus;  // best sampled model
  std::vector<std::size_t> inliers;  // indices within threshold of `consensus`, ascending
  std::size_t iterations = 0;        // non-degenerate samples evaluated
};

using PlaneFit = RansacResult<PlaneModel>;
using LineFit = RansacResult<LineModel>;

// Called once per evaluated sample with (iteration, candidate, inlier count).
template <class Model>
using RansacObserver = std::function<void(std::size_t, const Model&, std::size_t)>;

namespace detail {

struct Moments {
  Point3 centroid;
  Eigen::Matrix3d covariance;  // population
};

inline Moments moments(std::span<const Point3> pts, std::span<const std::size_t> idx) {
  Moments m{Point3::Zero(), Eigen::Matrix3d::Zero()};
  for (std::size_t i : idx) m.centroid += pts[i];
  m.centroid /= static_cast<double>(idx.size());
  for (std::size_t i : idx) {
    const Eigen::Vector3d d = pts[i] - m.centroid;
    m.covariance += d * d.transpose();
  }
  m.covariance /= static_cast<double>(idx.size());
  return m;
}

// Draws `count` distinct indices in [0, n).
inline void draw_distinct(Rng& rng, std::size_t n, std::size_t count, std::vector<std::size_t>& out) {
  out.clear();
  while (out.size() < count) {
    const auto i = static_cast<std::size_t>(rng.index(n));
    if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
  }
}

inline bool plane_through(std::span<const Point3> pts, std::span<const std::size_t> sample, PlaneModel& out) {
  if (sample.size() == 3) {
    const Eigen::Vector3d u = pts[sample[1]] - pts[sample[0]];
    const Eigen::Vector3d v = pts[sample[2]] - pts[sample[0]];
    const Eigen::Vector3d n = u.cross(v);
    const double norm = n.norm();
    if (!(norm > 1e-12 * u.norm() * v.norm()) || norm == 0.0) return false;
    out.normal = n / norm;
    out.offset = -out.normal.dot(pts[sample[0]]);
    return true;
  }
  const Moments m = moments(pts, sample);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.covariance);
  if (!(es.eigenvalues()(1) > 1e-12 * es.eigenvalues()(2))) return false;
  out.normal = es.eigenvectors().col(0).normalized();
  out.offset = -out.normal.dot(m.centroid);
  return true;
}

template <class Model, class Fit, class Dist>
RansacResult<Model> ransac(std::span<const Point3> pts, std::size_t sample_size, double threshold,
                           std::size_t iterations, std::uint64_t seed, Fit fit, Dist dist,
                           const RansacObserver<Model>& observer) {
  Rng rng(seed);
  RansacResult<Model> best;
  std::size_t best_count = 0;
  bool found = false;
  std::vector<std::size_t> sample;
  // Degenerate draws do not consume iterations; cap the total so an
  // all-degenerate input terminates.
  const std::size_t max_draws = iterations * 100;
  std::size_t draws = 0;
  while (best.iterations < iterations && draws < max_draws) {
    ++draws;
    draw_distinct(rng, pts.size(), sample_size, sample);
    Model candidate;
    if (!fit(sample, candidate)) continue;
    std::size_t count = 0;
    for (const auto& p : pts) count += dist(candidate, p) <= threshold ? 1 : 0;
    if (observer) observer(best.iterations, candidate, count);
    ++best.iterations;
    if (!found || count > best_count) {
      found = true;
      best_count = count;
      best.consensus = candidate;
    }
  }
  if (!found) throw FitError("every sampled point set was degenerate");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (dist(best.consensus, pts[i]) <= threshold) best.inliers.push_back(i);
  }
  return best;
}

}  // namespace detail

// RANSAC plane detection. Samples `sample_size` distinct points per
// iteration from a seeded generator, keeps the candidate with the most points
// within `threshold` (earliest wins a tie) and refits it by least squares.
inline PlaneFit ransac_plane(std::span<const Point3> pts, double threshold, std::size_t iterations, std::uint64_t seed,
                             std::size_t sample_size = 3, const RansacObserver<PlaneModel>& observer = {}) {
  if (!(threshold > 0.0)) throw ParameterError("distance threshold must be > 0");
  if (iterations < 1) throw ParameterError("iterations must be >= 1");
  if (sample_size < 3) throw ParameterError("plane samples must be >= 3");
  if (pts.size() < sample_size) throw FitError("too few points for a plane");

  auto fit = [&](std::span<const std::size_t> s, PlaneModel& m) { return detail::plane_through(pts, s, m); };
  auto dist = [](const PlaneModel& m, const Point3& p) { return m.distance(p); };
  PlaneFit r = detail::ransac<PlaneModel>(pts, sample_size, threshold, iterations, seed, fit, dist, observer);

  r.model = r.consensus;
  if (r.inliers.size() >= 3) {
    const auto m = detail::moments(pts, r.inliers);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.covariance);
    if (es.eigenvalues()(1) > 1e-12 * es.eigenvalues()(2)) {
      Eigen::Vector3d n = es.eigenvectors().col(0).normalized();
      if (n.dot(r.consensus.normal) < 0) n = -n;
      r.model.normal = n;
      r.model.offset = -n.dot(m.centroid);
    }
  }
  return r;
}

// RANSAC line detection with 2-point samples; see ransac_plane.
inline LineFit ransac_line(std::span<const Point3> pts, double threshold, std::size_t iterations, std::uint64_t seed,
                           const RansacObserver<LineModel>& observer = {}) {
  if (!(threshold > 0.0)) throw ParameterError("distance threshold must be > 0");
  if (iterations < 1) throw ParameterError("iterations must be >= 1");
  if (pts.size() < 2) throw FitError("too few points for a line");

  auto fit = [&](std::span<const std::size_t> s, LineModel& m) {
    const Eigen::Vector3d d = pts[s[1]] - pts[s[0]];
    const double norm = d.norm();
    if (!(norm > 0.0)) return false;
    m.origin = pts[s[0]];
    m.direction = d / norm;
    return true;
  };
  auto dist = [](const LineModel& m, const Point3& p) { return m.distance(p); };
  LineFit r = detail::ransac<LineModel>(pts, 2, threshold, iterations, seed, fit, dist, observer);

  r.model = r.consensus;
  if (r.inliers.size() >= 2) {
    const auto m = detail::moments(pts, r.inliers);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.covariance);
    if (es.eigenvalues()(2) > 0.0) {
      Eigen::Vector3d u = es.eigenvectors().col(2).normalized();
      if (u.dot(r.consensus.direction) < 0) u = -u;
      r.model.origin = m.centroid;
      r.model.direction = u;
    }
  }
  return r;
}

inline LineFit ransac_line(const PointCloud& cloud, double threshold, std::size_t iterations, std::uint64_t seed) {
  return ransac_line(std::span<const Point3>(cloud.points), threshold, iterations, seed);
}

inline PlaneFit ransac_plane(const PointCloud& cloud, double threshold, std::size_t iterations, std::uint64_t seed) {
  return ransac_plane(std::span<const Point3>(cloud.points), threshold, iterations, seed);
}

// Principal frame of a point set: origin at the centroid, axes along the
// covariance eigenvectors by descending eigenvalue. Signs are fixed so that
// a1 points up (+Z; +X when horizontal), a2 points along +X (+Y when
// perpendicular to X), and a3 = a1 x a2.
inline Frame pca_frame(std::span<const Point3> pts) {
  if (pts.size() < 3) throw FitError("degenerate geometry: fewer than 3 points");
  std::vector<std::size_t> all(pts.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto m = detail::moments(pts, all);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.covariance);
  const Eigen::Vector3d ev = es.eigenvalues();
  if (!(ev(2) > 0.0) || ev(1) / ev(2) < 1e-12) throw FitError("degenerate geometry: points are collinear or coincident");

  constexpr double kTie = 1e-12;
  Eigen::Vector3d a1 = es.eigenvectors().col(2).normalized();
  Eigen::Vector3d a2 = es.eigenvectors().col(1).normalized();
  if (a1.z() < -kTie || (std::abs(a1.z()) <= kTie && a1.x() < 0)) a1 = -a1;
  if (a2.x() < -kTie || (std::abs(a2.x()) <= kTie && a2.y() < 0)) a2 = -a2;

  Frame f;
  f.origin = m.centroid;
  f.axes = {a1, a2, a1.cross(a2).normalized()};
  return f;
}

inline Frame pca_frame(const PointCloud& cloud) { return pca_frame(std::span<const Point3>(cloud.points)); }

inline PointCloud transform_to_frame(const PointCloud& cloud, const Frame& frame) {
  PointCloud out;
  out.colors = cloud.colors;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(frame.to_local(p));
  return out;
}

struct StudFrame {
  Frame frame;
  PlaneFit studs_plane;                 // front surface of all studs
  LineFit single_stud;                  // line through one stud, indices into the plane inliers
  std::vector<std::size_t> stud_inliers;  // indices into the input cloud
};

// Largest plane = front surface of all studs; the best line inside it = one
// stud's front surface; its principal frame orients the whole wall.
inline StudFrame detect_stud_frame(const PointCloud& cloud, const PipelineConfig& cfg) {
  StudFrame out;
  out.studs_plane = ransac_plane(std::span<const Point3>(cloud.points), cfg.ransac_distance, cfg.ransac_iterations,
                                 mix_seed(cfg.rng_seed, 1), cfg.ransac_samples);
  if (out.studs_plane.inliers.size() < std::max<std::size_t>(cfg.min_plane_inliers, 3))
    throw FitError("no stud plane found: best plane has " + std::to_string(out.studs_plane.inliers.size()) + " points");
  out.stud_inliers = out.studs_plane.inliers;

  const PointCloud studs = select(cloud, out.stud_inliers);
  out.single_stud = ransac_line(std::span<const Point3>(studs.points), cfg.ransac_distance, cfg.ransac_iterations,
                                mix_seed(cfg.rng_seed, 2));
  const PointCloud one = select(studs, out.single_stud.inliers);
  out.frame = pca_frame(one);
  return out;
}

}  // namespace formwork
