#pragma once

// Member analysis on a cloud expressed in the stud frame (x/y/z hold a1/a2/a3):
// wale segmentation, stacking direction, tie/brace clustering, counting by
// histogram peaks, tie/brace classification and member numbering.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "cloud.hpp"
#include "config.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "kdtree.hpp"

namespace formwork {

enum class MemberCategory { Stud, Wale, Tie, Brace };

inline constexpr std::array<MemberCategory, 4> kAllCategories{MemberCategory::Stud, MemberCategory::Wale,
                                                              MemberCategory::Tie, MemberCategory::Brace};

// Lower-case key used in reports ("stud").
inline std::string category_key(MemberCategory c) {
  switch (c) {
    case MemberCategory::Stud: return "stud";
    case MemberCategory::Wale: return "wale";
    case MemberCategory::Tie: return "tie";
    case MemberCategory::Brace: return "brace";
  }
  return "";
}

// Display name used in labels ("Stud").
inline std::string category_name(MemberCategory c) {
  std::string s = category_key(c);
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

inline MemberCategory parse_category(const std::string& key) {
  for (auto c : kAllCategories)
    if (category_key(c) == key) return c;
  throw ParameterError("unknown member category '" + key + "'");
}

// Coordinate slot of the axis a category is ordered and spaced along:
// wales along a1, everything else along a2.
constexpr int ordering_axis(MemberCategory c) { return c == MemberCategory::Wale ? 0 : 1; }

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double distance(double v) const { return v < lo ? lo - v : (v > hi ? v - hi : 0.0); }
};

struct Member {
  MemberCategory category = MemberCategory::Stud;
  std::string number;                // "3", or "2_1" for ties
  std::vector<std::size_t> indices;  // into the transformed cloud
  Point3 mean = Point3::Zero();      // mean a1, a2, a3
  std::vector<LineModel> lines;      // one per pole (two for a brace)
  Interval extent;                   // peak interval on the ordering axis (studs, wales)

  std::string label() const { return category_name(category) + " " + number; }
  double position() const { return mean[ordering_axis(category)]; }
};

struct MemberSet {
  std::array<std::vector<Member>, 4> by_category;
  Frame frame;
  int axis3_sign = 1;
  std::vector<std::string> warnings;

  std::vector<Member>& operator[](MemberCategory c) { return by_category[static_cast<std::size_t>(c)]; }
  const std::vector<Member>& operator[](MemberCategory c) const { return by_category[static_cast<std::size_t>(c)]; }
  std::size_t count(MemberCategory c) const { return (*this)[c].size(); }
};

// ---------------------------------------------------------------------------
// Segmentation

struct WaleSegmentation {
  PlaneFit plane;
  std::vector<std::size_t> inliers;    // wale front surface, indices into the input
  std::vector<std::size_t> remainder;  // everything else
};

// Largest plane once the stud fronts are gone = front surface of all wales.
inline WaleSegmentation segment_wales(const PointCloud& cloud_minus_studs, const PipelineConfig& cfg) {
  WaleSegmentation out;
  try {
    out.plane = ransac_plane(std::span<const Point3>(cloud_minus_studs.points), cfg.ransac_distance,
                             cfg.ransac_iterations, mix_seed(cfg.rng_seed, 3), cfg.ransac_samples);
  } catch (const FitError& e) {
    throw FitError(std::string("no wale plane found: ") + e.what());
  }
  if (out.plane.inliers.size() < std::max<std::size_t>(cfg.min_plane_inliers, 3))
    throw FitError("no wale plane found: best plane has " + std::to_string(out.plane.inliers.size()) + " points");
  out.inliers = out.plane.inliers;
  out.remainder = complement(cloud_minus_studs.size(), out.inliers);
  return out;
}

// +1 when members stack toward +a3 (stud fronts below wale fronts on a3).
inline int identify_axis3_direction(std::span<const Point3> stud_points, std::span<const Point3> wale_points) {
  if (stud_points.empty() || wale_points.empty()) throw ParameterError("stud and wale surfaces must be non-empty");
  auto mean3 = [](std::span<const Point3> pts) {
    double s = 0.0;
    for (const auto& p : pts) s += p.z();
    return s / static_cast<double>(pts.size());
  };
  const double stud = mean3(stud_points), wale = mean3(wale_points);
  if (std::abs(stud - wale) <= 1e-6) throw FitError("third-axis direction is ambiguous: stud and wale surfaces coincide");
  return stud < wale ? 1 : -1;
}

// Indices of points strictly more than `margin` past the wale plane on the
// side the members stack toward.
inline std::vector<std::size_t> beyond_plane(std::span<const Point3> pts, std::span<const std::size_t> candidates,
                                             const PlaneModel& plane, int axis3_sign, double margin) {
  const double orient = plane.normal.z() * axis3_sign >= 0 ? 1.0 : -1.0;
  std::vector<std::size_t> out;
  for (std::size_t i : candidates)
    if (orient * plane.signed_distance(pts[i]) > margin) out.push_back(i);
  return out;
}

// Density clustering. A point is core when at least `min_points` points
// (itself included) lie within `eps`. Clusters are the connected components of
// core points; a non-core point within eps of a core point joins the cluster
// of its lowest-index core neighbor; the rest is noise. Each cluster lists its
// indices ascending and clusters are ordered by their lowest index.
inline std::vector<std::vector<std::size_t>> dbscan(std::span<const Point3> pts, double eps, std::size_t min_points) {
  if (!(eps > 0.0)) throw ParameterError("eps must be > 0");
  if (min_points < 1) throw ParameterError("min_points must be >= 1");
  const std::size_t n = pts.size();
  KdTree tree(pts);
  std::vector<std::vector<std::size_t>> nbrs(n);
  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    nbrs[i] = tree.radius(pts[i], eps);
    core[i] = nbrs[i].size() >= min_points;
  }

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(n, kNone);
  std::size_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || label[i] != kNone) continue;
    label[i] = next;
    stack.assign(1, i);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      for (std::size_t q : nbrs[p]) {
        if (core[q] && label[q] == kNone) {
          label[q] = next;
          stack.push_back(q);
        }
      }
    }
    ++next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (std::size_t q : nbrs[i]) {  // ascending, so the first core hit is the lowest index
      if (core[q]) {
        label[i] = label[q];
        break;
      }
    }
  }

  std::vector<std::vector<std::size_t>> clusters(next);
  for (std::size_t i = 0; i < n; ++i)
    if (label[i] != kNone) clusters[label[i]].push_back(i);
  std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return clusters;
}

// Tie/brace candidates (already restricted to the far side of the wales)
// clustered by density.
inline std::vector<std::vector<std::size_t>> cluster_ties_braces(std::span<const Point3> candidates, double eps,
                                                                 std::size_t min_points) {
  return dbscan(candidates, eps, min_points);
}

// ---------------------------------------------------------------------------
// Counting

struct PeakCount {
  std::size_t count = 0;
  std::vector<Interval> intervals;  // coordinate interval of each member run
  AxisHistogram histogram;
  double baseline = 0.0;
};

// Multiple-peak detection: baseline = points / bins over the whole range
// (empty bins included). Every maximal run of bins strictly above the baseline
// is one member.
inline PeakCount count_members_by_peaks(std::span<const Point3> points, Axis axis, double bin_size) {
  PeakCount out;
  out.histogram = axis_histogram(points, axis, bin_size);
  const auto& counts = out.histogram.counts;
  out.baseline = static_cast<double>(points.size()) / static_cast<double>(counts.size());
  std::size_t run_start = 0;
  bool in_run = false;
  for (std::size_t b = 0; b <= counts.size(); ++b) {
    const bool above = b < counts.size() && static_cast<double>(counts[b]) > out.baseline;
    if (above && !in_run) {
      in_run = true;
      run_start = b;
    } else if (!above && in_run) {
      in_run = false;
      out.intervals.push_back({out.histogram.lower_edge(run_start), out.histogram.upper_edge(b - 1)});
    }
  }
  out.count = out.intervals.size();
  return out;
}

struct TieBraceClasses {
  std::vector<MemberCategory> categories;  // parallel to the clusters
  double baseline = 0.0;                   // mean cluster size
  bool ill_posed = false;                  // no cluster below the baseline, or sizes too alike to split
};

// Largest/smallest size ratio under which the clusters look like one population.
inline constexpr double kHomogeneousSizeRatio = 2.0;

// Extent of a cluster along its own main axis.
inline double cluster_length(std::span<const Point3> pts, std::span<const std::size_t> idx) {
  std::vector<Point3> sel;
  sel.reserve(idx.size());
  for (auto i : idx) sel.push_back(pts[i]);
  const Frame f = pca_frame(std::span<const Point3>(sel));
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : sel) {
    const double t = f.to_local(p).x();
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return hi - lo;
}

// Point-number comparison: clusters smaller than the mean cluster size are
// ties, the rest braces.
inline TieBraceClasses classify_tie_brace(std::span<const std::size_t> cluster_sizes) {
  if (cluster_sizes.empty()) throw ParameterError("at least one cluster is required");
  TieBraceClasses out;
  double sum = 0.0;
  for (auto s : cluster_sizes) sum += static_cast<double>(s);
  out.baseline = sum / static_cast<double>(cluster_sizes.size());
  bool any_tie = false;
  const auto [lo, hi] = std::minmax_element(cluster_sizes.begin(), cluster_sizes.end());
  for (auto s : cluster_sizes) {
    const bool tie = static_cast<double>(s) < out.baseline;
    any_tie |= tie;
    out.categories.push_back(tie ? MemberCategory::Tie : MemberCategory::Brace);
  }
  out.ill_posed = !any_tie || static_cast<double>(*hi) < kHomogeneousSizeRatio * static_cast<double>(*lo);
  return out;
}

// ---------------------------------------------------------------------------
// Recognition

struct RecognitionInput {
  std::vector<std::size_t> stud_indices;             // into the transformed cloud
  std::vector<std::size_t> wale_indices;
  std::vector<std::vector<std::size_t>> clusters;    // tie/brace clusters, indices into the transformed cloud
  std::vector<MemberCategory> cluster_categories;    // parallel to clusters
  PeakCount stud_peaks;                              // along a2
  PeakCount wale_peaks;                              // along a1
};

namespace detail {

inline Point3 mean_of(std::span<const Point3> pts, std::span<const std::size_t> idx) {
  Point3 m = Point3::Zero();
  for (std::size_t i : idx) m += pts[i];
  return m / static_cast<double>(idx.size());
}

inline std::vector<Point3> gather(std::span<const Point3> pts, std::span<const std::size_t> idx) {
  std::vector<Point3> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(pts[i]);
  return out;
}

// Splits `indices` among the peak intervals: cell boundaries sit halfway
// through each gap, so every point lands in exactly one member.
inline std::vector<Member> partition_by_peaks(std::span<const Point3> pts, std::span<const std::size_t> indices,
                                              const PeakCount& peaks, MemberCategory category) {
  const int axis = ordering_axis(category);
  std::vector<double> cuts;
  for (std::size_t j = 0; j + 1 < peaks.intervals.size(); ++j)
    cuts.push_back(0.5 * (peaks.intervals[j].hi + peaks.intervals[j + 1].lo));
  std::vector<Member> members(peaks.intervals.size());
  for (std::size_t j = 0; j < members.size(); ++j) {
    members[j].category = category;
    members[j].extent = peaks.intervals[j];
  }
  for (std::size_t i : indices) {
    const auto cell = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), pts[i][axis]) - cuts.begin());
    members[cell].indices.push_back(i);
  }
  return members;
}

inline void number_ascending(std::vector<Member>& members, const std::string& prefix = "") {
  std::stable_sort(members.begin(), members.end(),
                   [](const Member& a, const Member& b) { return a.position() < b.position(); });
  for (std::size_t j = 0; j < members.size(); ++j) members[j].number = prefix + std::to_string(j + 1);
}

}  // namespace detail

// Builds and numbers every member. Means are taken over all points assigned to
// a member; the per-member RANSAC lines are kept for inspection.
inline MemberSet recognize_members(std::span<const Point3> pts, const RecognitionInput& in, const Frame& frame,
                                   int axis3_sign, const PipelineConfig& cfg) {
  MemberSet set;
  set.frame = frame;
  set.axis3_sign = axis3_sign;
  std::uint64_t stream = 100;

  auto finish = [&](Member& m) {
    if (m.indices.empty())
      throw FitError("count/segmentation inconsistency: " + category_key(m.category) + " interval holds no points");
    m.mean = detail::mean_of(pts, m.indices);
    const auto local = detail::gather(pts, m.indices);
    if (local.size() >= 2) {
      try {
        m.lines.push_back(ransac_line(std::span<const Point3>(local), cfg.ransac_distance, cfg.ransac_iterations,
                                      mix_seed(cfg.rng_seed, stream++))
                              .model);
      } catch (const FitError&) {
        // coincident points: no line for this member
      }
    }
  };

  for (auto [cat, idx, peaks] : {std::tuple{MemberCategory::Stud, &in.stud_indices, &in.stud_peaks},
                                 std::tuple{MemberCategory::Wale, &in.wale_indices, &in.wale_peaks}}) {
    auto members = detail::partition_by_peaks(pts, *idx, *peaks, cat);
    for (auto& m : members) finish(m);
    detail::number_ascending(members);
    set[cat] = std::move(members);
  }

  std::vector<Member> braces, ties;
  for (std::size_t c = 0; c < in.clusters.size(); ++c) {
    Member m;
    m.category = in.cluster_categories.at(c);
    m.indices = in.clusters[c];
    if (m.category == MemberCategory::Brace) {
      m.mean = detail::mean_of(pts, m.indices);
      // Two poles: fit one line, drop its inliers, fit the other.
      auto local = detail::gather(pts, m.indices);
      for (int pole = 0; pole < 2 && local.size() >= 2; ++pole) {
        try {
          const auto fit = ransac_line(std::span<const Point3>(local), cfg.ransac_distance, cfg.ransac_iterations,
                                       mix_seed(cfg.rng_seed, stream++));
          m.lines.push_back(fit.model);
          std::vector<Point3> rest;
          auto it = fit.inliers.begin();
          for (std::size_t i = 0; i < local.size(); ++i) {
            if (it != fit.inliers.end() && *it == i) {
              ++it;
              continue;
            }
            rest.push_back(local[i]);
          }
          local = std::move(rest);
        } catch (const FitError&) {
          break;
        }
      }
      braces.push_back(std::move(m));
    } else {
      finish(m);
      ties.push_back(std::move(m));
    }
  }
  detail::number_ascending(braces);
  set[MemberCategory::Brace] = std::move(braces);

  // Ties: group by wale row. Group 1 = ties whose mean a1 falls inside Wale 1;
  // any other tie joins the group of the nearest wale.
  const auto& wales = set[MemberCategory::Wale];
  std::vector<std::vector<Member>> groups(std::max<std::size_t>(wales.size(), 1));
  for (auto& t : ties) {
    std::size_t g = 0;
    if (!wales.empty() && !wales[0].extent.contains(t.mean.x())) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t w = 0; w < wales.size(); ++w) {
        const double d = wales[w].extent.distance(t.mean.x());
        if (d < best) {
          best = d;
          g = w;
        }
      }
    }
    groups[g].push_back(std::move(t));
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    detail::number_ascending(groups[g], std::to_string(g + 1) + "_");
    for (auto& t : groups[g]) set[MemberCategory::Tie].push_back(std::move(t));
  }
  return set;
}

// Tie group of a tie member ("2_3" -> 2).
inline int tie_group(const Member& m) { return std::stoi(m.number.substr(0, m.number.find('_'))); }

}  // namespace formwork
