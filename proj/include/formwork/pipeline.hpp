#pragma once

// End-to-end measurement: preprocessing, frame recovery, member analysis and
// spacing. Each failure surfaces as a PipelineError naming its step.

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cloud.hpp"
#include "config.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "members.hpp"
#include "preprocess.hpp"
#include "spacing.hpp"

namespace formwork {

// Receives (stage name, cloud) after each stage when stage dumps are wanted.
using StageSink = std::function<void(const std::string&, const PointCloud&)>;

struct PipelineResult {
  MemberSet members;
  std::vector<SpacingResult> spacings;
  PointCloud transformed;  // downsampled cloud in the stud frame
  double ground_level = 0.0;
  int axis3_sign = 0;  // +1 when the wales sit on the positive a3 side of the studs
  std::size_t outliers_removed = 0;
  std::vector<std::string> warnings;
};

namespace detail {

template <class F>
auto run_step(const char* step, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(step, e.what());
  }
}

}  // namespace detail

inline PipelineResult run_pipeline(const PointCloud& raw, const PipelineConfig& cfg, const StageSink& sink = {}) {
  using detail::run_step;
  PipelineResult result;
  auto dump = [&](const char* name, const PointCloud& c) {
    if (sink) sink(name, c);
  };
  dump("01_raw", raw);

  const PointCloud cropped = run_step("pass_through", [&] { return pass_through(raw, cfg.crop_box, cfg.crop_keep); });
  dump("02_cropped", cropped);
  if (cropped.empty()) throw PipelineError("pass_through", "no points inside the crop box");

  const GroundRemoval ground = run_step("remove_ground", [&] { return remove_ground(cropped, cfg.ground_bin_size); });
  result.ground_level = ground.ground_level;
  dump("03_degrounded", ground.cloud);
  if (ground.all_removed)
    throw PipelineError("detect_stud_frame", "no stud plane found: no points remain after remove_ground");

  const OutlierSplit sor = run_step("statistical_outlier_removal", [&] {
    return statistical_outlier_removal(ground.cloud, cfg.sor_k, cfg.sor_std_ratio);
  });
  result.outliers_removed = sor.removed.size();
  dump("04_deoutliered", sor.kept);

  // Voxels go out in grid order so the seeded fits below never depend on the
  // order the scanner wrote the points in.
  const PointCloud down = run_step("voxel_downsample", [&] {
    std::vector<detail::VoxelKey> keys;
    const PointCloud d = voxel_downsample(sor.kept, cfg.voxel_size, std::nullopt, &keys);
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    return select(d, order);
  });
  dump("05_downsampled", down);

  const StudFrame studs = run_step("detect_stud_frame", [&] { return detect_stud_frame(down, cfg); });
  result.transformed = transform_to_frame(down, studs.frame);
  dump("06_transformed", result.transformed);
  const auto& pts = result.transformed.points;

  const std::vector<std::size_t> not_studs = complement(pts.size(), studs.stud_inliers);
  const PointCloud rest = select(result.transformed, not_studs);
  const WaleSegmentation wales = run_step("segment_wales", [&] { return segment_wales(rest, cfg); });
  std::vector<std::size_t> wale_idx, rest_idx;
  for (std::size_t i : wales.inliers) wale_idx.push_back(not_studs[i]);
  for (std::size_t i : wales.remainder) rest_idx.push_back(not_studs[i]);

  const auto stud_pts = detail::gather(pts, studs.stud_inliers);
  const auto wale_pts = detail::gather(pts, wale_idx);
  const int sign = run_step("identify_axis3_direction", [&] { return identify_axis3_direction(stud_pts, wale_pts); });
  result.axis3_sign = sign;

  // The wale plane in frame coordinates: the fitted model lives in `rest`'s
  // coordinates, which are already the frame's.
  const std::vector<std::size_t> candidates =
      beyond_plane(pts, rest_idx, wales.plane.model, sign, cfg.ransac_distance);
  const auto candidate_pts = detail::gather(pts, candidates);
  const auto local_clusters = run_step("cluster_ties_braces", [&] {
    return cluster_ties_braces(candidate_pts, cfg.dbscan_eps, cfg.dbscan_min_points);
  });

  RecognitionInput in;
  in.stud_indices = studs.stud_inliers;
  in.wale_indices = wale_idx;
  for (const auto& c : local_clusters) {
    std::vector<std::size_t> g;
    g.reserve(c.size());
    for (std::size_t i : c) g.push_back(candidates[i]);
    in.clusters.push_back(std::move(g));
  }
  run_step("count_members_by_peaks", [&] {
    in.stud_peaks = count_members_by_peaks(stud_pts, Axis::Principal2, cfg.member_bin_size);
    in.wale_peaks = count_members_by_peaks(wale_pts, Axis::Principal1, cfg.member_bin_size);
    return 0;
  });
  if (in.stud_peaks.count == 0) throw PipelineError("count_members_by_peaks", "no studs identified");
  if (in.wale_peaks.count == 0) throw PipelineError("count_members_by_peaks", "no wales identified");

  if (!in.clusters.empty()) {
    std::vector<std::size_t> sizes;
    for (const auto& c : in.clusters) sizes.push_back(c.size());
    const auto classes = classify_tie_brace(sizes);
    in.cluster_categories = classes.categories;
    if (classes.ill_posed) {
      // Counts alone cannot tell one population from two; fall back on shape.
      std::size_t braces = 0;
      for (std::size_t c = 0; c < in.clusters.size(); ++c) {
        const bool brace = cluster_length(pts, in.clusters[c]) >= cfg.brace_min_length;
        in.cluster_categories[c] = brace ? MemberCategory::Brace : MemberCategory::Tie;
        braces += brace;
      }
      result.warnings.push_back("tie/brace point counts do not separate two groups; classified " +
                                std::to_string(in.clusters.size() - braces) + " ties and " + std::to_string(braces) +
                                " braces by cluster length");
    }
  }

  result.members = run_step("recognize_members", [&] {
    return recognize_members(pts, in, studs.frame, sign, cfg);
  });
  result.members.warnings = result.warnings;

  if (sink) {
    // Segmentation by category, then one color per recognized member.
    PointCloud seg;
    const Rgb palette[4] = {{128, 0, 128}, {0, 160, 0}, {128, 128, 128}, {96, 96, 96}};
    for (auto cat : kAllCategories)
      for (const auto& m : result.members[cat])
        for (std::size_t i : m.indices) seg.push_back(pts[i], palette[static_cast<int>(cat)]);
    dump("07_segmented", seg);
    PointCloud rec;
    std::uint8_t k = 0;
    for (auto cat : kAllCategories) {
      for (const auto& m : result.members[cat]) {
        const Rgb c{static_cast<std::uint8_t>(37 * k + 40), static_cast<std::uint8_t>(91 * k + 80),
                    static_cast<std::uint8_t>(53 * k + 120)};
        for (std::size_t i : m.indices) rec.push_back(pts[i], c);
        ++k;
      }
    }
    dump("08_recognized", rec);
  }

  result.spacings = measure_spacing(result.members);
  return result;
}

}  // namespace formwork
