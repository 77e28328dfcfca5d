#pragma once

#include <cstddef>
#include <cstdint>

#include "cloud.hpp"
#include "preprocess.hpp"

namespace formwork {

// Every tunable of the measurement pipeline. Defaults are the field-tested
// operating point; only the crop box has no sensible default.
struct PipelineConfig {
  Aabb crop_box;
  Keep crop_keep = Keep::Inside;

  double ground_bin_size = 0.05;
  std::size_t sor_k = 100;
  double sor_std_ratio = 1.0;
  double voxel_size = 0.01;

  double ransac_distance = 0.01;
  std::size_t ransac_samples = 3;
  std::size_t ransac_iterations = 1000;
  // Smallest consensus accepted as a member surface (stud / wale plane).
  std::size_t min_plane_inliers = 100;

  double dbscan_eps = 0.05;
  std::size_t dbscan_min_points = 30;
  // Fallback when point counts cannot separate ties from braces: clusters at
  // least this long along their main axis are braces.
  double brace_min_length = 0.5;

  double member_bin_size = 0.02;

  std::uint64_t rng_seed = 0;
};

// SplitMix64 finalizer; derives independent per-step seeds from one config seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace formwork
