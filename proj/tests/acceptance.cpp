// Acceptance criteria 1-9. Prints one line per criterion and exits non-zero
// if any of them fails.

#include <formwork/formwork.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "oracles.hpp"

using namespace formwork;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Default wall composition at a given seed; the sub-voxel offset makes every
// seed meet the voxel grid at a different phase.
SceneSpec default_wall(std::uint64_t seed, bool noisy) {
  SceneSpec s;
  s.seed = seed;
  Rng shift(seed * 7 + 3);
  for (int k = 0; k < 3; ++k) s.pose.translation[k] = 0.01 * shift.uniform();
  if (!noisy) {
    s.noise_sigma = 0;
    s.outlier_fraction = 0;
    s.jitter_sigma = 0;
  }
  return s;
}

bool counts_match(const PipelineResult& r, const GroundTruth& gt) {
  for (auto c : kAllCategories)
    if (r.members[c].size() != gt.count(c)) return false;
  return true;
}

const TruthPair* truth_pair(const GroundTruth& gt, const std::string& label) {
  for (const auto& p : gt.pairs)
    if (p.label == label) return &p;
  return nullptr;
}

void criterion_1() {
  std::printf("[INFO] 1 field-data disclaimer: the per-case field values need the original site scans and are not "
              "reproduced; criteria 2-8 substitute for them\n");
}

void criterion_2(int seeds) {
  int correct = 0;
  double err_sum = 0, slowest = 0;
  std::size_t n = 0;
  for (int i = 0; i < seeds; ++i) {
    const auto s = default_wall(static_cast<std::uint64_t>(1000 + i), true);
    const auto scene = generate_scene(s);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto r = run_pipeline(scene.cloud, suggested_config(scene.truth, s.seed));
      slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      if (!counts_match(r, scene.truth)) continue;
      ++correct;
      for (const auto& sp : r.spacings) {
        const auto* t = truth_pair(scene.truth, sp.pair_label);
        if (!t) continue;
        err_sum += std::abs(sp.value_mm - t->spacing_mm);
        ++n;
      }
    } catch (const Error&) {
      slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
  }
  const double pooled = n ? err_sum / static_cast<double>(n) : INFINITY;
  const bool ok = correct >= (seeds * 95 + 99) / 100 && pooled <= 3.5 && slowest <= 60.0;
  report(2, ok, "end-to-end synthetic accuracy",
         fmt("counts exact in %d/%d runs (need >= 95%%), pooled MAE %.3f mm over %zu pairs (need <= 3.5), slowest "
             "run %.1f s (need <= 60)",
             correct, seeds, pooled, n, slowest));
}

void criterion_3(int seeds) {
  int correct = 0;
  double worst = 0;
  for (int i = 0; i < seeds; ++i) {
    const auto s = default_wall(static_cast<std::uint64_t>(2000 + i), false);
    const auto scene = generate_scene(s);
    try {
      const auto r = run_pipeline(scene.cloud, suggested_config(scene.truth, s.seed));
      if (!counts_match(r, scene.truth)) continue;
      ++correct;
      for (const auto& sp : r.spacings) {
        const auto* t = truth_pair(scene.truth, sp.pair_label);
        worst = std::max(worst, t ? std::abs(sp.value_mm - t->design_mm) : INFINITY);
      }
    } catch (const Error&) {
    }
  }
  report(3, correct == seeds && worst <= 1.0, "noise-free exactness",
         fmt("counts exact in %d/%d runs, worst spacing error %.3f mm (need <= 1.0)", correct, seeds, worst));

  // Not part of the criterion: the same scenes turned about the vertical.
  double yaw_worst = 0;
  for (int i = 0; i < 3; ++i) {
    auto s = default_wall(static_cast<std::uint64_t>(2000 + i), false);
    s.pose.yaw_deg = 30;
    const auto scene = generate_scene(s);
    const auto r = run_pipeline(scene.cloud, suggested_config(scene.truth, s.seed));
    for (const auto& sp : r.spacings)
      if (const auto* t = truth_pair(scene.truth, sp.pair_label))
        yaw_worst = std::max(yaw_worst, std::abs(sp.value_mm - t->design_mm));
  }
  std::printf("[INFO] 3 same scenes at 30 deg yaw (grid no longer aligned): worst spacing error %.3f mm\n", yaw_worst);
}

void criterion_4() {
  SceneSpec s;
  s.seed = 4;
  s.studs.count = 12;
  s.braces.positions.clear();
  const auto scene = generate_scene(s);
  bool ok = true;
  std::string detail;
  try {
    const auto r = run_pipeline(scene.cloud, suggested_config(scene.truth, s.seed));
    const auto refs = ground_truth_references(scene.truth);
    const auto rep = build_report(r.spacings, &refs, "ties only");
    std::vector<std::string> ties;
    for (const auto& m : r.members[MemberCategory::Tie]) ties.push_back(m.label());
    const std::vector<std::string> want{"Tie 1_1", "Tie 1_2", "Tie 1_3", "Tie 1_4",
                                        "Tie 2_1", "Tie 2_2", "Tie 2_3", "Tie 2_4"};
    ok = rep.find(MemberCategory::Brace) == nullptr && ties == want &&
         r.members[MemberCategory::Stud].size() == 12 && !report_to_json(rep).contains("brace");
    detail = fmt("%zu studs, %zu wales, ties %s, brace block %s", r.members[MemberCategory::Stud].size(),
                 r.members[MemberCategory::Wale].size(), ties == want ? "labeled 1_1..2_4" : "mislabeled",
                 rep.find(MemberCategory::Brace) ? "present" : "absent");
  } catch (const Error& e) {
    ok = false;
    detail = std::string("error: ") + e.what();
  }
  report(4, ok, "brace-absent robustness", detail);
}

void criterion_5() {
  Rng rng(55);
  // (a) statistical outlier removal
  int sor_ok = 0;
  for (int t = 0; t < 50; ++t) {
    PointCloud c;
    const std::size_t n = 50 + rng.index(951);
    for (std::size_t i = 0; i < n; ++i) c.push_back({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 0.2)});
    for (std::size_t i = 0; i < n / 50; ++i) c.points[rng.index(n)] = Point3(rng.uniform(-3, 3), rng.uniform(-3, 3), 2.0);
    const std::size_t k = 5 + rng.index(30);
    const double ratio = rng.uniform(0.5, 2.0);
    sor_ok += statistical_outlier_removal(c, k, ratio).kept_indices == oracle::sor_kept(c.points, k, ratio);
  }
  // (b) DBSCAN
  int db_ok = 0;
  for (int t = 0; t < 50; ++t) {
    std::vector<Point3> pts;
    const std::size_t n = 20 + rng.index(481);
    const int blobs = 1 + static_cast<int>(rng.index(4));
    for (std::size_t i = 0; i < n; ++i) {
      const double b = static_cast<double>(rng.index(static_cast<std::size_t>(blobs)));
      pts.push_back({b * 0.3 + rng.normal(0, 0.04), rng.normal(0, 0.04), rng.normal(0, 0.01)});
    }
    const double eps = rng.uniform(0.02, 0.06);
    const std::size_t min_pts = 3 + rng.index(15);
    db_ok += dbscan(pts, eps, min_pts) == oracle::dbscan(pts, eps, min_pts);
  }
  // (c) PCA axes against a Jacobi eigendecomposition
  double worst_dot = 1;
  for (int t = 0; t < 50; ++t) {
    std::vector<Point3> pts;
    const Eigen::Matrix3d r =
        Eigen::AngleAxisd(rng.uniform(0, 6.28), Eigen::Vector3d(rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1)).normalized())
            .toRotationMatrix();
    for (int i = 0; i < 400; ++i) pts.push_back(r * Point3(rng.normal(0, 1.0), rng.normal(0, 0.4), rng.normal(0, 0.1)));
    const Frame f = pca_frame(std::span<const Point3>(pts));
    const auto e = oracle::jacobi(oracle::covariance(pts));
    for (int k = 0; k < 3; ++k) worst_dot = std::min(worst_dot, std::abs(f.axes[static_cast<std::size_t>(k)].dot(e.vectors[static_cast<std::size_t>(k)])));
  }
  // (d) metrics
  double worst_rel = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> pc, mt;
    const std::size_t n = 1 + rng.index(40);
    for (std::size_t i = 0; i < n; ++i) {
      mt.push_back(rng.uniform(50, 3000));
      pc.push_back(mt.back() + rng.normal(0, 5));
    }
    const double a = oracle::mae(pc, mt), b = oracle::mape(pc, mt);
    worst_rel = std::max({worst_rel, std::abs(mae(pc, mt) - a) / a, std::abs(mape(pc, mt) - b) / b});
  }
  const bool ok = sor_ok == 50 && db_ok == 50 && worst_dot >= 1 - 1e-9 && worst_rel <= 1e-12;
  report(5, ok, "oracle equivalence",
         fmt("(a) SOR %d/50 exact, (b) DBSCAN %d/50 exact, (c) PCA min |dot| 1-%.1e, (d) metrics max rel err %.1e", sor_ok,
             db_ok, 1 - worst_dot, worst_rel));
}

void criterion_6() {
  Rng rng(66);
  bool ident = true;
  double worst_scale = 0, worst_sum = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x, y;
    const std::size_t n = 1 + rng.index(30);
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(rng.uniform(10, 3000));
      y.push_back(x.back() + rng.normal(0, 10));
    }
    ident &= mae(x, x) == 0.0 && mape(x, x) == 0.0;
    for (double c : {0.5, 2.0, 10.0}) {
      std::vector<double> cx, cy;
      for (std::size_t i = 0; i < n; ++i) {
        cx.push_back(c * y[i]);
        cy.push_back(c * x[i]);
      }
      worst_scale = std::max(worst_scale, std::abs(mape(cx, cy) - mape(y, x)) / std::max(mape(y, x), 1e-300));
    }

    // random member set; consecutive spacings telescope to last - first
    MemberSet set;
    auto add = [&](MemberCategory cat, const std::string& num, double a1, double a2) {
      Member m;
      m.category = cat;
      m.number = num;
      m.mean = {a1, a2, 0};
      set[cat].push_back(m);
    };
    double pos = rng.uniform(-2, 2);
    const std::size_t studs = 2 + rng.index(15);
    for (std::size_t i = 1; i <= studs; ++i, pos += rng.uniform(0.1, 0.6)) add(MemberCategory::Stud, std::to_string(i), rng.normal(0, 1), pos);
    const double w1 = rng.uniform(-1, 0), w2 = w1 + rng.uniform(0.5, 2);
    add(MemberCategory::Wale, "1", w1, rng.normal(0, 1));
    add(MemberCategory::Wale, "2", w2, rng.normal(0, 1));
    for (int g = 1; g <= 2; ++g) {
      double tp = rng.uniform(-2, 2);
      for (int k = 1; k <= 4; ++k, tp += rng.uniform(0.3, 1.2))
        add(MemberCategory::Tie, std::to_string(g) + "_" + std::to_string(k), g == 1 ? w1 : w2, tp);
    }
    const auto res = measure_spacing(set);
    std::map<std::string, double> sums;
    for (const auto& r : res) {
      std::string key = category_name(r.category);
      if (r.category == MemberCategory::Tie) key += r.pair_label.substr(4, 1);
      sums[key] += r.value_mm / 1000.0;
    }
    auto span_of = [&](const std::vector<Member>& ms, int axis) { return ms.back().mean[axis] - ms.front().mean[axis]; };
    worst_sum = std::max(worst_sum, std::abs(sums["Stud"] - span_of(set[MemberCategory::Stud], 1)));
    worst_sum = std::max(worst_sum, std::abs(sums["Wale"] - span_of(set[MemberCategory::Wale], 0)));
    const auto& ties = set[MemberCategory::Tie];
    worst_sum = std::max(worst_sum, std::abs(sums["Tie1"] - (ties[3].mean.y() - ties[0].mean.y())));
    worst_sum = std::max(worst_sum, std::abs(sums["Tie2"] - (ties[7].mean.y() - ties[4].mean.y())));
  }
  report(6, ident && worst_scale <= 1e-12 && worst_sum <= 1e-9, "metric identities",
         fmt("mae(x,x)=mape(x,x)=0 %s, mape scale drift %.1e, telescoping residual %.1e m (need <= 1e-9)",
             ident ? "holds" : "BROKEN", worst_scale, worst_sum));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_7() {
  const fs::path dir = fs::temp_directory_path() / "formwork_acceptance_7";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ostringstream err;
  std::ofstream(dir / "spec.json") << R"({"seed": 77})";
  bool ok = cmd_synth((dir / "spec.json").string(), (dir / "cloud.ply").string(), (dir / "truth.json").string(),
                      (dir / "config.json").string(), err) == kExitOk;
  for (const char* name : {"a.json", "b.json", "a.csv", "b.csv"})
    ok &= cmd_measure((dir / "cloud.ply").string(), (dir / "config.json").string(), (dir / name).string(),
                      (dir / "truth.json").string(), "", err) == kExitOk;
  const bool reports = ok && slurp(dir / "a.json") == slurp(dir / "b.json") && slurp(dir / "a.csv") == slurp(dir / "b.csv") &&
                       !slurp(dir / "a.json").empty();
  fs::remove_all(dir);

  Rng rng(7);
  std::vector<Point3> pts;
  for (int i = 0; i < 3000; ++i) pts.push_back({rng.uniform(0, 2), rng.uniform(0, 2), rng.normal(0, 0.004)});
  for (int i = 0; i < 1000; ++i) pts.push_back({rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2)});
  const auto p1 = ransac_plane(pts, 0.01, 1000, 123), p2 = ransac_plane(pts, 0.01, 1000, 123);
  const auto l1 = ransac_line(pts, 0.01, 1000, 321), l2 = ransac_line(pts, 0.01, 1000, 321);
  const bool models = p1.model.normal == p2.model.normal && p1.model.offset == p2.model.offset && p1.inliers == p2.inliers &&
                      l1.model.origin == l2.model.origin && l1.model.direction == l2.model.direction && l1.inliers == l2.inliers;
  report(7, reports && models, "determinism",
         fmt("repeated measure reports %s; RANSAC plane/line models %s", reports ? "byte-identical" : "DIFFER",
             models ? "identical" : "DIFFER"));
}

void criterion_8() {
  bool ok = true;
  double worst = 0;
  std::string flips;
  for (int i = 0; i < 5; ++i) {
    auto s = default_wall(static_cast<std::uint64_t>(800 + i), false);
    const auto a = generate_scene(s);
    s.mirror = true;
    const auto b = generate_scene(s);
    try {
      const auto ra = run_pipeline(a.cloud, suggested_config(a.truth, s.seed));
      const auto rb = run_pipeline(b.cloud, suggested_config(b.truth, s.seed));
      ok &= ra.axis3_sign == -rb.axis3_sign && ra.spacings.size() == rb.spacings.size();
      flips += fmt(" %+d/%+d", ra.axis3_sign, rb.axis3_sign);
      for (std::size_t k = 0; ok && k < ra.spacings.size(); ++k) {
        ok &= ra.spacings[k].pair_label == rb.spacings[k].pair_label;
        worst = std::max(worst, std::abs(ra.spacings[k].value_mm - rb.spacings[k].value_mm));
      }
    } catch (const Error&) {
      ok = false;
    }
  }
  report(8, ok && worst <= 0.1, "mirror symmetry",
         fmt("axis3 sign original/mirrored:%s; worst spacing difference %.4f mm (need <= 0.1), noise-free scenes",
             flips.c_str(), worst));

  // With noise the consensus samples differ between the two scenes; report the
  // spread for reference.
  double noisy = 0;
  auto s = default_wall(800, true);
  const auto a = generate_scene(s);
  s.mirror = true;
  const auto b = generate_scene(s);
  const auto ra = run_pipeline(a.cloud, suggested_config(a.truth, s.seed));
  const auto rb = run_pipeline(b.cloud, suggested_config(b.truth, s.seed));
  for (std::size_t k = 0; k < std::min(ra.spacings.size(), rb.spacings.size()); ++k)
    noisy = std::max(noisy, std::abs(ra.spacings[k].value_mm - rb.spacings[k].value_mm));
  std::printf("[INFO] 8 noisy scene mirrored: worst spacing difference %.3f mm (RANSAC seed alone moves spacings by a "
              "similar amount)\n",
              noisy);
}

void criterion_9() {
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 10; ++i) {
    SceneSpec s;
    s.seed = static_cast<std::uint64_t>(900 + i);
    s.clutter.present = true;
    s.outlier_fraction = 0;
    const auto scene = generate_scene(s);
    std::size_t clutter = 0, kept_fine = 0, kept_coarse = 0, ground_left = 0;
    const auto fine = remove_ground(scene.cloud, 0.05);
    const auto coarse = remove_ground(scene.cloud, 0.10);
    for (std::size_t k = 0; k < scene.cloud.size(); ++k) {
      const double z = scene.cloud[k].z();
      if (scene.tags[k] == PointTag::Clutter) {
        ++clutter;
        kept_fine += z > fine.ground_level;
        kept_coarse += z > coarse.ground_level;
      }
      if (scene.tags[k] == PointTag::Ground) ground_left += (z > fine.ground_level) + (z > coarse.ground_level);
    }
    ok &= clutter > 0 && kept_fine == clutter && kept_coarse == 0 && ground_left == 0;
    if (i == 0)
      detail = fmt("seed 900: %zu clutter points, %zu kept at bin 0.05, %zu kept at bin 0.10, %zu ground points left",
                   clutter, kept_fine, kept_coarse, ground_left);
  }
  report(9, ok, "ground-clutter bin regression", detail + (ok ? "; same on all 10 seeds" : "; some seed deviates"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int seeds = 100;
  app.add_option("--seeds", seeds, "Seeds for the end-to-end criteria (2, 3)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  criterion_1();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_9();
  criterion_4();
  criterion_8();
  criterion_3(seeds);
  criterion_2(seeds);
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
