#pragma once

// Synthetic formwork scenes with exact ground truth.
//
// Scene-local coordinates: u runs along the wall, v is up, w points from the
// panel toward the scanner. Members stack along +w in the fixed order
// panel -> studs -> wales -> ties/braces. Only faces turned toward the scanner
// (+w) are sampled; there is no occlusion. The local frame maps to world as
// x = u, y = w (or -w when mirrored), z = v, followed by the scene pose.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "cloud.hpp"
#include "config.hpp"
#include "error.hpp"
#include "io.hpp"
#include "members.hpp"
#include "rng.hpp"
#include "spacing.hpp"

namespace formwork {

struct SceneSpec {
  struct Studs {
    std::size_t count = 11;
    double spacing = 0.30;  // center to center along u
    double width = 0.10;    // front face, along u
    double depth = 0.10;    // along w
    double height = 3.00;
    double base = 0.05;  // bottom elevation above ground
  } studs;
  struct Wales {
    std::vector<double> elevations{0.80, 2.20};  // center elevations, ascending
    double height = 0.10;
    double depth = 0.10;
    double overhang = 0.15;  // past the outer stud faces
  } wales;
  struct Ties {
    std::size_t rows = 2;                              // one row per wale, from the bottom
    std::vector<double> positions{0.15, 1.05, 1.95, 2.85};  // u of each column
    double plate = 0.12;                               // square plate side
    double standoff = 0.04;                            // plate distance in front of the wale face
  } ties;
  struct Braces {
    std::vector<double> positions{0.60, 2.40};  // u of each brace
    double pole_length = 2.50;                  // main pole
    double inclination_deg = 60.0;              // main pole against the ground
    double kicker_inclination_deg = 30.0;       // kicker shares the main pole's foot
    double diameter = 0.05;
    double foot_height = 0.10;
  } braces;
  struct Panel {
    double width = 3.40;
    double height = 3.10;
    bool sample = false;  // panels are normally cropped away before measuring
  } panel;

  double density = 12000.0;  // points per m^2 of sampled surface
  double noise_sigma = 0.003;
  double outlier_fraction = 0.01;
  double jitter_sigma = 0.005;  // member placement error along its ordering axis

  struct Ground {
    bool present = true;
    double front = 0.30;   // extent past the brace feet along w
    double margin = 0.30;  // extent past the panel ends along u
    double behind = 0.30;  // extent behind the panel along w
  } ground;
  struct Clutter {
    bool present = false;
    double u = -0.40;
    double w = 0.60;
    double size = 0.50;
    double height = 0.07;  // top of the clutter above ground
    double thickness = 0.02;
  } clutter;
  struct Pose {
    double yaw_deg = 0.0, pitch_deg = 0.0, roll_deg = 0.0;
    Point3 translation = Point3::Zero();
  } pose;
  bool mirror = false;  // reflect the scene through the panel plane
  std::uint64_t seed = 1;
};

enum class PointTag : std::uint8_t { Stud, Wale, Tie, Brace, Panel, Ground, Clutter, Outlier };

struct TruthMember {
  MemberCategory category;
  std::string number;
  double position_m;  // on the category's ordering axis, scene-local
};

struct TruthPair {
  MemberCategory category;
  std::string label;
  double spacing_mm;
  double design_mm;  // spacing before placement jitter
};

struct GroundTruth {
  std::vector<TruthMember> members;
  std::vector<TruthPair> pairs;
  Aabb crop_box;  // world box around the formwork, ground included

  std::size_t count(MemberCategory c) const {
    std::size_t n = 0;
    for (const auto& m : members) n += m.category == c;
    return n;
  }
};

struct SyntheticScene {
  PointCloud cloud;
  std::vector<PointTag> tags;  // parallel to cloud.points
  GroundTruth truth;
};

namespace detail {

inline void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ValidationError(key, key + " " + what);
}

}  // namespace detail

inline void validate(const SceneSpec& s) {
  using detail::require;
  require(s.studs.count >= 1, "studs.count", "must be >= 1");
  require(s.studs.spacing > 0, "studs.spacing_m", "must be > 0");
  require(s.studs.width > 0, "studs.width_m", "must be > 0");
  require(s.studs.width < s.studs.spacing, "studs.width_m", "must be < studs.spacing_m");
  require(s.studs.depth > 0, "studs.depth_m", "must be > 0");
  require(s.studs.height > 0, "studs.height_m", "must be > 0");
  require(s.studs.base >= 0, "studs.base_m", "must be >= 0");
  for (std::size_t i = 1; i < s.wales.elevations.size(); ++i)
    require(s.wales.elevations[i] > s.wales.elevations[i - 1], "wales.elevations_m", "must be strictly ascending");
  require(s.wales.height > 0, "wales.height_m", "must be > 0");
  require(s.wales.depth > 0, "wales.depth_m", "must be > 0");
  require(s.wales.overhang >= 0, "wales.overhang_m", "must be >= 0");
  require(s.ties.rows <= s.wales.elevations.size(), "ties.rows", "must not exceed the number of wales");
  for (std::size_t i = 1; i < s.ties.positions.size(); ++i)
    require(s.ties.positions[i] > s.ties.positions[i - 1], "ties.positions_m", "must be strictly ascending");
  require(s.ties.plate > 0, "ties.plate_m", "must be > 0");
  require(s.ties.standoff > 0, "ties.standoff_m", "must be > 0");
  for (std::size_t i = 1; i < s.braces.positions.size(); ++i)
    require(s.braces.positions[i] > s.braces.positions[i - 1], "braces.positions_m", "must be strictly ascending");
  require(s.braces.pole_length > 0, "braces.pole_length_m", "must be > 0");
  require(s.braces.inclination_deg > 0 && s.braces.inclination_deg < 90, "braces.inclination_deg", "must be in (0, 90)");
  require(s.braces.kicker_inclination_deg > 0 && s.braces.kicker_inclination_deg < s.braces.inclination_deg,
          "braces.kicker_inclination_deg", "must be in (0, braces.inclination_deg)");
  require(s.braces.diameter > 0, "braces.diameter_m", "must be > 0");
  require(s.braces.foot_height >= 0, "braces.foot_height_m", "must be >= 0");
  require(s.panel.width > 0, "panel.width_m", "must be > 0");
  require(s.panel.height > 0, "panel.height_m", "must be > 0");
  require(s.density > 0 && std::isfinite(s.density), "density_per_m2", "must be > 0");
  require(s.noise_sigma >= 0, "noise_sigma_m", "must be >= 0");
  require(s.outlier_fraction >= 0 && s.outlier_fraction < 1, "outlier_fraction", "must be in [0, 1)");
  require(s.jitter_sigma >= 0, "jitter_sigma_m", "must be >= 0");
  require(s.ground.front >= 0, "ground.front_m", "must be >= 0");
  require(s.ground.margin >= 0, "ground.margin_m", "must be >= 0");
  require(s.ground.behind >= 0, "ground.behind_m", "must be >= 0");
  require(s.clutter.size > 0, "clutter.size_m", "must be > 0");
  require(s.clutter.height > 0, "clutter.height_m", "must be > 0");
  require(s.clutter.thickness >= 0, "clutter.thickness_m", "must be >= 0");
}

namespace detail {

class SceneSampler {
 public:
  SceneSampler(const SceneSpec& spec, SyntheticScene& scene, Rng& rng) : spec_(spec), scene_(scene), rng_(rng) {}

  // Parallelogram origin + s*e1 + t*e2, s, t in [0, 1], sampled on a raster
  // anchored at the origin corner. Equal members thus carry identical point
  // patterns; randomness comes from noise, jitter and outliers.
  void rect(const Point3& origin, const Eigen::Vector3d& e1, const Eigen::Vector3d& e2, PointTag tag) {
    grid(e1.norm(), e2.norm(), [&](double s, double t) { add(origin + s * e1 + t * e2, tag); });
  }

  // Half of a cylinder's mantle, the half facing +w.
  void half_cylinder(const Point3& a, const Point3& b, double radius, PointTag tag) {
    const Eigen::Vector3d axis = (b - a).normalized();
    const double length = (b - a).norm();
    Eigen::Vector3d facing = Eigen::Vector3d::UnitZ() - axis * axis.z();
    facing.normalize();
    const Eigen::Vector3d side = axis.cross(facing);
    grid(length, std::numbers::pi * radius, [&](double s, double t) {
      const double theta = (t - 0.5) * std::numbers::pi;
      add(a + s * length * axis + radius * (std::cos(theta) * facing + std::sin(theta) * side), tag);
    });
  }

  std::size_t surface_points() const { return scene_.cloud.size(); }

  // Scene-local (u, v, w) is stored here as Eigen (x=u, y=v, z=w); see to_world.
  void add(const Point3& local, PointTag tag) {
    Point3 p = local;
    if (spec_.noise_sigma > 0)
      for (int k = 0; k < 3; ++k) p[k] += rng_.normal(0, spec_.noise_sigma);
    scene_.cloud.push_back(p);
    scene_.tags.push_back(tag);
  }

 private:
  // Calls f(s, t) at the centre of each cell of a grid over [0,1]^2 whose
  // cells have area ~1/density in a len1 x len2 patch.
  template <class F>
  void grid(double len1, double len2, F&& f) {
    const double pitch = 1.0 / std::sqrt(spec_.density);
    const auto cells = [&](double len) { return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(len / pitch))); };
    const std::size_t n1 = cells(len1), n2 = cells(len2);
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) {
        const double s = (static_cast<double>(i) + 0.5) / static_cast<double>(n1);
        const double t = (static_cast<double>(j) + 0.5) / static_cast<double>(n2);
        f(s, t);
      }
  }

  const SceneSpec& spec_;
  SyntheticScene& scene_;
  Rng& rng_;
};

inline Eigen::Matrix3d pose_rotation(const SceneSpec::Pose& pose) {
  const double d = std::numbers::pi / 180.0;
  return (Eigen::AngleAxisd(pose.yaw_deg * d, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(pose.pitch_deg * d, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(pose.roll_deg * d, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

inline Point3 to_world(const SceneSpec& spec, const Eigen::Matrix3d& rot, const Point3& uvw) {
  const Point3 p(uvw.x(), spec.mirror ? -uvw.z() : uvw.z(), uvw.y());
  return rot * p + spec.pose.translation;
}

}  // namespace detail

// Builds the cloud and its ground truth. Deterministic under spec.seed.
inline SyntheticScene generate_scene(const SceneSpec& spec) {
  validate(spec);
  SyntheticScene scene;
  Rng rng(spec.seed);
  detail::SceneSampler sampler(spec, scene, rng);
  using V = Eigen::Vector3d;

  const auto& st = spec.studs;
  const double stud_front = st.depth;
  const double wale_front = st.depth + spec.wales.depth;
  const double first_u = 0.0, last_u = static_cast<double>(st.count - 1) * st.spacing;
  const double wale_u0 = first_u - 0.5 * st.width - spec.wales.overhang;
  const double wale_u1 = last_u + 0.5 * st.width + spec.wales.overhang;

  auto jitter = [&] { return spec.jitter_sigma > 0 ? rng.normal(0, spec.jitter_sigma) : 0.0; };
  auto& truth = scene.truth;
  auto add_members = [&](MemberCategory cat, const std::vector<double>& design, const std::vector<double>& actual,
                         const std::string& prefix) {
    for (std::size_t i = 0; i < actual.size(); ++i) {
      truth.members.push_back({cat, prefix + std::to_string(i + 1), actual[i]});
      if (i == 0) continue;
      const std::string a = category_name(cat) + " " + prefix + std::to_string(i);
      const std::string b = category_name(cat) + " " + prefix + std::to_string(i + 1);
      truth.pairs.push_back({cat, pair_label(a, b), (actual[i] - actual[i - 1]) * 1000.0,
                             (design[i] - design[i - 1]) * 1000.0});
    }
  };

  // Studs (along u).
  std::vector<double> stud_design, stud_u;
  for (std::size_t i = 0; i < st.count; ++i) {
    stud_design.push_back(static_cast<double>(i) * st.spacing);
    stud_u.push_back(stud_design.back() + jitter());
  }
  for (double u : stud_u)
    sampler.rect({u - 0.5 * st.width, st.base, stud_front}, V(st.width, 0, 0), V(0, st.height, 0), PointTag::Stud);
  add_members(MemberCategory::Stud, stud_design, stud_u, "");

  // Wales (along v).
  std::vector<double> wale_v;
  for (double e : spec.wales.elevations) wale_v.push_back(e + jitter());
  for (double v : wale_v)
    sampler.rect({wale_u0, v - 0.5 * spec.wales.height, wale_front}, V(wale_u1 - wale_u0, 0, 0),
                 V(0, spec.wales.height, 0), PointTag::Wale);
  add_members(MemberCategory::Wale, spec.wales.elevations, wale_v, "");

  // Ties: square plates in front of each wale row.
  for (std::size_t r = 0; r < spec.ties.rows; ++r) {
    std::vector<double> u;
    for (double p : spec.ties.positions) u.push_back(p + jitter());
    const double half = 0.5 * spec.ties.plate;
    for (double c : u)
      sampler.rect({c - half, wale_v[r] - half, wale_front + spec.ties.standoff}, V(spec.ties.plate, 0, 0),
                   V(0, spec.ties.plate, 0), PointTag::Tie);
    add_members(MemberCategory::Tie, spec.ties.positions, u, std::to_string(r + 1) + "_");
  }

  // Braces: a main pole and a kicker from the wall down to a shared foot.
  const auto& br = spec.braces;
  const double radius = 0.5 * br.diameter;
  const double deg = std::numbers::pi / 180.0;
  const double reach = br.pole_length * std::cos(br.inclination_deg * deg);
  const double axis_w = wale_front + radius + 0.01;
  std::vector<double> brace_u;
  for (double p : br.positions) brace_u.push_back(p + jitter());
  for (double u : brace_u) {
    const Point3 foot(u, br.foot_height, axis_w + reach);
    const Point3 top(u, br.foot_height + br.pole_length * std::sin(br.inclination_deg * deg), axis_w);
    const Point3 kick(u, br.foot_height + reach * std::tan(br.kicker_inclination_deg * deg), axis_w);
    sampler.half_cylinder(top, foot, radius, PointTag::Brace);
    sampler.half_cylinder(kick, foot, radius, PointTag::Brace);
  }
  add_members(MemberCategory::Brace, br.positions, brace_u, "");

  const double mid_u = 0.5 * (first_u + last_u);
  if (spec.panel.sample)
    sampler.rect({mid_u - 0.5 * spec.panel.width, 0, 0}, V(spec.panel.width, 0, 0), V(0, spec.panel.height, 0),
                 PointTag::Panel);

  // Outliers fill the surface bounding box inflated by 20%.
  const std::size_t surface_n = sampler.surface_points();
  Aabb local_box = surface_n ? bounds(scene.cloud) : Aabb{};

  const double top_v = std::max({st.base + st.height, spec.panel.sample ? spec.panel.height : 0.0,
                                 br.positions.empty() ? 0.0 : br.foot_height + br.pole_length * std::sin(br.inclination_deg * deg)});
  const double far_w = br.positions.empty() ? wale_front + spec.ties.standoff : axis_w + reach + radius;
  const double u_lo = std::min(wale_u0, mid_u - 0.5 * spec.panel.width);
  const double u_hi = std::max(wale_u1, mid_u + 0.5 * spec.panel.width);

  if (spec.ground.present) {
    const double g_u0 = u_lo - spec.ground.margin, g_u1 = u_hi + spec.ground.margin;
    const double g_w0 = -spec.ground.behind, g_w1 = far_w + spec.ground.front;
    sampler.rect({g_u0, 0, g_w0}, V(g_u1 - g_u0, 0, 0), V(0, 0, g_w1 - g_w0), PointTag::Ground);
  }
  if (spec.clutter.present) {
    const auto& c = spec.clutter;
    const std::size_t n = static_cast<std::size_t>(std::llround(c.size * c.size * spec.density));
    for (std::size_t i = 0; i < n; ++i) {
      const double v = c.height - c.thickness * rng.uniform();
      const double u = c.u - 0.5 * c.size + c.size * rng.uniform();
      const double w = c.w - 0.5 * c.size + c.size * rng.uniform();
      sampler.add({u, v, w}, PointTag::Clutter);
    }
  }

  if (spec.outlier_fraction > 0 && surface_n > 0) {
    const Point3 centre = 0.5 * (local_box.min + local_box.max);
    const Point3 half = 0.6 * (local_box.max - local_box.min);
    const auto n = static_cast<std::size_t>(std::llround(spec.outlier_fraction * static_cast<double>(surface_n)));
    for (std::size_t i = 0; i < n; ++i) {
      Point3 p;
      for (int k = 0; k < 3; ++k) p[k] = rng.uniform(centre[k] - half[k], centre[k] + half[k]);
      scene.cloud.push_back(p);
      scene.tags.push_back(PointTag::Outlier);
    }
  }

  const Eigen::Matrix3d rot = detail::pose_rotation(spec.pose);
  for (auto& p : scene.cloud.points) p = detail::to_world(spec, rot, p);

  // Crop suggestion: the formwork footprint with a 0.1 m margin, from 2 cm
  // below the ground to above the tallest member.
  const Point3 lo(u_lo - 0.1, -0.02, std::min(0.0, stud_front) - 0.05);
  const Point3 hi(u_hi + 0.1, top_v + 0.1, far_w + 0.1);
  bool first = true;
  for (int corner = 0; corner < 8; ++corner) {
    const Point3 c((corner & 1) ? hi.x() : lo.x(), (corner & 2) ? hi.y() : lo.y(), (corner & 4) ? hi.z() : lo.z());
    const Point3 w = detail::to_world(spec, rot, c);
    if (first) truth.crop_box = {w, w};
    truth.crop_box.min = truth.crop_box.min.cwiseMin(w);
    truth.crop_box.max = truth.crop_box.max.cwiseMax(w);
    first = false;
  }
  return scene;
}

// Reference measurements labeled exactly as the pipeline labels its pairs.
inline ReferenceMeasurements ground_truth_references(const GroundTruth& gt) {
  ReferenceMeasurements refs;
  for (const auto& p : gt.pairs) refs.by_category[p.category].push_back({p.label, p.spacing_mm});
  return refs;
}

// Pipeline config for a synthetic scene: operating-point defaults plus the
// scene's crop box.
inline PipelineConfig suggested_config(const GroundTruth& gt, std::uint64_t seed = 0) {
  PipelineConfig cfg;
  cfg.crop_box = gt.crop_box;
  cfg.rng_seed = seed;
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json truth_to_json(const GroundTruth& gt) {
  nlohmann::ordered_json cats = nlohmann::ordered_json::object();
  for (auto cat : kAllCategories) {
    nlohmann::ordered_json c;
    c["count"] = gt.count(cat);
    auto members = nlohmann::ordered_json::array();
    for (const auto& m : gt.members)
      if (m.category == cat) members.push_back({{"label", category_name(cat) + " " + m.number}, {"position_m", m.position_m}});
    c["members"] = std::move(members);
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& p : gt.pairs)
      if (p.category == cat)
        pairs.push_back({{"label", p.label}, {"spacing_mm", p.spacing_mm}, {"design_mm", p.design_mm}});
    c["pairs"] = std::move(pairs);
    cats[category_key(cat)] = std::move(c);
  }
  nlohmann::ordered_json j;
  j["categories"] = std::move(cats);
  j["crop_box"] = {{"min", {gt.crop_box.min.x(), gt.crop_box.min.y(), gt.crop_box.min.z()}},
                   {"max", {gt.crop_box.max.x(), gt.crop_box.max.y(), gt.crop_box.max.z()}}};
  j["assumptions"] = "member cross-sections are nominal; only scanner-facing faces are sampled; no occlusion";
  return j;
}

namespace detail {

template <class T>
void read_field(const nlohmann::json& obj, const char* name, const std::string& prefix, T& out) {
  if (!obj.contains(name)) return;
  const std::string key = prefix + name;
  const auto& v = obj[name];
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ValidationError(key, key + " must be a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    if (!v.is_array()) throw ValidationError(key, key + " must be an array of numbers");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) throw ValidationError(key, key + " must be an array of numbers");
      out.push_back(x.get<double>());
    }
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      throw ValidationError(key, key + " must be a non-negative integer");
    out = v.get<T>();
  } else {
    if (!v.is_number()) throw ValidationError(key, key + " must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ValidationError(key, key + " must be finite");
  }
}

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> known, const std::string& prefix) {
  for (const auto& [key, v] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok |= key == k;
    if (!ok) throw ValidationError(prefix + key, "unknown scene spec key '" + prefix + key + "'");
  }
}

inline const nlohmann::json& section(const nlohmann::json& j, const char* name) {
  static const nlohmann::json kEmpty = nlohmann::json::object();
  if (!j.contains(name)) return kEmpty;
  if (!j[name].is_object()) throw ValidationError(name, std::string(name) + " must be an object");
  return j[name];
}

}  // namespace detail

// Missing keys keep the SceneSpec defaults (an eleven-stud, two-wale,
// eight-tie, two-brace wall section).
inline SceneSpec scene_from_json(const nlohmann::json& j) {
  using detail::read_field;
  using detail::section;
  if (!j.is_object()) throw ValidationError("", "scene spec must be a JSON object");
  detail::reject_unknown(j, {"studs", "wales", "ties", "braces", "panel", "density_per_m2", "noise_sigma_m",
                             "outlier_fraction", "jitter_sigma_m", "ground", "clutter", "pose", "mirror", "seed"},
                         "");
  SceneSpec s;
  {
    const auto& o = section(j, "studs");
    detail::reject_unknown(o, {"count", "spacing_m", "width_m", "depth_m", "height_m", "base_m"}, "studs.");
    read_field(o, "count", "studs.", s.studs.count);
    read_field(o, "spacing_m", "studs.", s.studs.spacing);
    read_field(o, "width_m", "studs.", s.studs.width);
    read_field(o, "depth_m", "studs.", s.studs.depth);
    read_field(o, "height_m", "studs.", s.studs.height);
    read_field(o, "base_m", "studs.", s.studs.base);
  }
  {
    const auto& o = section(j, "wales");
    detail::reject_unknown(o, {"elevations_m", "height_m", "depth_m", "overhang_m"}, "wales.");
    read_field(o, "elevations_m", "wales.", s.wales.elevations);
    read_field(o, "height_m", "wales.", s.wales.height);
    read_field(o, "depth_m", "wales.", s.wales.depth);
    read_field(o, "overhang_m", "wales.", s.wales.overhang);
  }
  {
    const auto& o = section(j, "ties");
    detail::reject_unknown(o, {"rows", "positions_m", "plate_m", "standoff_m"}, "ties.");
    read_field(o, "rows", "ties.", s.ties.rows);
    read_field(o, "positions_m", "ties.", s.ties.positions);
    read_field(o, "plate_m", "ties.", s.ties.plate);
    read_field(o, "standoff_m", "ties.", s.ties.standoff);
  }
  {
    const auto& o = section(j, "braces");
    detail::reject_unknown(o, {"positions_m", "pole_length_m", "inclination_deg", "kicker_inclination_deg", "diameter_m", "foot_height_m"}, "braces.");
    read_field(o, "positions_m", "braces.", s.braces.positions);
    read_field(o, "pole_length_m", "braces.", s.braces.pole_length);
    read_field(o, "inclination_deg", "braces.", s.braces.inclination_deg);
    read_field(o, "kicker_inclination_deg", "braces.", s.braces.kicker_inclination_deg);
    read_field(o, "diameter_m", "braces.", s.braces.diameter);
    read_field(o, "foot_height_m", "braces.", s.braces.foot_height);
  }
  {
    const auto& o = section(j, "panel");
    detail::reject_unknown(o, {"width_m", "height_m", "sample"}, "panel.");
    read_field(o, "width_m", "panel.", s.panel.width);
    read_field(o, "height_m", "panel.", s.panel.height);
    read_field(o, "sample", "panel.", s.panel.sample);
  }
  read_field(j, "density_per_m2", "", s.density);
  read_field(j, "noise_sigma_m", "", s.noise_sigma);
  read_field(j, "outlier_fraction", "", s.outlier_fraction);
  read_field(j, "jitter_sigma_m", "", s.jitter_sigma);
  {
    const auto& o = section(j, "ground");
    detail::reject_unknown(o, {"present", "front_m", "margin_m", "behind_m"}, "ground.");
    read_field(o, "present", "ground.", s.ground.present);
    read_field(o, "front_m", "ground.", s.ground.front);
    read_field(o, "margin_m", "ground.", s.ground.margin);
    read_field(o, "behind_m", "ground.", s.ground.behind);
  }
  {
    const auto& o = section(j, "clutter");
    detail::reject_unknown(o, {"present", "u_m", "w_m", "size_m", "height_m", "thickness_m"}, "clutter.");
    read_field(o, "present", "clutter.", s.clutter.present);
    read_field(o, "u_m", "clutter.", s.clutter.u);
    read_field(o, "w_m", "clutter.", s.clutter.w);
    read_field(o, "size_m", "clutter.", s.clutter.size);
    read_field(o, "height_m", "clutter.", s.clutter.height);
    read_field(o, "thickness_m", "clutter.", s.clutter.thickness);
  }
  {
    const auto& o = section(j, "pose");
    detail::reject_unknown(o, {"yaw_deg", "pitch_deg", "roll_deg", "translation_m"}, "pose.");
    read_field(o, "yaw_deg", "pose.", s.pose.yaw_deg);
    read_field(o, "pitch_deg", "pose.", s.pose.pitch_deg);
    read_field(o, "roll_deg", "pose.", s.pose.roll_deg);
    if (o.contains("translation_m")) s.pose.translation = detail::vec3(o["translation_m"], "pose.translation_m");
  }
  read_field(j, "mirror", "", s.mirror);
  read_field(j, "seed", "", s.seed);
  validate(s);
  return s;
}

inline SceneSpec read_scene_spec(const std::string& path) { return scene_from_json(detail::parse_json_file(path)); }

}  // namespace formwork
