#pragma once

// File formats: ASCII PLY clouds, JSON pipeline config, JSON reference
// measurements and JSON/CSV spacing reports.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cloud.hpp"
#include "config.hpp"
#include "error.hpp"
#include "spacing.hpp"

namespace formwork {

// ---------------------------------------------------------------------------
// PLY

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

inline bool is_float_type(const std::string& t) {
  return t == "float" || t == "double" || t == "float32" || t == "float64";
}

inline bool is_uchar_type(const std::string& t) { return t == "uchar" || t == "uint8"; }

inline double parse_number(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid number '" + tok + "'", line);
  }
  if (used != tok.size()) throw ParseError("invalid number '" + tok + "'", line);
  return v;
}

}  // namespace detail

// Reads an ASCII PLY 1.0 file: element `vertex` with float x, y, z and
// optional uchar red, green, blue. Other vertex properties are ignored and
// elements after `vertex` are skipped.
inline PointCloud read_ply(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "ply") throw ParseError("missing 'ply' magic", lineno ? lineno : 1);
  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> props;
  };
  std::vector<Element> elements;
  bool ascii = false;
  for (;;) {
    if (!next_line()) throw ParseError("unexpected end of file in header", lineno + 1);
    const auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() != 3 || tok[1] != "ascii" || tok[2] != "1.0")
        throw ParseError("only 'format ascii 1.0' is supported", lineno);
      ascii = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError("malformed element line", lineno);
      Element e{tok[1], 0, {}};
      std::size_t used = 0;
      try {
        e.count = std::stoul(tok[2], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != tok[2].size()) throw ParseError("malformed element count", lineno);
      elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (elements.empty()) throw ParseError("property before any element", lineno);
      if (tok.size() == 5 && tok[1] == "list") {
        if (elements.back().name == "vertex") throw ParseError("list properties on vertex are not supported", lineno);
        elements.back().props.push_back("list");
      } else if (tok.size() == 3) {
        if (elements.back().name == "vertex") {
          const bool xyz = tok[2] == "x" || tok[2] == "y" || tok[2] == "z";
          const bool rgb = tok[2] == "red" || tok[2] == "green" || tok[2] == "blue";
          if (xyz && !detail::is_float_type(tok[1])) throw ParseError("coordinate " + tok[2] + " must be float", lineno);
          if (rgb && !detail::is_uchar_type(tok[1])) throw ParseError("color " + tok[2] + " must be uchar", lineno);
        }
        elements.back().props.push_back(tok[2]);
      } else {
        throw ParseError("malformed property line", lineno);
      }
    } else {
      throw ParseError("unknown header keyword '" + tok[0] + "'", lineno);
    }
  }
  if (!ascii) throw ParseError("missing format line", lineno);

  PointCloud cloud;
  for (const auto& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t i = 0; i < e.count; ++i)
        if (!next_line()) throw ParseError("expected " + std::to_string(e.count) + " " + e.name + " records", lineno + 1);
      continue;
    }
    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
    for (int p = 0; p < static_cast<int>(e.props.size()); ++p) {
      const auto& n = e.props[static_cast<std::size_t>(p)];
      if (n == "x") ix = p;
      if (n == "y") iy = p;
      if (n == "z") iz = p;
      if (n == "red") ir = p;
      if (n == "green") ig = p;
      if (n == "blue") ib = p;
    }
    if (ix < 0 || iy < 0 || iz < 0) throw ParseError("vertex element lacks x, y or z", lineno);
    const bool color = ir >= 0 && ig >= 0 && ib >= 0;
    cloud.points.reserve(e.count);
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!next_line())
        throw ParseError("expected " + std::to_string(e.count) + " vertices, found " + std::to_string(i), lineno + 1);
      const auto tok = detail::split_ws(line);
      if (tok.size() != e.props.size())
        throw ParseError("expected " + std::to_string(e.props.size()) + " values, found " + std::to_string(tok.size()),
                         lineno);
      const Point3 p(detail::parse_number(tok[static_cast<std::size_t>(ix)], lineno),
                     detail::parse_number(tok[static_cast<std::size_t>(iy)], lineno),
                     detail::parse_number(tok[static_cast<std::size_t>(iz)], lineno));
      if (!is_finite(p)) throw ParseError("non-finite coordinate", lineno);
      if (color) {
        auto channel = [&](int k) {
          const double v = detail::parse_number(tok[static_cast<std::size_t>(k)], lineno);
          if (!(v >= 0 && v <= 255) || v != std::floor(v)) throw ParseError("color value out of range", lineno);
          return static_cast<std::uint8_t>(v);
        };
        cloud.push_back(p, Rgb{channel(ir), channel(ig), channel(ib)});
      } else {
        cloud.push_back(p);
      }
    }
  }
  return cloud;
}

inline PointCloud read_ply(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_ply(in);
}

// ASCII PLY with coordinates printed to 6 decimals.
inline void write_ply(const PointCloud& cloud, std::ostream& out) {
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n";
  if (cloud.has_colors()) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";
  char buf[160];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud[i];
    int n = std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f", p.x(), p.y(), p.z());
    out.write(buf, n);
    if (cloud.has_colors()) {
      const auto& c = cloud.colors[i];
      n = std::snprintf(buf, sizeof buf, " %u %u %u", c.r, c.g, c.b);
      out.write(buf, n);
    }
    out.put('\n');
  }
}

inline void write_ply(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_ply(cloud, out);
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Config

namespace detail {

inline nlohmann::json parse_json(std::istream& in, const std::string& what) {
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

inline nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_json(in, path);
}

inline double positive_length(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) throw ValidationError(key, key + " must be a number");
  const double v = j.get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(key, key + " must be > 0");
  return v;
}

inline std::size_t count_at_least(const nlohmann::json& j, const std::string& key, std::size_t min) {
  if (!j.is_number_integer()) throw ValidationError(key, key + " must be an integer");
  if (j.is_number_unsigned() ? j.get<std::uint64_t>() < min : j.get<std::int64_t>() < static_cast<std::int64_t>(min))
    throw ValidationError(key, key + " must be >= " + std::to_string(min));
  return static_cast<std::size_t>(j.get<std::uint64_t>());
}

inline Point3 vec3(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) throw ValidationError(key, key + " must be an array of 3 numbers");
  Point3 p;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) throw ValidationError(key, key + " must be an array of 3 numbers");
    p[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  if (!is_finite(p)) throw ValidationError(key, key + " must be finite");
  return p;
}

}  // namespace detail

// Missing keys take PipelineConfig defaults; crop_box is required.
inline PipelineConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("", "config must be a JSON object");
  PipelineConfig cfg;
  if (!j.contains("crop_box")) throw ValidationError("crop_box", "crop_box is required");
  for (const auto& [key, v] : j.items()) {
    if (key == "crop_box") {
      if (!v.is_object() || !v.contains("min") || !v.contains("max"))
        throw ValidationError("crop_box", "crop_box must have min and max");
      cfg.crop_box.min = detail::vec3(v["min"], "crop_box.min");
      cfg.crop_box.max = detail::vec3(v["max"], "crop_box.max");
      if (!cfg.crop_box.valid()) throw ValidationError("crop_box", "crop_box min must be <= max");
    } else if (key == "crop_keep") {
      const auto s = v.is_string() ? v.get<std::string>() : "";
      if (s != "inside" && s != "outside") throw ValidationError(key, "crop_keep must be \"inside\" or \"outside\"");
      cfg.crop_keep = s == "inside" ? Keep::Inside : Keep::Outside;
    } else if (key == "ground_bin_size") {
      cfg.ground_bin_size = detail::positive_length(v, key);
    } else if (key == "sor_k") {
      cfg.sor_k = detail::count_at_least(v, key, 1);
    } else if (key == "sor_std_ratio") {
      cfg.sor_std_ratio = detail::positive_length(v, key);
    } else if (key == "voxel_size") {
      cfg.voxel_size = detail::positive_length(v, key);
    } else if (key == "ransac_distance") {
      cfg.ransac_distance = detail::positive_length(v, key);
    } else if (key == "ransac_samples") {
      cfg.ransac_samples = detail::count_at_least(v, key, 3);
    } else if (key == "ransac_iterations") {
      cfg.ransac_iterations = detail::count_at_least(v, key, 1);
    } else if (key == "min_plane_inliers") {
      cfg.min_plane_inliers = detail::count_at_least(v, key, 3);
    } else if (key == "dbscan_eps") {
      cfg.dbscan_eps = detail::positive_length(v, key);
    } else if (key == "dbscan_min_points") {
      cfg.dbscan_min_points = detail::count_at_least(v, key, 1);
    } else if (key == "brace_min_length") {
      cfg.brace_min_length = detail::positive_length(v, key);
    } else if (key == "member_bin_size") {
      cfg.member_bin_size = detail::positive_length(v, key);
    } else if (key == "rng_seed") {
      cfg.rng_seed = static_cast<std::uint64_t>(detail::count_at_least(v, key, 0));
    } else {
      throw ValidationError(key, "unknown config key '" + key + "'");
    }
  }
  return cfg;
}

inline PipelineConfig read_config(const std::string& path) { return config_from_json(detail::parse_json_file(path)); }

inline nlohmann::ordered_json config_to_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["crop_box"] = {{"min", {cfg.crop_box.min.x(), cfg.crop_box.min.y(), cfg.crop_box.min.z()}},
                   {"max", {cfg.crop_box.max.x(), cfg.crop_box.max.y(), cfg.crop_box.max.z()}}};
  j["crop_keep"] = cfg.crop_keep == Keep::Inside ? "inside" : "outside";
  j["ground_bin_size"] = cfg.ground_bin_size;
  j["sor_k"] = cfg.sor_k;
  j["sor_std_ratio"] = cfg.sor_std_ratio;
  j["voxel_size"] = cfg.voxel_size;
  j["ransac_distance"] = cfg.ransac_distance;
  j["ransac_samples"] = cfg.ransac_samples;
  j["ransac_iterations"] = cfg.ransac_iterations;
  j["min_plane_inliers"] = cfg.min_plane_inliers;
  j["dbscan_eps"] = cfg.dbscan_eps;
  j["dbscan_min_points"] = cfg.dbscan_min_points;
  j["brace_min_length"] = cfg.brace_min_length;
  j["member_bin_size"] = cfg.member_bin_size;
  j["rng_seed"] = cfg.rng_seed;
  return j;
}

// ---------------------------------------------------------------------------
// References

// Accepts either a reference file
//   {"references": {"stud": [{"label": "Stud 1–Stud 2", "value_mm": 300.0}, ...], ...}}
// or a synthetic ground-truth file, whose "categories.<key>.pairs" entries
// carry {"label", "spacing_mm"}.
inline ReferenceMeasurements references_from_json(const nlohmann::json& j) {
  ReferenceMeasurements refs;
  auto add = [&](const std::string& key, const nlohmann::json& arr, const char* value_key) {
    const MemberCategory cat = [&] {
      try {
        return parse_category(key);
      } catch (const ParameterError& e) {
        throw ValidationError(key, e.what());
      }
    }();
    if (!arr.is_array()) throw ValidationError(key, key + " references must be an array");
    auto& list = refs.by_category[cat];
    for (const auto& r : arr) {
      if (!r.is_object() || !r.contains("label") || !r["label"].is_string() || !r.contains(value_key))
        throw ValidationError(key, std::string("reference entries need label and ") + value_key);
      ReferenceValue v{r["label"].get<std::string>(), detail::positive_length(r[value_key], key + "." + value_key)};
      for (const auto& prev : list)
        if (prev.label == v.label) throw ValidationError(key, "duplicate reference label '" + v.label + "'");
      list.push_back(std::move(v));
    }
  };
  if (j.contains("references")) {
    for (const auto& [key, arr] : j["references"].items()) add(key, arr, "value_mm");
  } else if (j.contains("categories")) {
    for (const auto& [key, cat] : j["categories"].items())
      if (cat.contains("pairs")) add(key, cat["pairs"], "spacing_mm");
  } else {
    throw ValidationError("references", "expected a 'references' or 'categories' object");
  }
  return refs;
}

inline ReferenceMeasurements read_references(const std::string& path) {
  return references_from_json(detail::parse_json_file(path));
}

inline nlohmann::ordered_json references_to_json(const ReferenceMeasurements& refs) {
  nlohmann::ordered_json cats = nlohmann::ordered_json::object();
  for (auto cat : kAllCategories) {
    auto it = refs.by_category.find(cat);
    if (it == refs.by_category.end()) continue;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : it->second) arr.push_back({{"label", r.label}, {"value_mm", r.value_mm}});
    cats[category_key(cat)] = std::move(arr);
  }
  return {{"references", cats}};
}

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { Json, Csv };

// Millimeters and percentages carry two decimals in every report.
inline double round2(double v) {
  const double r = std::round(v * 100.0) / 100.0;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

namespace detail {

inline void put_metrics(nlohmann::ordered_json& j, const ComparisonBlock& b) {
  j["mae_mm"] = round2(b.mae_mm);
  j["mape_pct"] = round2(b.mape_pct);
  j["n"] = b.n;
  j["abs_err_std_mm"] = round2(b.abs_err_std_mm);
}

inline std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", round2(v));
  return buf;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const SpacingReport& report) {
  nlohmann::ordered_json j;
  j["case"] = report.case_label;
  for (const auto& block : report.categories) {
    nlohmann::ordered_json c;
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& p : block.pairs) {
      nlohmann::ordered_json pj;
      pj["label"] = p.label;
      pj["pc_mm"] = round2(p.pc_mm);
      if (p.mt_mm) pj["mt_mm"] = round2(*p.mt_mm);
      pairs.push_back(std::move(pj));
    }
    c["pairs"] = std::move(pairs);
    if (block.metrics) detail::put_metrics(c, *block.metrics);
    j[category_key(block.category)] = std::move(c);
  }
  if (report.all) detail::put_metrics(j, *report.all);
  return j;
}

inline std::string report_to_csv(const SpacingReport& report) {
  std::string out = "category,label,pc_mm,mt_mm,abs_err_mm\n";
  for (const auto& block : report.categories) {
    for (const auto& p : block.pairs) {
      out += category_key(block.category) + "," + p.label + "," + detail::fixed2(p.pc_mm) + ",";
      if (p.mt_mm) out += detail::fixed2(*p.mt_mm) + "," + detail::fixed2(std::abs(p.pc_mm - *p.mt_mm));
      else out += ",";
      out += "\n";
    }
  }
  return out;
}

inline void write_report(const SpacingReport& report, std::ostream& out, ReportFormat format) {
  if (format == ReportFormat::Json) out << report_to_json(report).dump(2) << "\n";
  else out << report_to_csv(report);
}

inline void write_report(const SpacingReport& report, const std::string& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_report(report, out, format);
  if (!out) throw IoError("write failed: " + path);
}

// Measured pairs of a JSON report, in report order. Comparison fields are dropped.
inline std::vector<SpacingResult> results_from_report_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("", "report must be a JSON object");
  std::vector<SpacingResult> out;
  for (auto cat : kAllCategories) {
    const auto key = category_key(cat);
    if (!j.contains(key)) continue;
    const auto& block = j[key];
    if (!block.contains("pairs") || !block["pairs"].is_array()) throw ValidationError(key, key + ".pairs missing");
    for (const auto& p : block["pairs"]) {
      if (!p.contains("label") || !p["label"].is_string() || !p.contains("pc_mm") || !p["pc_mm"].is_number())
        throw ValidationError(key, key + " pairs need label and pc_mm");
      out.push_back({cat, p["label"].get<std::string>(), p["pc_mm"].get<double>(), ordering_axis(cat)});
    }
  }
  return out;
}

inline std::string read_case_label(const nlohmann::json& j) {
  return j.contains("case") && j["case"].is_string() ? j["case"].get<std::string>() : "";
}

}  // namespace formwork
