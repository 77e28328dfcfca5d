#pragma once

// Command-line driver: synth, measure, compare.
// Exit codes: 0 success, 2 input/validation error, 3 pipeline failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "error.hpp"
#include "io.hpp"
#include "pipeline.hpp"
#include "spacing.hpp"
#include "synth.hpp"

namespace formwork {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitPipeline = 3;

namespace detail {

inline ReportFormat format_for(const std::string& path) {
  return std::filesystem::path(path).extension() == ".csv" ? ReportFormat::Csv : ReportFormat::Json;
}

inline void write_json(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

// Maps library errors onto the exit-code contract.
template <class F>
int guarded(std::ostream& err, F&& f) {
  try {
    f();
    return kExitOk;
  } catch (const PipelineError& e) {
    err << "error: " << e.what() << "\n";
    return kExitPipeline;
  } catch (const FitError& e) {
    err << "error: " << e.what() << "\n";
    return kExitPipeline;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace detail

inline int cmd_synth(const std::string& spec_path, const std::string& cloud_path, const std::string& truth_path,
                     const std::string& config_out = "", std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const SceneSpec spec = read_scene_spec(spec_path);
    const SyntheticScene scene = generate_scene(spec);
    write_ply(scene.cloud, cloud_path);
    detail::write_json(truth_to_json(scene.truth), truth_path);
    if (!config_out.empty()) detail::write_json(config_to_json(suggested_config(scene.truth, spec.seed)), config_out);
  });
}

inline int cmd_measure(const std::string& cloud_path, const std::string& config_path, const std::string& report_path,
                       const std::string& refs_path = "", const std::string& dump_dir = "",
                       std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const PipelineConfig cfg = read_config(config_path);
    const PointCloud cloud = read_ply(cloud_path);
    std::optional<ReferenceMeasurements> refs;
    if (!refs_path.empty()) refs = read_references(refs_path);

    StageSink sink;
    if (!dump_dir.empty()) {
      std::filesystem::create_directories(dump_dir);
      sink = [&](const std::string& stage, const PointCloud& c) {
        write_ply(c, (std::filesystem::path(dump_dir) / (stage + ".ply")).string());
      };
    }
    const PipelineResult result = run_pipeline(cloud, cfg, sink);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";

    const std::string label = std::filesystem::path(cloud_path).stem().string();
    const SpacingReport report = build_report(result.spacings, refs ? &*refs : nullptr, label);
    write_report(report, report_path, detail::format_for(report_path));
  });
}

inline int cmd_compare(const std::string& report_path, const std::string& refs_path, const std::string& out_path,
                       std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const auto j = detail::parse_json_file(report_path);
    const auto results = results_from_report_json(j);
    const ReferenceMeasurements refs = read_references(refs_path);
    const SpacingReport report = build_report(results, &refs, read_case_label(j));
    write_report(report, out_path, detail::format_for(out_path));
  });
}

inline int run_cli(int argc, char** argv, std::ostream& err = std::cerr) {
  CLI::App app{"Formwork member spacing measurement from point clouds"};
  app.require_subcommand(1);

  std::string spec, cloud, truth, config_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic formwork cloud with ground truth");
  synth->add_option("spec", spec, "Scene spec JSON")->required();
  synth->add_option("cloud", cloud, "Output PLY")->required();
  synth->add_option("truth", truth, "Output ground-truth JSON")->required();
  synth->add_option("--config-out", config_out, "Also write a pipeline config with the scene's crop box");

  std::string m_cloud, m_config, m_report, refs, dump;
  auto* measure = app.add_subcommand("measure", "Run the measurement pipeline on a cloud");
  measure->add_option("cloud", m_cloud, "Input PLY")->required();
  measure->add_option("config", m_config, "Pipeline config JSON")->required();
  measure->add_option("report", m_report, "Output report (.json or .csv)")->required();
  measure->add_option("--refs", refs, "Reference measurements (or ground-truth) JSON");
  measure->add_option("--dump-stages", dump, "Directory for per-stage PLY dumps");

  std::string c_report, c_refs, c_out;
  auto* compare_cmd = app.add_subcommand("compare", "Add error metrics to a report");
  compare_cmd->add_option("report", c_report, "Report JSON")->required();
  compare_cmd->add_option("refs", c_refs, "Reference measurements JSON")->required();
  compare_cmd->add_option("out", c_out, "Output report (.json or .csv)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cout, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  if (*synth) return cmd_synth(spec, cloud, truth, config_out, err);
  if (*measure) return cmd_measure(m_cloud, m_config, m_report, refs, dump, err);
  return cmd_compare(c_report, c_refs, c_out, err);
}

}  // namespace formwork
