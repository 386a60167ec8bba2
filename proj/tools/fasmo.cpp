// Command-line front end: run scenarios to CSV/SVG, compare observer
// variants, list the built-in presets.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fasmo/comparison.hpp"
#include "fasmo/config.hpp"
#include "fasmo/svg.hpp"
#include "fasmo/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<int> plot_channels(const fasmo::RunConfig& rc) {
  if (!rc.output.channels.empty()) return rc.output.channels;
  std::vector<int> all;
  for (int i = 1; i <= rc.scenario.system.dimension(); ++i) all.push_back(i);
  return all;
}

void write_plots(const fasmo::RunConfig& rc, const fasmo::SimulationTrace& trace,
                 const fs::path& out_dir) {
  for (int c : plot_channels(rc)) {
    const std::string zc = "z" + std::to_string(c);
    const fasmo::SvgSeries series[] = {
        {zc, "blue", trace.times, trace.z[c - 1]},
        {"zhat" + std::to_string(c), "red", trace.times, trace.z_hat[c - 1]},
    };
    const fs::path path = out_dir / (rc.name + "_" + zc + ".svg");
    fasmo::write_line_chart_svg(path, rc.name + ": " + zc + " and its estimate", "t [s]", zc,
                                series);
    std::cout << "wrote " << path.string() << "\n";
  }
  if (trace.adaptive) {
    const fasmo::SvgSeries series[] = {{"gamma", "green", trace.times, trace.gamma}};
    const fs::path path = out_dir / (rc.name + "_gamma.svg");
    fasmo::write_line_chart_svg(path, rc.name + ": adaptive exponent", "t [s]", "gamma", series);
    std::cout << "wrote " << path.string() << "\n";
  }
}

int cmd_simulate(const std::string& config_spec, const fs::path& out_dir, bool plot,
                 int stride_override) {
  fasmo::RunConfig rc = fasmo::load_run_config(config_spec);
  if (stride_override > 0) rc.scenario.record_stride = stride_override;
  if (plot) rc.output.plot = true;

  const fasmo::SimulationTrace trace = fasmo::run(rc.scenario);
  const fs::path csv_path = out_dir / (rc.name + ".csv");
  fasmo::write_trace_csv(trace, csv_path);
  std::cout << "wrote " << csv_path.string() << " (" << trace.rows() << " rows)\n";
  if (rc.output.plot) write_plots(rc, trace, out_dir);
  return 0;
}

int cmd_compare(const std::vector<std::string>& config_specs, const fs::path& out_dir,
                int stride_override) {
  std::vector<fasmo::RunConfig> configs;
  for (const auto& spec : config_specs) configs.push_back(fasmo::load_run_config(spec));
  for (std::size_t i = 1; i < configs.size(); ++i) {
    const auto diffs = fasmo::comparison_incompatibilities(configs[0], configs[i]);
    if (!diffs.empty()) {
      std::string fields;
      for (const auto& d : diffs) fields += (fields.empty() ? "" : ", ") + d;
      throw fasmo::ConfigError("configs '" + configs[0].name + "' and '" + configs[i].name +
                               "' are not comparable; differing fields: " + fields);
    }
  }
  std::vector<fasmo::Scenario> scenarios;
  for (auto& rc : configs) {
    if (stride_override > 0) rc.scenario.record_stride = stride_override;
    scenarios.push_back(rc.scenario);
  }
  const auto results = fasmo::run_comparison(scenarios);
  std::vector<fasmo::ComparisonRow> rows;
  for (std::size_t i = 0; i < results.size(); ++i) {
    rows.push_back({configs[i].name, fasmo::to_string(configs[i].scenario.observer.variant),
                    results[i].metrics});
  }
  std::cout << fasmo::comparison_to_text(rows);
  const fs::path csv_path = out_dir / "comparison.csv";
  fasmo::write_file_atomic(csv_path, fasmo::comparison_to_csv(rows));
  std::cout << "wrote " << csv_path.string() << "\n";
  return 0;
}

int cmd_presets() {
  for (const auto& name : fasmo::run_preset_names()) {
    std::cout << name << "\n" << fasmo::preset_run_config_json(name).dump(2) << "\n\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-mode observer simulation toolkit: sign-based super-twisting, "
               "fuzzy, and adaptive-exponent variants on triangular systems"};
  app.require_subcommand(1);

  std::string config_spec;
  std::vector<std::string> config_specs;
  std::string out_dir = ".";
  bool plot = false;
  int stride = 0;

  auto* sim = app.add_subcommand("simulate", "run one scenario and write its trace CSV");
  sim->add_option("--config", config_spec, "config file path or inline JSON")->required();
  sim->add_option("--out-dir", out_dir, "output directory (default .)");
  sim->add_flag("--plot", plot, "also write truth/estimate SVG charts");
  sim->add_option("--stride", stride, "override the recording stride");

  auto* cmp = app.add_subcommand("compare",
                                 "run several configs on the same plant and tabulate metrics");
  cmp->add_option("--config", config_specs, "config file path or inline JSON (repeatable)")
      ->required()
      ->expected(-2);
  cmp->add_option("--out-dir", out_dir, "output directory (default .)");
  cmp->add_option("--stride", stride, "override the recording stride for every run");

  auto* pre = app.add_subcommand("presets", "list built-in presets with expanded parameters");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_spec, out_dir, plot, stride);
    if (cmp->parsed()) return cmd_compare(config_specs, out_dir, stride);
    if (pre->parsed()) return cmd_presets();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
