// Command-line front end: run suites, list them, export spaces and fillings.
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on
// configuration or input errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "hypfill/filling.hpp"
#include "hypfill/harness.hpp"
#include "hypfill/metric_space.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfigError = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cmd_run(const std::string& experiment, const std::string& config_path, std::string out) {
  hypfill::ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? hypfill::default_config(experiment)
                              : hypfill::parse_config(slurp(config_path), experiment);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  if (out.empty()) out = cfg.out_dir.empty() ? "out/" + cfg.experiment : cfg.out_dir;
  hypfill::NormReport report;
  try {
    report = hypfill::run_experiment(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  hypfill::write_report(report, out);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& c : report.checks) {
    std::printf("%s  %s = %.6g %s %.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.relation.c_str(), c.threshold);
  }
  std::printf("%s: %s (%.1f s, config %s) -> %s\n", report.experiment.c_str(), report.pass ? "pass" : "FAIL",
              report.wall_seconds, report.config_hash.c_str(), out.c_str());
  return report.pass ? kPass : kFail;
}

int cmd_list() {
  for (const auto& e : hypfill::list_experiments()) {
    std::printf("%-16s %s\n%-16s   %s\n", e.id.c_str(), e.anchor.c_str(), "", e.description.c_str());
  }
  return kPass;
}

int cmd_space(const std::string& spec, const std::string& path) {
  std::vector<std::string> warnings;
  const hypfill::MetricSpace space = hypfill::make_space(spec);
  const auto reg = hypfill::estimate_regularity(space);
  std::printf("%s: %zu points, dim %zu, exponent %g, resolution %.6g, fitted Q %.4f\n", space.label().c_str(),
              space.size(), space.dim(), space.exponent(), space.resolution(), reg.q);
  if (!path.empty()) hypfill::save_space(space, path);
  return kPass;
}

int cmd_fill(const std::string& spec, int depth, std::uint64_t seed, const std::string& path) {
  const hypfill::MetricSpace space = hypfill::make_space(spec);
  const int usable = hypfill::max_usable_level(space);
  if (depth < 0) depth = usable;
  if (depth > usable) {
    std::cerr << "error: depth " << depth << " exceeds the deepest usable level " << usable << '\n';
    return kConfigError;
  }
  const auto f = hypfill::build_filling(space, depth, seed);
  std::printf("%s: depth %d, %zu vertices, %zu edges, max degree %zu\n", space.label().c_str(), depth,
              f.vertex_count(), f.edge_count(), f.max_degree());
  if (!path.empty()) {
    std::ofstream out(path, std::ios::binary);
    out << hypfill::filling_to_json(f) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path);
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak Sobolev seminorms on hyperbolic fillings"};
  app.require_subcommand(1);

  std::string experiment, config_path, out;
  auto* run = app.add_subcommand("run", "Run an experiment suite");
  run->add_option("--experiment,-e", experiment, "suite id (see `list`)");
  run->add_option("--config,-c", config_path, "JSON config overriding the suite defaults");
  run->add_option("--out,-o", out, "output directory for report.json and report.csv");

  auto* list = app.add_subcommand("list", "List experiment suites");

  std::string spec, export_path;
  auto* space = app.add_subcommand("space", "Build a space and optionally export it");
  space->add_option("--spec,-s", spec, "space descriptor, e.g. square_grid:64")->required();
  space->add_option("--export", export_path, "point-cloud output file");

  std::string fill_space, fill_export;
  int depth = -1;
  std::uint64_t seed = 0;
  auto* fill = app.add_subcommand("fill", "Build a hyperbolic filling and optionally export it");
  fill->add_option("--space,-s", fill_space, "space descriptor")->required();
  fill->add_option("--depth,-n", depth, "filling depth; default the deepest usable level");
  fill->add_option("--seed", seed, "net construction seed");
  fill->add_option("--export", fill_export, "JSON output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*run) {
      if (experiment.empty() && config_path.empty()) {
        std::cerr << "error: run needs --experiment or --config\n";
        return kConfigError;
      }
      return cmd_run(experiment, config_path, out);
    }
    if (*list) return cmd_list();
    if (*space) return cmd_space(spec, export_path);
    if (*fill) return cmd_fill(fill_space, depth, seed, fill_export);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kPass;
}
