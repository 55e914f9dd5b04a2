#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hypfill/families.hpp"
#include "hypfill/sobolev.hpp"

namespace hypfill {

/// Settings for one experiment run. Fields not used by a suite are ignored;
/// `default_config` fills in suite-specific values, and a JSON config file
/// overrides any subset of them.
struct ExperimentConfig {
  std::string experiment;
  std::string space = "square_grid:64";
  std::vector<int> resolutions;            // per-axis grid sizes for refinement sweeps
  int depth = 5;                           // filling depth N; -1 = deepest usable
  std::vector<int> depths;                 // depth sweep
  std::vector<std::uint64_t> seeds = {0};
  double p = 2.0;
  double alpha = 1.0;
  double q = 2.0;                          // Ahlfors dimension of the space
  std::vector<double> p_values;
  std::vector<double> s_values;
  FamilySpec family;
  int vertex_functions = 50;
  HajlaszOptions solver;
  // half-space grids
  std::vector<int> grid_sizes_1d;
  std::vector<int> grid_sizes_2d;
  int levels_1d = 10;
  int levels_2d = 8;
  double box_1d = 8.0;
  double box_2d = 2.0;
  int kernel_grid = 512;                   // 2D grid for the averaging-kernel band
  // halfspace parts to run: "forward", "gradient", "kernels"
  std::vector<std::string> parts;
  std::map<std::string, double> thresholds;
  std::string out_dir;
};

struct ExperimentInfo {
  std::string id;
  std::string anchor;       // the statement the suite exercises
  std::string description;
};

const std::vector<ExperimentInfo>& list_experiments();

/// Suite defaults, including default thresholds. Throws for unknown ids.
ExperimentConfig default_config(const std::string& experiment);

/// Parses a JSON config; keys override `default_config(experiment)`. The
/// experiment id comes from the JSON or, if absent, from `experiment`.
/// Throws std::invalid_argument on unknown keys or illegal values.
ExperimentConfig parse_config(const std::string& json_text, const std::string& experiment = "");

std::string config_to_json(const ExperimentConfig& config);

/// FNV-1a of the canonical config JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct ReportRow {
  std::string function;
  std::string context;   // e.g. "m=64", "N=5", "seed=1"
  std::string quantity;
  double value = 0.0;
};

struct RatioSummary {
  std::string name;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct Trend {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  double slope = 0.0;   // least-squares slope of y against x
};

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;   // "<=", ">=", "<" or ">"
  double threshold = 0.0;
  bool pass = false;
};

struct NormReport {
  std::string experiment;
  std::string config_hash;
  std::map<std::string, std::string> metadata;
  std::map<std::string, double> thresholds;
  std::vector<ReportRow> rows;
  std::vector<RatioSummary> ratios;
  std::vector<Trend> trends;
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
  bool pass = false;
};

/// Runs a suite. Deterministic for a fixed config apart from wall time.
NormReport run_experiment(const ExperimentConfig& config);

/// Per-row CSV; identical configs give identical bytes.
std::string report_csv(const NormReport& report);
std::string report_json(const NormReport& report);

/// Writes report.json and report.csv into `dir`, creating it if needed.
void write_report(const NormReport& report, const std::string& dir);

RatioSummary summarize(const std::string& name, std::vector<double> values);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hypfill
