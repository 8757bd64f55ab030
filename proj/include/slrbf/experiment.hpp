#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slrbf/diagnostics.hpp"
#include "slrbf/testcases.hpp"
#include "slrbf/transport.hpp"

namespace slrbf {

/// One transport run. Unset optionals fall back to presets at resolve time.
struct ExperimentConfig {
  TestCaseName testcase = TestCaseName::SolidBodyCosine;
  Method method = Method::Local;
  std::optional<std::size_t> num_nodes;  // N
  std::optional<int> level;              // icosahedral bisection level
  std::optional<int> n;                  // stencil / patch size
  std::optional<double> a;               // PU multiplicity
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<int> revolutions;        // solid body only
  std::optional<double> epsilon;         // global only
  double alpha = 1.5707963267948966;
  std::size_t checkpoint_every = 1;
  std::string out;                       // output prefix; empty writes nothing
  std::string nodes_file;
  std::string patch_centers_file;
};

/// Parses "pi/10", "2*pi", "5/35", "0.1", "1e-3" and similar.
double parse_duration(const std::string& text);

/// Applies one key=value setting. Keys match the CLI long flags with dashes
/// replaced by underscores (testcase, method, N, level, n, a, dt, tfinal,
/// revolutions, epsilon, alpha, checkpoint_every, out, nodes_file,
/// patch_centers_file). Throws ConfigError naming the key.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value file, '#' comments. Throws ParseError with the line number.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Cross-field checks. Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& cfg);

/// Deformational-flow time step for (testcase, method, N) from the built-in
/// step table, if N is listed.
std::optional<double> preset_dt(TestCaseName testcase, Method method, std::size_t num_nodes);

/// Node set selected by nodes_file, level or N.
NodeSet resolve_nodes(const ExperimentConfig& cfg);

/// Fully resolved run parameters.
struct ResolvedRun {
  SLConfig sl;
  double alpha = 0.0;
  bool dt_from_preset = false;
};
ResolvedRun resolve_run(const ExperimentConfig& cfg, std::size_t num_nodes);

struct ExperimentResult {
  std::size_t num_nodes = 0;
  ResolvedRun run;
  std::vector<DiagnosticsRecord> records;
  std::vector<double> field;
  nlohmann::json summary;
};

/// Builds the nodes and backend, runs the transport and writes
/// <out>.csv (one row per checkpoint) and <out>.json (schema 1) when out is set.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct ConvergenceRow {
  std::size_t num_nodes = 0;
  double rel_l2 = 0.0;
  double rel_linf = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  std::optional<double> rate_l2;
  std::optional<double> rate_linf;
  std::string notice;  // set when the rate fit is skipped
  nlohmann::json summary;
};

/// Sorts rows by N and fits rates, or sets the notice when any error is at
/// roundoff level (below 1e-13).
ConvergenceResult summarize_convergence(std::vector<ConvergenceRow> rows);

/// Runs every config (they should differ only in N) and fits convergence
/// rates. Rates are skipped when any error is at roundoff level. Writes
/// <out>.csv and <out>.json when out is given.
ConvergenceResult run_convergence(const std::vector<ExperimentConfig>& sweep, const std::string& out = {});

/// CSV header and row formatting shared by the writers.
std::string csv_header();
std::string csv_row(const DiagnosticsRecord& r);

}  // namespace slrbf
