// Command-line driver: run one experiment, sweep N for convergence rates, or
// generate / inspect node sets.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slrbf/errors.hpp"
#include "slrbf/experiment.hpp"

namespace {

using slrbf::ExperimentConfig;

// Flag name -> config key. Every flag takes its value as text so the config
// file and the command line share one parser.
struct RunFlag {
  const char* flag;
  const char* key;
  const char* help;
};

const std::vector<RunFlag> kRunFlags = {
    {"--testcase", "testcase", "sbr-cosine | deform-cosine | deform-gauss"},
    {"--method", "method", "global | local | pu"},
    {"--n", "n", "Stencil size (local) or nodes per patch (pu)"},
    {"--a", "a", "Patch multiplicity (pu only)"},
    {"--dt", "dt", "Time step; defaults to the preset for (testcase, N)"},
    {"--tfinal", "tfinal", "Final time"},
    {"--revolutions", "revolutions", "Solid-body revolutions (alternative to --tfinal)"},
    {"--epsilon", "epsilon", "IMQ shape parameter (global); auto when omitted"},
    {"--alpha", "alpha", "Solid-body rotation angle"},
    {"--checkpoint-every", "checkpoint_every", "Steps between CSV rows"},
    {"--out", "out", "Output prefix: writes <out>.csv and <out>.json"},
    {"--nodes-file", "nodes_file", "Load nodes (x y z per line) instead of generating them"},
    {"--patch-centers-file", "patch_centers_file", "Load PU patch centres"},
};

struct FlagValues {
  std::map<std::string, std::string> text;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help = "") {
    opts[key] = app->add_option(flag, text[key], help);
  }

  std::map<std::string, std::string> given() const {
    std::map<std::string, std::string> out;
    for (const auto& [key, opt] : opts) {
      if (opt->count() > 0) out[key] = text.at(key);
    }
    return out;
  }
};

ExperimentConfig build_config(const std::string& config_file, const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> settings;
  if (!config_file.empty()) settings = slrbf::read_config_file(config_file);
  for (const auto& [k, v] : overrides) settings[k] = v;
  ExperimentConfig cfg;
  for (const auto& [k, v] : settings) slrbf::apply_setting(cfg, k, v);
  return cfg;
}

void print_record(const slrbf::DiagnosticsRecord& r) {
  std::printf("t = %.6g  rel_l2 = %.4e  rel_linf = %.4e  mass_error = %.3e  min = %.4g  max = %.4g\n", r.time,
              r.rel_l2, r.rel_linf, r.mass_error, r.field_min, r.field_max);
}

void print_node_stats(const slrbf::NodeSet& nodes) {
  double dmin = INFINITY, dmax = 0.0, norm_err = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    norm_err = std::max(norm_err, std::abs(slrbf::norm(nodes[i]) - 1.0));
    if (nodes.size() < 2) continue;
    const auto nn = nodes.knn(nodes[i], 2);
    const double d = slrbf::distance(nodes[i], nodes[nn[1]]);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  std::printf("N                 %zu\n", nodes.size());
  std::printf("mean spacing h    %.6e\n", nodes.spacing());
  std::printf("min separation    %.6e\n", dmin);
  std::printf("max nn distance   %.6e\n", dmax);
  std::printf("max |norm - 1|    %.3e\n", norm_err);
  if (const auto dup = nodes.find_duplicate()) {
    std::printf("duplicate nodes   %d and %d\n", dup->first, dup->second);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-Lagrangian RBF transport on the sphere"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap on OpenMP worker threads (0 = runtime default)");

  // run
  CLI::App* run = app.add_subcommand("run", "Run one transport experiment");
  std::string run_config;
  FlagValues run_flags;
  run->add_option("--config", run_config, "Flat key=value file; flags override it");
  for (const RunFlag& f : kRunFlags) run_flags.add(run, f.flag, f.key, f.help);
  run_flags.add(run, "--N", "N", "Icosahedral node count 10 f^2 + 2");
  run_flags.add(run, "--level", "level", "Icosahedral bisection level (N = 10 * 4^level + 2)");
  run->add_option("--threads", threads, "Cap on OpenMP worker threads");

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "Convergence sweep over node counts");
  std::string sweep_config;
  FlagValues sweep_flags;
  std::vector<std::size_t> sweep_n;
  std::vector<int> sweep_levels;
  sweep->add_option("--config", sweep_config, "Flat key=value file; flags override it");
  for (const RunFlag& f : kRunFlags) sweep_flags.add(sweep, f.flag, f.key, f.help);
  sweep->add_option("--N", sweep_n, "Node counts (comma separated or repeated)")->delimiter(',');
  sweep->add_option("--level", sweep_levels, "Icosahedral levels (comma separated or repeated)")->delimiter(',');
  sweep->add_option("--threads", threads, "Cap on OpenMP worker threads");

  // nodes
  CLI::App* nodes_cmd = app.add_subcommand("nodes", "Generate or inspect a node set");
  std::size_t nodes_n = 0;
  int nodes_level = -1;
  std::string nodes_in, nodes_out;
  auto* opt_n = nodes_cmd->add_option("--N", nodes_n, "Icosahedral node count 10 f^2 + 2");
  auto* opt_level = nodes_cmd->add_option("--level", nodes_level, "Icosahedral bisection level");
  auto* opt_in = nodes_cmd->add_option("--nodes-file", nodes_in, "Existing node file to inspect");
  opt_n->excludes(opt_level)->excludes(opt_in);
  opt_level->excludes(opt_in);
  nodes_cmd->add_option("--out", nodes_out, "Write the node set here");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*run) {
      const ExperimentConfig cfg = build_config(run_config, run_flags.given());
      const slrbf::ExperimentResult r = slrbf::run_experiment(cfg);
      std::printf("%s / %s  N = %zu  dt = %.6g  steps = %zu\n", slrbf::to_string(cfg.testcase).c_str(),
                  slrbf::to_string(cfg.method).c_str(), r.num_nodes, r.run.sl.dt, r.run.sl.num_steps());
      print_record(r.records.back());
      const auto& t = r.summary["timings"];
      std::printf("timings: build %.3fs  factorize %.3fs  step loop %.3fs\n", t["build"].get<double>(),
                  t["factorize"].get<double>(), t["step_loop"].get<double>());
      if (!cfg.out.empty()) std::printf("wrote %s.csv and %s.json\n", cfg.out.c_str(), cfg.out.c_str());
    } else if (*sweep) {
      const auto given = sweep_flags.given();
      if (sweep_n.empty() == sweep_levels.empty()) {
        throw slrbf::ConfigError("sweep: give either --N or --level (a list)");
      }
      std::vector<ExperimentConfig> configs;
      std::string out;
      auto base = given;
      if (auto it = base.find("out"); it != base.end()) {
        out = it->second;
        base.erase(it);
      }
      for (std::size_t n : sweep_n) {
        auto s = base;
        s["N"] = std::to_string(n);
        configs.push_back(build_config(sweep_config, s));
      }
      for (int l : sweep_levels) {
        auto s = base;
        s["level"] = std::to_string(l);
        configs.push_back(build_config(sweep_config, s));
      }
      const slrbf::ConvergenceResult cr = slrbf::run_convergence(configs, out);
      std::printf("%8s  %12s  %12s\n", "N", "rel_l2", "rel_linf");
      for (const auto& row : cr.rows) std::printf("%8zu  %12.4e  %12.4e\n", row.num_nodes, row.rel_l2, row.rel_linf);
      if (cr.rate_l2) {
        std::printf("fitted rates: l2 %.3f  linf %.3f\n", *cr.rate_l2, *cr.rate_linf);
      } else {
        std::printf("%s\n", cr.notice.c_str());
      }
    } else if (*nodes_cmd) {
      slrbf::NodeSet nodes;
      if (!nodes_in.empty()) {
        nodes = slrbf::load_nodes(nodes_in);
      } else if (nodes_level >= 0) {
        nodes = slrbf::icosahedral_nodes(nodes_level);
      } else if (nodes_n > 0) {
        auto generated = slrbf::icosahedral_nodes_for_count(nodes_n);
        if (!generated) throw slrbf::ConfigError("N: " + std::to_string(nodes_n) + " is not of the form 10 f^2 + 2");
        nodes = std::move(*generated);
      } else {
        throw slrbf::ConfigError("nodes: give --N, --level or --nodes-file");
      }
      print_node_stats(nodes);
      if (!nodes_out.empty()) {
        slrbf::save_nodes(nodes, nodes_out);
        std::printf("wrote %s\n", nodes_out.c_str());
      }
    }
  } catch (const slrbf::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
