#include "slrbf/experiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "slrbf/errors.hpp"
#include "slrbf/interp_global.hpp"
#include "slrbf/interp_local.hpp"
#include "slrbf/interp_pu.hpp"

namespace slrbf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  if (used != text.size()) throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  if (used != text.size()) throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return v;
}

// Deformational-flow step table: dt = 5 / denominator.
struct StepRow {
  std::size_t num_nodes;
  int cosine;
  int gauss;
};

constexpr std::array<StepRow, 6> kLocalSteps{{
    {2562, 20, 20}, {5762, 25, 40}, {10242, 30, 60}, {23042, 35, 80}, {40962, 40, 100}, {92162, 45, 120},
}};

constexpr std::array<StepRow, 10> kGlobalSteps{{
    {3136, 20, 20},  {4096, 20, 40},  {5041, 25, 60},  {6084, 25, 80},   {7744, 30, 100},
    {9025, 35, 120}, {10000, 35, 140}, {11881, 40, 160}, {13689, 40, 180}, {15129, 45, 200},
}};

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json json_real(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json record_json(const DiagnosticsRecord& r) {
  return {{"time", r.time},
          {"rel_l2", json_real(r.rel_l2)},
          {"rel_linf", json_real(r.rel_linf)},
          {"dissipation", json_real(r.dissipation)},
          {"dispersion", json_real(r.dispersion)},
          {"mass_error", json_real(r.mass_error)},
          {"field_min", r.field_min},
          {"field_max", r.field_max}};
}

nlohmann::json kernel_json(const Interpolator& backend) {
  nlohmann::json k;
  if (const auto* g = dynamic_cast<const GlobalInterpolant*>(&backend)) {
    k["kind"] = "imq";
    k["epsilon"] = g->epsilon();
    k["condition_estimate"] = g->condition_estimate();
    k["factorization_attempts"] = g->factorization_attempts();
  } else if (const auto* l = dynamic_cast<const LocalInterpolant*>(&backend)) {
    k["kind"] = "phs";
    k["phs_exponent"] = 2 * l->kernel().phs_order + 1;
    k["sh_degree"] = l->sh().degree;
    k["stencil_size"] = l->stencil_size();
  } else if (const auto* p = dynamic_cast<const PUInterpolant*>(&backend)) {
    k["kind"] = "phs";
    k["phs_exponent"] = 2 * p->kernel().phs_order + 1;
    k["sh_degree"] = p->sh().degree;
    k["nodes_per_patch"] = p->nodes_per_patch();
    k["multiplicity"] = p->multiplicity();
    k["patch_count"] = p->patches().size();
    k["patch_radius"] = p->radius();
  }
  return k;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + path + "' failed");
}

}  // namespace

double parse_duration(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (s.empty()) throw ConfigError("empty duration");
  std::string num = s;
  std::string den;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    num = s.substr(0, slash);
    den = s.substr(slash + 1);
  }
  double value = 1.0;
  if (const auto p = num.find("pi"); p != std::string::npos) {
    if (p + 2 != num.size()) throw ConfigError("cannot parse duration '" + text + "'");
    std::string coef = num.substr(0, p);
    if (!coef.empty() && coef.back() == '*') coef.pop_back();
    value = (coef.empty() ? 1.0 : parse_real("duration", coef)) * std::numbers::pi;
  } else {
    value = parse_real("duration", num);
  }
  if (!den.empty()) {
    const double d = parse_real("duration", den);
    if (d == 0.0) throw ConfigError("duration '" + text + "' divides by zero");
    value /= d;
  }
  return value;
}

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string value = trim(raw_value);
  if (key == "testcase") {
    cfg.testcase = testcase_from_string(value);
  } else if (key == "method") {
    cfg.method = method_from_string(value);
  } else if (key == "N") {
    const long long v = parse_integer(key, value);
    if (v <= 0) throw ConfigError("N: must be positive");
    cfg.num_nodes = static_cast<std::size_t>(v);
  } else if (key == "level") {
    cfg.level = static_cast<int>(parse_integer(key, value));
  } else if (key == "n") {
    cfg.n = static_cast<int>(parse_integer(key, value));
  } else if (key == "a") {
    cfg.a = parse_real(key, value);
  } else if (key == "dt") {
    cfg.dt = parse_duration(value);
  } else if (key == "tfinal" || key == "t_final") {
    cfg.t_final = parse_duration(value);
  } else if (key == "revolutions") {
    cfg.revolutions = static_cast<int>(parse_integer(key, value));
  } else if (key == "epsilon") {
    cfg.epsilon = parse_real(key, value);
  } else if (key == "alpha") {
    cfg.alpha = parse_duration(value);
  } else if (key == "checkpoint_every") {
    const long long v = parse_integer(key, value);
    if (v <= 0) throw ConfigError("checkpoint_every: must be at least 1");
    cfg.checkpoint_every = static_cast<std::size_t>(v);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "nodes_file") {
    cfg.nodes_file = value;
  } else if (key == "patch_centers_file") {
    cfg.patch_centers_file = value;
  } else {
    throw ConfigError("unknown setting '" + raw_key + "'");
  }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config: expected key=value", lineno);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("config: empty key", lineno);
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

void validate(const ExperimentConfig& cfg) {
  const int sources = int(cfg.num_nodes.has_value()) + int(cfg.level.has_value()) + int(!cfg.nodes_file.empty());
  if (sources == 0) throw ConfigError("N: one of N, level or nodes_file is required");
  if (sources > 1) throw ConfigError("N: give only one of N, level and nodes_file");
  if (cfg.level && (*cfg.level < 0 || *cfg.level > kMaxIcosahedralLevel)) {
    throw ConfigError("level: must be in [0, " + std::to_string(kMaxIcosahedralLevel) + "]");
  }
  if (cfg.method == Method::Global) {
    if (cfg.a) throw ConfigError("a: the patch multiplicity does not apply to the global method");
    if (!cfg.patch_centers_file.empty()) {
      throw ConfigError("patch_centers_file: patch centres do not apply to the global method");
    }
  } else {
    if (cfg.epsilon) throw ConfigError("epsilon: the shape parameter only applies to the global method");
    if (cfg.n && *cfg.n <= 0) throw ConfigError("n: must be positive");
  }
  if (cfg.method == Method::Local) {
    if (cfg.a) throw ConfigError("a: the patch multiplicity only applies to the pu method");
    if (!cfg.patch_centers_file.empty()) {
      throw ConfigError("patch_centers_file: patch centres only apply to the pu method");
    }
  }
  if (cfg.a && !(*cfg.a >= 1.5)) throw ConfigError("a: must be at least 1.5");
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw ConfigError("epsilon: must be positive");
  if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("dt: must be positive");
  if (cfg.t_final && !(*cfg.t_final > 0.0)) throw ConfigError("tfinal: must be positive");
  if (cfg.revolutions) {
    if (cfg.testcase != TestCaseName::SolidBodyCosine) {
      throw ConfigError("revolutions: only applies to the solid-body testcase");
    }
    if (cfg.t_final) throw ConfigError("revolutions: give either revolutions or tfinal");
    if (*cfg.revolutions <= 0) throw ConfigError("revolutions: must be positive");
  }
  if (cfg.checkpoint_every == 0) throw ConfigError("checkpoint_every: must be at least 1");
}

std::optional<double> preset_dt(TestCaseName testcase, Method method, std::size_t num_nodes) {
  if (testcase == TestCaseName::SolidBodyCosine) return std::nullopt;
  auto lookup = [&](const auto& table) -> std::optional<double> {
    for (const StepRow& row : table) {
      if (row.num_nodes == num_nodes) return 5.0 / (testcase == TestCaseName::DeformCosine ? row.cosine : row.gauss);
    }
    return std::nullopt;
  };
  return method == Method::Global ? lookup(kGlobalSteps) : lookup(kLocalSteps);
}

NodeSet resolve_nodes(const ExperimentConfig& cfg) {
  if (!cfg.nodes_file.empty()) return load_nodes(cfg.nodes_file);
  if (cfg.level) return icosahedral_nodes(*cfg.level);
  if (cfg.num_nodes) {
    auto nodes = icosahedral_nodes_for_count(*cfg.num_nodes);
    if (!nodes) {
      throw ConfigError("N: " + std::to_string(*cfg.num_nodes) +
                        " is not an icosahedral count 10 f^2 + 2; supply nodes_file instead");
    }
    return std::move(*nodes);
  }
  throw ConfigError("N: one of N, level or nodes_file is required");
}

ResolvedRun resolve_run(const ExperimentConfig& cfg, std::size_t num_nodes) {
  ResolvedRun r;
  r.alpha = cfg.alpha;
  r.sl.method = cfg.method;
  r.sl.n = cfg.n.value_or(31);
  r.sl.a = cfg.a.value_or(2.5);
  r.sl.epsilon = cfg.epsilon;
  r.sl.checkpoint_every = cfg.checkpoint_every;

  if (cfg.dt) {
    r.sl.dt = *cfg.dt;
  } else if (auto p = preset_dt(cfg.testcase, cfg.method, num_nodes)) {
    r.sl.dt = *p;
    r.dt_from_preset = true;
  } else if (cfg.testcase == TestCaseName::SolidBodyCosine) {
    r.sl.dt = std::numbers::pi / 10.0;
    r.dt_from_preset = true;
  } else {
    throw ConfigError("dt: no preset time step for N = " + std::to_string(num_nodes) + "; set dt");
  }

  if (cfg.t_final) {
    r.sl.t_final = *cfg.t_final;
  } else if (cfg.revolutions) {
    r.sl.t_final = 2.0 * std::numbers::pi * *cfg.revolutions;
  } else {
    r.sl.t_final = make_testcase(cfg.testcase, cfg.alpha).t_final_default;
  }
  r.sl.num_steps();
  return r;
}

std::string csv_header() { return "time,rel_l2,rel_linf,dissipation,dispersion,mass_error,field_min,field_max\n"; }

std::string csv_row(const DiagnosticsRecord& r) {
  std::string s = format_real(r.time);
  for (double v : {r.rel_l2, r.rel_linf, r.dissipation, r.dispersion, r.mass_error, r.field_min, r.field_max}) {
    s += ',';
    s += format_real(v);
  }
  s += '\n';
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto t_total = Clock::now();

  auto t0 = Clock::now();
  const NodeSet nodes = resolve_nodes(cfg);
  std::optional<NodeSet> centers;
  if (!cfg.patch_centers_file.empty()) centers = load_nodes(cfg.patch_centers_file);
  const double t_nodes = seconds_since(t0);

  ExperimentResult result;
  result.num_nodes = nodes.size();
  result.run = resolve_run(cfg, nodes.size());
  const SLConfig& sl = result.run.sl;
  const TestCase tc = make_testcase(cfg.testcase, result.run.alpha);

  t0 = Clock::now();
  std::unique_ptr<Interpolator> backend;
  try {
    backend = make_interpolator(sl, nodes, std::move(centers));
  } catch (const Error& e) {
    throw Error(std::string("building the ") + to_string(sl.method) + " interpolant failed: " + e.what());
  }
  const double t_factor = seconds_since(t0);

  std::string csv = csv_header();
  const SLResult run = sl_advect(sl, tc.velocity, nodes, *backend, sample(nodes, tc.initial),
                                 exact_provider(tc, nodes),
                                 [&](std::size_t, double, std::span<const double>, const DiagnosticsRecord& rec) {
                                   csv += csv_row(rec);
                                 });

  result.records = run.records;
  result.field = run.field;

  nlohmann::json config = {
      {"testcase", to_string(cfg.testcase)},
      {"method", to_string(sl.method)},
      {"N", nodes.size()},
      {"dt", sl.dt},
      {"dt_from_preset", result.run.dt_from_preset},
      {"t_final", sl.t_final},
      {"steps", sl.num_steps()},
      {"checkpoint_every", sl.checkpoint_every},
  };
  if (cfg.testcase == TestCaseName::SolidBodyCosine) config["alpha"] = result.run.alpha;
  if (sl.method != Method::Global) config["n"] = sl.n;
  if (sl.method == Method::PU) config["a"] = sl.a;
  if (sl.method == Method::Global) config["epsilon_requested"] = cfg.epsilon ? json_real(*cfg.epsilon) : nullptr;
  config["nodes_source"] = !cfg.nodes_file.empty() ? cfg.nodes_file
                           : cfg.level              ? "icosahedral level " + std::to_string(*cfg.level)
                                                    : std::string("icosahedral");
  if (!cfg.patch_centers_file.empty()) config["patch_centers_file"] = cfg.patch_centers_file;

  nlohmann::json warnings = {{"uncovered_departure_points", backend->fallback_count()}};
  if (sl.method == Method::Global && cfg.n) warnings["ignored"] = {"n"};

  result.summary = {
      {"schema", 1},
      {"config", config},
      {"kernel", kernel_json(*backend)},
      {"final", record_json(run.records.back())},
      {"warnings", warnings},
      {"timings",
       {{"build", t_nodes}, {"factorize", t_factor}, {"step_loop", run.step_seconds}, {"total", seconds_since(t_total)}}},
  };

  if (!cfg.out.empty()) {
    write_text(cfg.out + ".csv", csv);
    write_text(cfg.out + ".json", result.summary.dump(2) + "\n");
  }
  return result;
}

ConvergenceResult summarize_convergence(std::vector<ConvergenceRow> rows) {
  ConvergenceResult cr;
  cr.rows = std::move(rows);
  std::sort(cr.rows.begin(), cr.rows.end(),
            [](const ConvergenceRow& x, const ConvergenceRow& y) { return x.num_nodes < y.num_nodes; });

  const bool at_roundoff = std::any_of(cr.rows.begin(), cr.rows.end(), [](const ConvergenceRow& row) {
    return row.rel_l2 < 1e-13 || row.rel_linf < 1e-13;
  });
  if (at_roundoff) {
    cr.notice = "errors at roundoff level; convergence rate fit skipped";
  } else {
    std::vector<std::pair<double, double>> l2, linf;
    for (const auto& row : cr.rows) {
      l2.emplace_back(static_cast<double>(row.num_nodes), row.rel_l2);
      linf.emplace_back(static_cast<double>(row.num_nodes), row.rel_linf);
    }
    cr.rate_l2 = fit_convergence_rate(l2);
    cr.rate_linf = fit_convergence_rate(linf);
  }
  return cr;
}

ConvergenceResult run_convergence(const std::vector<ExperimentConfig>& sweep, const std::string& out) {
  if (sweep.size() < 3) throw ConfigError("sweep: need at least three node counts");
  ConvergenceResult cr;
  nlohmann::json runs = nlohmann::json::array();
  for (ExperimentConfig cfg : sweep) {
    cfg.out.clear();
    ExperimentResult r = run_experiment(cfg);
    const DiagnosticsRecord& fin = r.records.back();
    if (!fin.has_errors()) throw ConfigError("sweep: no exact solution at the final time");
    cr.rows.push_back({r.num_nodes, fin.rel_l2, fin.rel_linf});
    runs.push_back(r.summary);
  }
  cr = summarize_convergence(std::move(cr.rows));

  nlohmann::json table = nlohmann::json::array();
  std::string csv = "N,rel_l2,rel_linf\n";
  for (const auto& row : cr.rows) {
    table.push_back({{"N", row.num_nodes}, {"rel_l2", row.rel_l2}, {"rel_linf", row.rel_linf}});
    csv += std::to_string(row.num_nodes) + ',' + format_real(row.rel_l2) + ',' + format_real(row.rel_linf) + '\n';
  }
  cr.summary = {{"schema", 1},
                {"table", table},
                {"rate_l2", cr.rate_l2 ? nlohmann::json(*cr.rate_l2) : nlohmann::json(nullptr)},
                {"rate_linf", cr.rate_linf ? nlohmann::json(*cr.rate_linf) : nlohmann::json(nullptr)},
                {"runs", runs}};
  if (!cr.notice.empty()) cr.summary["notice"] = cr.notice;

  if (!out.empty()) {
    write_text(out + ".csv", csv);
    write_text(out + ".json", cr.summary.dump(2) + "\n");
  }
  return cr;
}

}  // namespace slrbf
