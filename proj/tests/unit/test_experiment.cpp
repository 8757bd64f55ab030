#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "slrbf/errors.hpp"
#include "slrbf/experiment.hpp"
#include "slrbf/interp_pu.hpp"

using namespace slrbf;

namespace {

constexpr double kPi = std::numbers::pi;

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string config_error(const ExperimentConfig& cfg) {
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

ExperimentConfig with(std::initializer_list<std::pair<std::string, std::string>> kv) {
  ExperimentConfig cfg;
  for (const auto& [k, v] : kv) apply_setting(cfg, k, v);
  return cfg;
}

}  // namespace

TEST_CASE("durations") {
  CHECK(parse_duration("pi/10") == doctest::Approx(kPi / 10).epsilon(1e-15));
  CHECK(parse_duration("2*pi") == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(parse_duration("20pi") == doctest::Approx(20 * kPi).epsilon(1e-15));
  CHECK(parse_duration("5/35") == doctest::Approx(5.0 / 35).epsilon(1e-15));
  CHECK(parse_duration(" 0.25 ") == 0.25);
  CHECK(parse_duration("1e-3") == 1e-3);
  CHECK_THROWS_AS(parse_duration("pi/0"), ConfigError);
  CHECK_THROWS_AS(parse_duration("tau"), ConfigError);
  CHECK_THROWS_AS(parse_duration(""), ConfigError);
}

TEST_CASE("settings") {
  const ExperimentConfig cfg = with({{"testcase", "deform-gauss"},
                                     {"method", "pu"},
                                     {"N", "23042"},
                                     {"n", "84"},
                                     {"a", "2.5"},
                                     {"dt", "5/80"},
                                     {"checkpoint-every", "10"},
                                     {"out", "x"}});
  CHECK(cfg.testcase == TestCaseName::DeformGauss);
  CHECK(cfg.method == Method::PU);
  CHECK(cfg.num_nodes == 23042u);
  CHECK(cfg.n == 84);
  CHECK(cfg.a == 2.5);
  CHECK(*cfg.dt == doctest::Approx(5.0 / 80));
  CHECK(cfg.checkpoint_every == 10);
  ExperimentConfig c;
  CHECK_THROWS_WITH_AS(apply_setting(c, "n", "many"), doctest::Contains("n:"), ConfigError);
  CHECK_THROWS_WITH_AS(apply_setting(c, "colour", "red"), doctest::Contains("colour"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "method", "spectral"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "checkpoint_every", "0"), ConfigError);
}

TEST_CASE("config file") {
  const auto dir = std::filesystem::temp_directory_path();
  {
    std::ofstream(dir / "slrbf_ok.cfg") << "# run\ntestcase = sbr-cosine\nmethod=local  # backend\n\nlevel = 3\n";
    const auto kv = read_config_file(dir / "slrbf_ok.cfg");
    CHECK(kv.size() == 3);
    CHECK(kv.at("method") == "local");
    CHECK(kv.at("level") == "3");
  }
  {
    std::ofstream(dir / "slrbf_bad.cfg") << "testcase = sbr-cosine\n\nlevel 3\n";
    try {
      read_config_file(dir / "slrbf_bad.cfg");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line == 3);
    }
  }
  CHECK_THROWS_AS(read_config_file(dir / "slrbf_missing.cfg"), ConfigError);
}

TEST_CASE("validation names the offending field") {
  CHECK(config_error(with({{"method", "global"}, {"level", "3"}, {"a", "2.5"}})).rfind("a:", 0) == 0);
  CHECK(config_error(with({{"method", "local"}, {"level", "3"}, {"a", "2.5"}})).rfind("a:", 0) == 0);
  CHECK(config_error(with({{"method", "pu"}, {"level", "3"}, {"epsilon", "2"}})).rfind("epsilon:", 0) == 0);
  CHECK(config_error(with({{"method", "pu"}, {"level", "3"}, {"a", "1.2"}})).rfind("a:", 0) == 0);
  CHECK(config_error(with({{"method", "local"}})).rfind("N:", 0) == 0);
  CHECK(config_error(with({{"level", "3"}, {"N", "642"}})).rfind("N:", 0) == 0);
  CHECK(config_error(with({{"level", "9"}})).rfind("level:", 0) == 0);
  CHECK(config_error(with({{"testcase", "deform-gauss"}, {"level", "3"}, {"revolutions", "2"}}))
            .rfind("revolutions:", 0) == 0);
  CHECK(config_error(with({{"level", "3"}, {"revolutions", "2"}, {"tfinal", "pi"}})).rfind("revolutions:", 0) == 0);
  CHECK(config_error(with({{"method", "global"}, {"level", "3"}, {"n", "31"}})).empty());
  CHECK(config_error(with({{"method", "pu"}, {"level", "3"}, {"a", "2.5"}})).empty());
}

TEST_CASE("time-step presets") {
  CHECK(*preset_dt(TestCaseName::DeformCosine, Method::Local, 23042) == doctest::Approx(5.0 / 35));
  CHECK(*preset_dt(TestCaseName::DeformGauss, Method::PU, 23042) == doctest::Approx(5.0 / 80));
  CHECK(*preset_dt(TestCaseName::DeformCosine, Method::Local, 2562) == doctest::Approx(5.0 / 20));
  CHECK(*preset_dt(TestCaseName::DeformGauss, Method::Local, 92162) == doctest::Approx(5.0 / 120));
  CHECK(*preset_dt(TestCaseName::DeformGauss, Method::Global, 15129) == doctest::Approx(5.0 / 200));
  CHECK(*preset_dt(TestCaseName::DeformCosine, Method::Global, 3136) == doctest::Approx(5.0 / 20));
  CHECK_FALSE(preset_dt(TestCaseName::SolidBodyCosine, Method::Local, 2562));
  CHECK_FALSE(preset_dt(TestCaseName::DeformGauss, Method::Local, 642));

  const ResolvedRun sb = resolve_run(with({{"level", "4"}}), 2562);
  CHECK(sb.sl.dt == doctest::Approx(kPi / 10));
  CHECK(sb.sl.t_final == doctest::Approx(2 * kPi));
  CHECK(sb.sl.n == 31);
  CHECK(sb.sl.a == 2.5);
  const ResolvedRun ten = resolve_run(with({{"level", "4"}, {"revolutions", "10"}, {"dt", "pi/20"}}), 2562);
  CHECK(ten.sl.num_steps() == 400);
  CHECK_THROWS_AS(resolve_run(with({{"testcase", "deform-gauss"}, {"level", "3"}}), 642), ConfigError);
}

TEST_CASE("run writes CSV and JSON") {
  const ExperimentConfig cfg = with({{"testcase", "sbr-cosine"},
                                     {"method", "local"},
                                     {"n", "31"},
                                     {"N", "2562"},
                                     {"dt", "pi/10"},
                                     {"out", "exp_run"}});
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.records.size() == 21);
  const std::string csv = slurp("exp_run.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "time,rel_l2,rel_linf,dissipation,dispersion,mass_error,field_min,field_max");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 21);

  const auto j = nlohmann::json::parse(slurp("exp_run.json"));
  CHECK(j["schema"] == 1);
  CHECK(j["config"]["method"] == "local");
  CHECK(j["config"]["N"] == 2562);
  CHECK(j["config"]["steps"] == 20);
  CHECK(j["kernel"]["sh_degree"] == 2);
  CHECK(j["kernel"]["phs_exponent"] == 5);
  CHECK(j["warnings"]["uncovered_departure_points"] == 0);
  for (const char* k : {"build", "factorize", "step_loop", "total"}) CHECK(j["timings"][k].get<double>() >= 0.0);
  CHECK(j["final"]["rel_l2"].get<double>() == doctest::Approx(1.384e-2).epsilon(0.02));

  // identical config, identical bytes
  run_experiment(cfg);
  CHECK(slurp("exp_run.csv") == csv);
}

TEST_CASE("deformational run reports errors only at the final time") {
  const ExperimentConfig cfg = with({{"testcase", "deform-cosine"}, {"method", "pu"}, {"level", "3"},
                                     {"n", "31"}, {"dt", "5/20"}, {"checkpoint_every", "5"}, {"out", "exp_def"}});
  const ExperimentResult r = run_experiment(cfg);
  REQUIRE(r.records.size() == 5);
  CHECK(r.records.front().has_errors());
  CHECK_FALSE(r.records[2].has_errors());
  CHECK(r.records.back().has_errors());
  const std::string csv = slurp("exp_def.csv");
  CHECK(csv.find("nan") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp("exp_def.json"));
  CHECK(j["kernel"]["patch_count"] == pu_patch_count(642, 31, 2.5));
}

TEST_CASE("global run echoes epsilon and ignored settings") {
  const ExperimentConfig cfg = with({{"testcase", "deform-gauss"}, {"method", "global"}, {"level", "2"},
                                     {"n", "31"}, {"dt", "5/20"}, {"out", "exp_glob"}});
  run_experiment(cfg);
  const auto j = nlohmann::json::parse(slurp("exp_glob.json"));
  CHECK(j["kernel"]["kind"] == "imq");
  CHECK(j["kernel"]["epsilon"].get<double>() > 0.0);
  CHECK(j["kernel"]["condition_estimate"].get<double>() <= 1e12);
  CHECK(j["warnings"]["ignored"][0] == "n");
  CHECK(j["config"]["epsilon_requested"].is_null());
}

TEST_CASE("convergence sweep") {
  std::vector<ExperimentConfig> sweep;
  for (const char* level : {"3", "4", "5"}) {
    sweep.push_back(with({{"method", "local"}, {"n", "31"}, {"level", level}, {"dt", "pi/10"}}));
  }
  const ConvergenceResult cr = run_convergence(sweep, "exp_sweep");
  REQUIRE(cr.rows.size() == 3);
  REQUIRE(cr.rate_l2);
  CHECK(*cr.rate_l2 > 1.5);
  const auto j = nlohmann::json::parse(slurp("exp_sweep.json"));
  CHECK(j["runs"].size() == 3);
  CHECK(j["rate_l2"].get<double>() == doctest::Approx(*cr.rate_l2));
  CHECK_THROWS_AS(run_convergence({sweep[0], sweep[1]}), ConfigError);
}

TEST_CASE("rates are skipped at roundoff") {
  // Constant data transported by the local backend is exact, so the sweep's
  // errors sit at roundoff.
  std::vector<ConvergenceRow> rows;
  for (int level : {2, 3, 4}) {
    const NodeSet s = icosahedral_nodes(level);
    SLConfig c;
    c.dt = 0.25;
    c.t_final = 5.0;
    c.n = 17;
    const std::vector<double> one(s.size(), 1.0);
    const SLResult r = sl_advect(c, deformational_velocity(), s, one,
                                 [&](double) { return std::optional<std::vector<double>>(one); });
    rows.push_back({s.size(), r.records.back().rel_l2, r.records.back().rel_linf});
  }
  const ConvergenceResult cr = summarize_convergence(rows);
  CHECK_FALSE(cr.rate_l2);
  CHECK(cr.notice.find("roundoff") != std::string::npos);
}
