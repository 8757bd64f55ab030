#include "slrbf/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "slrbf/errors.hpp"
#include "slrbf/interp_global.hpp"
#include "slrbf/interp_local.hpp"
#include "slrbf/interp_pu.hpp"

namespace slrbf {

namespace {

// Fehlberg 4(5) tableau; only the fifth-order weights are used.
constexpr double kC[6] = {0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0};
constexpr double kA[6][5] = {
    {0.0, 0.0, 0.0, 0.0, 0.0},
    {1.0 / 4.0, 0.0, 0.0, 0.0, 0.0},
    {3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0},
    {1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0},
    {439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0},
    {-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0},
};
constexpr double kB5[6] = {16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0};

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Vec3 rk5_backward_step(const VelocityField& u, const Vec3& x, double t_arrive, double dt) {
  const double h = -dt;
  Vec3 k[6];
  for (int s = 0; s < 6; ++s) {
    Vec3 y = x;
    for (int j = 0; j < s; ++j) y += (h * kA[s][j]) * k[j];
    if (s > 0) y = project_to_sphere(y);
    k[s] = u(y, t_arrive + kC[s] * h);
  }
  Vec3 y = x;
  for (int s = 0; s < 6; ++s) y += (h * kB5[s]) * k[s];
  return project_to_sphere(y);
}

void compute_departures(const VelocityField& u, std::span<const Vec3> nodes, double t_arrive, double dt,
                        std::span<Vec3> out) {
  if (out.size() != nodes.size()) throw ArgumentError("compute_departures: output size mismatch");
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < nodes.size(); ++j) out[j] = rk5_backward_step(u, nodes[j], t_arrive, dt);
}

std::vector<Vec3> compute_departures(const VelocityField& u, const NodeSet& nodes, double t_arrive, double dt) {
  std::vector<Vec3> out(nodes.size());
  compute_departures(u, nodes.points(), t_arrive, dt, out);
  return out;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Global: return "global";
    case Method::Local: return "local";
    case Method::PU: return "pu";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "global") return Method::Global;
  if (s == "local") return Method::Local;
  if (s == "pu") return Method::PU;
  throw ConfigError("unknown method '" + s + "' (expected global, local or pu)");
}

std::size_t SLConfig::num_steps() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_final > 0.0)) throw ConfigError("t_final must be positive");
  const double ratio = t_final / dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(steps * dt - t_final) > 1e-12 * std::max(1.0, t_final)) {
    throw ConfigError("t_final must be a positive multiple of dt");
  }
  return static_cast<std::size_t>(steps);
}

std::unique_ptr<Interpolator> make_interpolator(const SLConfig& cfg, const NodeSet& nodes,
                                                std::optional<NodeSet> patch_centers) {
  switch (cfg.method) {
    case Method::Global:
      return std::make_unique<GlobalInterpolant>(GlobalInterpolant::build(nodes, cfg.epsilon));
    case Method::Local:
      return std::make_unique<LocalInterpolant>(LocalInterpolant::build(nodes, cfg.n));
    case Method::PU:
      return std::make_unique<PUInterpolant>(
          PUInterpolant::build(nodes, PUOptions{cfg.n, cfg.a}, std::move(patch_centers)));
  }
  throw ConfigError("unknown method");
}

SLResult sl_advect(const SLConfig& cfg, const VelocityField& u, const NodeSet& nodes, Interpolator& backend,
                   std::vector<double> q0, const ExactProvider& exact, const CheckpointHook& hook) {
  if (q0.size() != nodes.size()) throw ArgumentError("sl_advect: initial field length does not match node count");
  if (cfg.checkpoint_every == 0) throw ConfigError("checkpoint_every must be at least 1");
  const std::size_t steps = cfg.num_steps();
  const QuadratureRule rule = equal_weight_rule(nodes);
  const std::vector<double> initial = q0;

  SLResult result;
  result.field = std::move(q0);
  std::vector<double> next(nodes.size());
  std::vector<Vec3> departures(nodes.size());

  auto checkpoint = [&](std::size_t step, double time) {
    std::optional<std::vector<double>> qe;
    if (exact) qe = exact(time);
    std::optional<std::span<const double>> qe_view;
    if (qe) qe_view = std::span<const double>(*qe);
    const DiagnosticsRecord rec = make_record(time, result.field, qe_view, initial, rule);
    result.records.push_back(rec);
    if (hook) hook(step, time, result.field, rec);
  };

  checkpoint(0, 0.0);
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t m = 0; m < steps; ++m) {
    const double t_arrive = static_cast<double>(m + 1) * cfg.dt;
    compute_departures(u, nodes.points(), t_arrive, cfg.dt, departures);
    backend.interpolate(result.field, departures, next);
    if (!all_finite(next)) {
      throw NumericalBlowup("sl_advect: non-finite value in field at step " + std::to_string(m + 1), m + 1);
    }
    result.field.swap(next);
    result.time = t_arrive;
    result.steps = m + 1;
    if ((m + 1) % cfg.checkpoint_every == 0 || m + 1 == steps) {
      const auto pause = std::chrono::steady_clock::now();
      checkpoint(m + 1, t_arrive);
      result.step_seconds -= std::chrono::duration<double>(std::chrono::steady_clock::now() - pause).count();
    }
  }
  result.step_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SLResult sl_advect(const SLConfig& cfg, const VelocityField& u, const NodeSet& nodes, std::vector<double> q0,
                   const ExactProvider& exact, const CheckpointHook& hook) {
  cfg.num_steps();
  auto backend = make_interpolator(cfg, nodes);
  return sl_advect(cfg, u, nodes, *backend, std::move(q0), exact, hook);
}

}  // namespace slrbf
