#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slrbf/diagnostics.hpp"
#include "slrbf/geometry.hpp"
#include "slrbf/interpolator.hpp"

namespace slrbf {

/// Cartesian velocity u(x, t), tangent to the sphere.
using VelocityField = std::function<Vec3(const Vec3&, double)>;

/// One fixed step of the 6-stage Runge-Kutta-Fehlberg scheme (fifth-order
/// weights) for dxi/dt = u, integrated backward from t_arrive to
/// t_arrive - dt. The state is projected to the sphere after every stage and
/// after the final combination.
Vec3 rk5_backward_step(const VelocityField& u, const Vec3& x, double t_arrive, double dt);

/// Departure points of every node, parallel over nodes.
std::vector<Vec3> compute_departures(const VelocityField& u, const NodeSet& nodes, double t_arrive, double dt);
void compute_departures(const VelocityField& u, std::span<const Vec3> nodes, double t_arrive, double dt,
                        std::span<Vec3> out);

enum class Method { Global, Local, PU };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct SLConfig {
  double dt = 0.0;
  double t_final = 0.0;
  Method method = Method::Local;
  int n = 31;                      // stencil / patch size (Local, PU)
  double a = 2.5;                  // patch multiplicity (PU)
  std::optional<double> epsilon;   // IMQ shape (Global); auto when empty
  std::size_t checkpoint_every = 1;

  /// Number of steps; throws ConfigError unless t_final is a positive
  /// multiple of dt to 1e-12 relative.
  std::size_t num_steps() const;
};

/// Builds the interpolation backend selected by cfg.
std::unique_ptr<Interpolator> make_interpolator(const SLConfig& cfg, const NodeSet& nodes,
                                                std::optional<NodeSet> patch_centers = std::nullopt);

/// Exact nodal solution at time t, when one is known.
using ExactProvider = std::function<std::optional<std::vector<double>>(double)>;

/// Called on the driving thread every checkpoint_every steps, and for the
/// initial state (step 0) and the final step.
using CheckpointHook =
    std::function<void(std::size_t step, double time, std::span<const double> field, const DiagnosticsRecord&)>;

struct SLResult {
  std::vector<double> field;
  double time = 0.0;
  std::size_t steps = 0;
  double step_seconds = 0.0;
  std::vector<DiagnosticsRecord> records;
};

/// Semi-Lagrangian transport: each step traces the nodes back one dt and
/// sets the new nodal values to the interpolant of the old ones at the
/// departure points. Throws NumericalBlowup with the step number on NaN/Inf.
SLResult sl_advect(const SLConfig& cfg, const VelocityField& u, const NodeSet& nodes, Interpolator& backend,
                   std::vector<double> q0, const ExactProvider& exact = {}, const CheckpointHook& hook = {});

/// Convenience overload that builds the backend from cfg.
SLResult sl_advect(const SLConfig& cfg, const VelocityField& u, const NodeSet& nodes, std::vector<double> q0,
                   const ExactProvider& exact = {}, const CheckpointHook& hook = {});

}  // namespace slrbf
