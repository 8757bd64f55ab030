#include <algorithm>
#include <cmath>

#include "slrbf/errors.hpp"
#include "slrbf/reference.hpp"

namespace slrbf::reference {

std::vector<Vec3> compute_departures(const VelocityField& u, std::span<const Vec3> nodes, double t_arrive,
                                     double dt) {
  std::vector<Vec3> out;
  out.reserve(nodes.size());
  for (const Vec3& x : nodes) out.push_back(rk5_backward_step(u, x, t_arrive, dt));
  return out;
}

std::vector<double> global_evaluate(std::span<const Vec3> nodes, const KernelSpec& kernel,
                                    std::span<const double> coeffs, std::span<const Vec3> points) {
  if (coeffs.size() != nodes.size()) throw ArgumentError("global_evaluate: coefficient count mismatch");
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += coeffs[k] * kernel_eval(kernel, distance(points[i], nodes[k]));
    out[i] = s;
  }
  return out;
}

std::vector<double> local_evaluate(const LocalInterpolant& li, std::span<const double> field,
                                   std::span<const Vec3> targets) {
  std::vector<double> out(targets.size());
  std::vector<double> values;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Stencil& st = li.stencils()[li.nodes().nearest(targets[t])];
    values.clear();
    for (Index j : st.members) values.push_back(field[j]);
    out[t] = li.evaluate_fit(st, li.fit_stencil(st, values), targets[t]);
  }
  return out;
}

std::vector<double> pu_evaluate(const PUInterpolant& pu, std::span<const double> field,
                                std::span<const Vec3> targets) {
  const auto patches = pu.patches();
  std::vector<std::vector<double>> coeffs(patches.size());
  for (std::size_t l = 0; l < patches.size(); ++l) {
    coeffs[l].assign(patches[l].system.size(), 0.0);
    for (std::size_t j = 0; j < patches[l].members.size(); ++j) coeffs[l][j] = field[patches[l].members[j]];
    patches[l].system.solve_in_place(coeffs[l]);
  }
  auto patch_value = [&](std::size_t l, const Vec3& x) {
    const Patch& p = patches[l];
    const std::vector<double> y = sh_eval(pu.sh(), x);
    double s = 0.0;
    for (std::size_t j = 0; j < p.members.size(); ++j) {
      s += coeffs[l][j] * kernel_eval(pu.kernel(), distance(x, pu.nodes()[p.members[j]]) / p.radius);
    }
    for (std::size_t i = 0; i < y.size(); ++i) s += coeffs[l][p.members.size() + i] * y[i];
    return s;
  };

  std::vector<double> out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto w = pu.weights(targets[t]);
    if (w.empty()) {
      out[t] = patch_value(static_cast<std::size_t>(pu.centers().nearest(targets[t])), targets[t]);
      continue;
    }
    double s = 0.0;
    for (const auto& [l, wl] : w) s += wl * patch_value(static_cast<std::size_t>(l), targets[t]);
    out[t] = s;
  }
  return out;
}

}  // namespace slrbf::reference
