#include "slrbf/interp_pu.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <string>

#include "slrbf/errors.hpp"
#include "slrbf/interp_local.hpp"

namespace slrbf {

double bspline_weight(double r) {
  if (r < 0.5) return 2.0 / 3.0 + 4.0 * (r - 1.0) * r * r;
  if (r < 1.0) {
    const double t = r - 1.0;
    return -4.0 / 3.0 * t * t * t;
  }
  return 0.0;
}

double pu_patch_radius(std::size_t num_nodes, int nodes_per_patch) {
  return 2.0 * std::sqrt(static_cast<double>(nodes_per_patch) / static_cast<double>(num_nodes));
}

std::size_t pu_patch_count(std::size_t num_nodes, int nodes_per_patch, double multiplicity) {
  return static_cast<std::size_t>(std::ceil(multiplicity * static_cast<double>(num_nodes) / nodes_per_patch));
}

PUInterpolant::PUInterpolant(PUInterpolant&& o) noexcept
    : nodes_(std::move(o.nodes_)),
      centers_(std::move(o.centers_)),
      n_(o.n_),
      a_(o.a_),
      radius_(o.radius_),
      sh_(o.sh_),
      kernel_(o.kernel_),
      patches_(std::move(o.patches_)),
      coeffs_(std::move(o.coeffs_)),
      fitted_(o.fitted_),
      fallbacks_(o.fallbacks_.load()) {}

PUInterpolant& PUInterpolant::operator=(PUInterpolant&& o) noexcept {
  nodes_ = std::move(o.nodes_);
  centers_ = std::move(o.centers_);
  n_ = o.n_;
  a_ = o.a_;
  radius_ = o.radius_;
  sh_ = o.sh_;
  kernel_ = o.kernel_;
  patches_ = std::move(o.patches_);
  coeffs_ = std::move(o.coeffs_);
  fitted_ = o.fitted_;
  fallbacks_.store(o.fallbacks_.load());
  return *this;
}

PUInterpolant PUInterpolant::build(const NodeSet& nodes, const PUOptions& options,
                                   std::optional<NodeSet> patch_centers) {
  if (!(options.multiplicity >= 1.5)) {
    throw ConfigError("PU multiplicity a must be >= 1.5, got " + std::to_string(options.multiplicity));
  }
  if (options.nodes_per_patch < 1) throw ConfigError("PU nodes per patch n must be positive");

  PUInterpolant pu;
  pu.nodes_ = nodes;
  pu.n_ = options.nodes_per_patch;
  pu.a_ = options.multiplicity;
  const StencilBasis basis = sh_degree_for_stencil(options.nodes_per_patch);
  pu.sh_ = basis.sh;
  pu.kernel_ = KernelSpec::phs(basis.phs_order);
  pu.radius_ = pu_patch_radius(nodes.size(), options.nodes_per_patch);
  pu.centers_ = patch_centers ? std::move(*patch_centers)
                              : fibonacci_nodes(pu_patch_count(nodes.size(), options.nodes_per_patch,
                                                               options.multiplicity));

  const std::size_t m = pu.centers_.size();
  const std::size_t min_members = static_cast<std::size_t>(pu.sh_.dim()) + 1;
  pu.patches_.resize(m);
  std::exception_ptr failure;
  std::mutex failure_mutex;

#pragma omp parallel
  {
    std::vector<Vec3> member_pts;
#pragma omp for schedule(dynamic, 8)
    for (std::size_t l = 0; l < m; ++l) {
      try {
        Patch& patch = pu.patches_[l];
        patch.center = pu.centers_[l];
        patch.radius = pu.radius_;
        nodes.tree().within_radius(patch.center, patch.radius, patch.members);
        if (patch.members.size() < min_members) {
          throw ConfigError("PU patch " + std::to_string(l) + " has " + std::to_string(patch.members.size()) +
                            " nodes, needs at least " + std::to_string(min_members) +
                            "; increase n or use a denser node set");
        }
        member_pts.resize(patch.members.size());
        for (std::size_t j = 0; j < patch.members.size(); ++j) member_pts[j] = nodes[patch.members[j]];
        try {
          patch.system = AugmentedSystem::factor(member_pts, patch.radius, pu.kernel_, pu.sh_);
        } catch (const SingularMatrix& e) {
          throw SingularMatrix("PU patch " + std::to_string(l) + ": " + e.what());
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<unsigned char> covered(nodes.size(), 0);
  for (const Patch& patch : pu.patches_) {
    for (Index j : patch.members) covered[j] = 1;
  }
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (!covered[i]) {
      throw ConfigError("PU cover leaves node " + std::to_string(i) + " uncovered; increase the multiplicity a");
    }
  }
  pu.coeffs_.resize(m);
  return pu;
}

std::vector<std::pair<Index, double>> PUInterpolant::weights(const Vec3& x) const {
  std::vector<Index> idx;
  centers_.tree().within_radius(x, radius_, idx);
  std::vector<std::pair<Index, double>> w;
  w.reserve(idx.size());
  double total = 0.0;
  for (Index l : idx) {
    const double phi = bspline_weight(distance(x, centers_[l]) / radius_);
    if (phi > 0.0) {
      w.emplace_back(l, phi);
      total += phi;
    }
  }
  for (auto& [l, v] : w) v /= total;
  return w;
}

void PUInterpolant::fit(std::span<const double> field) {
  if (field.size() != nodes_.size()) throw ArgumentError("eval_pu: field size does not match node count");
  const std::size_t m = patches_.size();
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t l = 0; l < m; ++l) {
    const Patch& patch = patches_[l];
    std::vector<double>& c = coeffs_[l];
    c.assign(patch.system.size(), 0.0);
    for (std::size_t j = 0; j < patch.members.size(); ++j) c[j] = field[patch.members[j]];
    patch.system.solve_in_place(c);
  }
  fitted_ = true;
}

namespace {

double patch_value(const Patch& patch, std::span<const double> c, std::span<const Vec3> nodes,
                   const KernelSpec& kernel, std::span<const double> harmonics, const Vec3& x) {
  const double inv_r2 = 1.0 / (patch.radius * patch.radius);
  const std::size_t n = patch.members.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += c[j] * kernel_eval_r2(kernel, distance2(x, nodes[patch.members[j]]) * inv_r2);
  for (std::size_t i = 0; i < harmonics.size(); ++i) s += c[n + i] * harmonics[i];
  return s;
}

}  // namespace

double PUInterpolant::evaluate_patch(std::size_t patch, const Vec3& x) const {
  if (!fitted_) throw ArgumentError("eval_pu: fit() has not been called");
  const std::vector<double> p = sh_eval(sh_, x);
  return patch_value(patches_.at(patch), coeffs_[patch], nodes_.points(), kernel_, p, x);
}

void PUInterpolant::evaluate(std::span<const Vec3> targets, std::span<double> out) const {
  if (!fitted_) throw ArgumentError("eval_pu: fit() has not been called");
  if (out.size() != targets.size()) throw ArgumentError("eval_pu: output size mismatch");
  const auto pts = nodes_.points();
#pragma omp parallel
  {
    std::vector<double> p(static_cast<std::size_t>(sh_.dim()));
    std::size_t local_fallbacks = 0;
#pragma omp for schedule(static)
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const Vec3& x = targets[t];
      sh_eval(sh_, x, p);
      const auto w = weights(x);
      double s = 0.0;
      if (w.empty()) {
        const Index l = centers_.nearest(x);
        s = patch_value(patches_[l], coeffs_[l], pts, kernel_, p, x);
        ++local_fallbacks;
      } else {
        for (const auto& [l, wl] : w) s += wl * patch_value(patches_[l], coeffs_[l], pts, kernel_, p, x);
      }
      out[t] = s;
    }
    fallbacks_ += local_fallbacks;
  }
}

std::vector<double> PUInterpolant::evaluate(std::span<const double> field, std::span<const Vec3> targets) {
  fit(field);
  std::vector<double> out(targets.size());
  evaluate(targets, out);
  return out;
}

}  // namespace slrbf
