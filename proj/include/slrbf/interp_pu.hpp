#pragma once

#include <atomic>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "slrbf/basis.hpp"
#include "slrbf/geometry.hpp"
#include "slrbf/interp_local.hpp"
#include "slrbf/interpolator.hpp"
#include "slrbf/linalg.hpp"

namespace slrbf {

/// Compactly supported cubic B-spline on [0, 1), C^2 at r = 1/2 and r = 1.
double bspline_weight(double r);

/// Patch radius 2 sqrt(n / N) for n nodes per patch out of N.
double pu_patch_radius(std::size_t num_nodes, int nodes_per_patch);

/// Patch count ceil(a N / n).
std::size_t pu_patch_count(std::size_t num_nodes, int nodes_per_patch, double multiplicity);

/// Spherical cap {x : |x - center| < radius} with its augmented local system.
struct Patch {
  Vec3 center;
  double radius = 0.0;
  std::vector<Index> members;  // ascending node index
  AugmentedSystem system;      // kernel distances scaled by radius
};

struct PUOptions {
  int nodes_per_patch = 84;
  double multiplicity = 2.5;
};

/// RBF partition-of-unity interpolant over quasi-uniform spherical caps.
class PUInterpolant final : public Interpolator {
 public:
  /// Centres are a Fibonacci set of ceil(a N / n) points unless
  /// patch_centers is given. Throws ConfigError if a node is left uncovered
  /// or a patch has too few members for its harmonics.
  static PUInterpolant build(const NodeSet& nodes, const PUOptions& options,
                             std::optional<NodeSet> patch_centers = std::nullopt);

  /// Sparse (patch, w_l(x)) list over patches containing x, ascending patch
  /// index. Empty when x is in no patch.
  std::vector<std::pair<Index, double>> weights(const Vec3& x) const;

  /// Solves every patch system for the field (parallel over patches).
  void fit(std::span<const double> field);

  /// Blends the fitted patch interpolants at the targets (parallel over
  /// targets). Uncovered targets use the nearest patch with weight 1.
  void evaluate(std::span<const Vec3> targets, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> field, std::span<const Vec3> targets);

  /// Value of one fitted patch interpolant.
  double evaluate_patch(std::size_t patch, const Vec3& x) const;

  void interpolate(std::span<const double> field, std::span<const Vec3> targets, std::span<double> out) override {
    fit(field);
    evaluate(targets, out);
  }
  std::string_view name() const override { return "pu"; }
  std::size_t fallback_count() const override { return fallbacks_.load(); }

  const NodeSet& nodes() const { return nodes_; }
  const NodeSet& centers() const { return centers_; }
  std::span<const Patch> patches() const { return patches_; }
  double radius() const { return radius_; }
  int nodes_per_patch() const { return n_; }
  double multiplicity() const { return a_; }
  const SHBasis& sh() const { return sh_; }
  const KernelSpec& kernel() const { return kernel_; }

  PUInterpolant(PUInterpolant&& other) noexcept;
  PUInterpolant& operator=(PUInterpolant&& other) noexcept;

 private:
  PUInterpolant() = default;

  NodeSet nodes_;
  NodeSet centers_;
  int n_ = 0;
  double a_ = 0.0;
  double radius_ = 0.0;
  SHBasis sh_;
  KernelSpec kernel_;
  std::vector<Patch> patches_;
  // Fitted coefficients per patch: members' RBF weights then harmonics.
  std::vector<std::vector<double>> coeffs_;
  bool fitted_ = false;
  mutable std::atomic<std::size_t> fallbacks_{0};
};

}  // namespace slrbf
