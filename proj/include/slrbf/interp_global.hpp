#pragma once

#include <optional>
#include <span>
#include <vector>

#include "slrbf/basis.hpp"
#include "slrbf/geometry.hpp"
#include "slrbf/interpolator.hpp"
#include "slrbf/linalg.hpp"

namespace slrbf {

/// Shape-parameter search for the global IMQ system: start at
/// initial_epsilon and double until the Cholesky factorization succeeds
/// and the estimated 1-norm condition number is at most max_condition.
/// If the start already passes, halve until it fails. The bracket between
/// the last rejected and first accepted value is then bisected (in log
/// epsilon) refine_steps times, keeping the smallest accepted epsilon, so
/// the result does not depend on where the doubling happened to start.
struct EpsilonSearch {
  double initial_epsilon = 0.0;  // <= 0 selects the default start, sqrt(N) / 32
  double max_condition = 1e12;
  int max_doublings = 40;
  int refine_steps = 3;
};

/// Global IMQ interpolant s(x) = sum_k c_k phi(|x - x_k|) over all nodes.
/// The kernel matrix is factorized once; fit() is O(N^2) per field.
class GlobalInterpolant final : public Interpolator {
 public:
  /// Fixed epsilon when given, otherwise the EpsilonSearch rule.
  static GlobalInterpolant build(const NodeSet& nodes, std::optional<double> epsilon = std::nullopt,
                                 const EpsilonSearch& search = {});

  void fit(std::span<const double> values);

  /// Dense evaluation of the current fit, OpenMP-parallel over points.
  std::vector<double> evaluate(std::span<const Vec3> points) const;
  void evaluate(std::span<const Vec3> points, std::span<double> out) const;

  void interpolate(std::span<const double> field, std::span<const Vec3> targets, std::span<double> out) override;
  std::string_view name() const override { return "global"; }

  const KernelSpec& kernel() const { return kernel_; }
  double epsilon() const { return kernel_.epsilon; }
  double condition_estimate() const { return condition_; }
  int factorization_attempts() const { return attempts_; }
  std::span<const double> coefficients() const { return coeffs_; }
  const NodeSet& nodes() const { return nodes_; }

 private:
  GlobalInterpolant() = default;

  NodeSet nodes_;
  KernelSpec kernel_;
  Factorization chol_;
  double condition_ = 0.0;
  int attempts_ = 0;
  std::vector<double> coeffs_;
  bool fitted_ = false;
};

/// A_X with entries phi(|x_i - x_j|).
DenseMatrix global_kernel_matrix(const NodeSet& nodes, const KernelSpec& kernel);

}  // namespace slrbf
