#pragma once

#include <span>
#include <vector>

#include "slrbf/basis.hpp"
#include "slrbf/geometry.hpp"
#include "slrbf/interpolator.hpp"
#include "slrbf/linalg.hpp"

namespace slrbf {

/// Factorized augmented interpolation system for one stencil or patch.
///
/// Kernel distances are divided by `scale`. PHS kernels are homogeneous, so
/// this only rescales the RBF coefficients. The harmonic block is
/// orthonormalized first (P = Q R) and the LU factorization is of
/// [[A, Q], [Q^T, 0]]: Q has the same column space as P, so the interpolant
/// is unchanged, but on small caps P alone is too close to rank deficient
/// for the saddle matrix to survive the singularity check. Solutions are
/// mapped back to harmonic coefficients through R.
class AugmentedSystem {
 public:
  AugmentedSystem() = default;

  /// Throws SingularMatrix if the system or the harmonic block is singular to
  /// working precision.
  static AugmentedSystem factor(std::span<const Vec3> points, double scale, const KernelSpec& kernel,
                                const SHBasis& sh);

  std::size_t size() const { return n_ + m_; }
  std::size_t num_points() const { return n_; }
  double scale() const { return scale_; }
  double rcond() const { return lu_.rcond(); }

  /// rhs = (f, 0) on entry, (c, d) on return with d in the harmonic basis.
  void solve_in_place(std::span<double> rhs) const;

 private:
  Factorization lu_;
  std::vector<double> r_;  // m x m upper triangular, row-major
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  double scale_ = 1.0;
};

/// One node plus its n - 1 nearest neighbours. `scale` is the largest
/// centre-to-member distance.
struct Stencil {
  Index center = 0;
  std::vector<Index> members;  // members[0] == center, ascending distance
  double scale = 1.0;
  AugmentedSystem system;
};

/// Solution of the augmented stencil system.
struct StencilFit {
  std::vector<double> rbf;   // c, one per member
  std::vector<double> poly;  // d, one per harmonic
};

/// Local augmented RBF interpolation with PHS kernels and spherical
/// harmonics of degree L = floor((sqrt(n) - 1) / 2).
class LocalInterpolant final : public Interpolator {
 public:
  /// Throws SingularMatrix naming the centre index for a degenerate stencil.
  static LocalInterpolant build(const NodeSet& nodes, int stencil_size);

  StencilFit fit_stencil(const Stencil& st, std::span<const double> values_on_members) const;
  StencilFit fit_stencil(std::size_t center, std::span<const double> values_on_members) const {
    return fit_stencil(stencils_.at(center), values_on_members);
  }

  /// Value of a fitted stencil interpolant at x.
  double evaluate_fit(const Stencil& st, const StencilFit& fit, const Vec3& x) const;

  /// For each target: nearest node selects the stencil, which is fitted to
  /// the field and evaluated at the target. OpenMP-parallel over targets.
  std::vector<double> evaluate(std::span<const double> field, std::span<const Vec3> targets) const;
  void evaluate(std::span<const double> field, std::span<const Vec3> targets, std::span<double> out) const;

  void interpolate(std::span<const double> field, std::span<const Vec3> targets, std::span<double> out) override {
    evaluate(field, targets, out);
  }
  std::string_view name() const override { return "local"; }

  const NodeSet& nodes() const { return nodes_; }
  std::span<const Stencil> stencils() const { return stencils_; }
  int stencil_size() const { return n_; }
  const SHBasis& sh() const { return sh_; }
  const KernelSpec& kernel() const { return kernel_; }
  std::size_t system_size() const { return static_cast<std::size_t>(n_ + sh_.dim()); }

 private:
  LocalInterpolant() = default;

  // Scratch-using kernel shared by the parallel and serial paths.
  double evaluate_one(std::span<const double> field, const Vec3& target, std::vector<double>& rhs,
                      std::vector<double>& sh_scratch) const;

  NodeSet nodes_;
  int n_ = 0;
  SHBasis sh_;
  KernelSpec kernel_;
  std::vector<Stencil> stencils_;
};

/// Assembles the literal [[A, P], [P^T, 0]] with harmonic P.
DenseMatrix augmented_matrix(std::span<const Vec3> points, double scale, const KernelSpec& kernel,
                             const SHBasis& sh);

}  // namespace slrbf
