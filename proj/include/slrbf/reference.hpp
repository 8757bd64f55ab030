#pragma once

#include <span>
#include <vector>

#include "slrbf/basis.hpp"
#include "slrbf/geometry.hpp"
#include "slrbf/interp_local.hpp"
#include "slrbf/interp_pu.hpp"
#include "slrbf/linalg.hpp"
#include "slrbf/transport.hpp"

// Serial, straightforward versions of the parallel kernels. They are kept for
// the unit tests and the benchmark, not for production runs.
namespace slrbf::reference {

std::vector<Vec3> compute_departures(const VelocityField& u, std::span<const Vec3> nodes, double t_arrive,
                                     double dt);

/// sum_k c_k phi(|x - x_k|), summed left to right.
std::vector<double> global_evaluate(std::span<const Vec3> nodes, const KernelSpec& kernel,
                                    std::span<const double> coeffs, std::span<const Vec3> points);

/// Fits the stencil of the nearest node for each target through the public
/// fit_stencil / evaluate_fit pair.
std::vector<double> local_evaluate(const LocalInterpolant& li, std::span<const double> field,
                                   std::span<const Vec3> targets);

/// Solves every patch system and blends with weights(), one target at a time.
std::vector<double> pu_evaluate(const PUInterpolant& pu, std::span<const double> field,
                                std::span<const Vec3> targets);

/// Textbook Cholesky. Returns the lower factor (row-major) or throws
/// NotPositiveDefinite.
DenseMatrix cholesky_lower(const DenseMatrix& a);

/// Gaussian elimination with partial pivoting on a copy of A.
std::vector<double> lu_solve(const DenseMatrix& a, std::span<const double> b);

}  // namespace slrbf::reference
