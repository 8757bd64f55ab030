#pragma once

#include <span>
#include <vector>

#include "slrbf/geometry.hpp"

namespace slrbf {

enum class KernelKind { IMQ, PHS };

/// Radial kernel selection.
///   IMQ: phi(r) = (1 + (epsilon r)^2)^(-1/2), epsilon > 0
///   PHS: phi(r) = r^(2k + 1), k = phs_order >= 0
struct KernelSpec {
  KernelKind kind = KernelKind::PHS;
  double epsilon = 1.0;
  int phs_order = 1;

  static KernelSpec imq(double epsilon);
  static KernelSpec phs(int order);
};

double kernel_eval(const KernelSpec& spec, double r);

/// Kernel as a function of squared distance; avoids a sqrt for IMQ.
inline double kernel_eval_r2(const KernelSpec& spec, double r2) {
  if (spec.kind == KernelKind::IMQ) return 1.0 / std::sqrt(1.0 + spec.epsilon * spec.epsilon * r2);
  const double r = std::sqrt(r2);
  double v = r;
  for (int i = 0; i < spec.phs_order; ++i) v *= r2;
  return v;
}

/// Real spherical harmonics of degree <= degree, (degree + 1)^2 functions.
struct SHBasis {
  int degree = 0;
  int dim() const { return (degree + 1) * (degree + 1); }
};

struct StencilBasis {
  SHBasis sh;
  int phs_order = 1;
};

/// L = floor((sqrt(n) - 1) / 2) and PHS order k = max(L, 1).
StencilBasis sh_degree_for_stencil(int n);

/// Writes [Y_0^0, Y_1^-1, Y_1^0, Y_1^1, Y_2^-2, ...] into out (size dim()).
/// Orthonormal on the sphere, no Condon-Shortley phase. The azimuthal factors
/// are evaluated as Re/Im (x + i y)^m so the functions are polynomials in x,
/// y, z and are smooth through the poles.
void sh_eval(const SHBasis& basis, const Vec3& x, std::span<double> out);
std::vector<double> sh_eval(const SHBasis& basis, const Vec3& x);

/// Offset of (l, m) in the sh_eval ordering.
constexpr int sh_index(int l, int m) { return l * l + l + m; }

}  // namespace slrbf
