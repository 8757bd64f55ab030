#include "slrbf/basis.hpp"

#include <cmath>
#include <numbers>

#include "slrbf/errors.hpp"

namespace slrbf {

KernelSpec KernelSpec::imq(double epsilon) {
  if (!(epsilon > 0.0)) throw ArgumentError("IMQ kernel requires epsilon > 0");
  return {KernelKind::IMQ, epsilon, 0};
}

KernelSpec KernelSpec::phs(int order) {
  if (order < 0) throw ArgumentError("PHS kernel requires order >= 0");
  return {KernelKind::PHS, 0.0, order};
}

double kernel_eval(const KernelSpec& spec, double r) {
  if (!(r >= 0.0)) throw DomainError("kernel_eval: negative distance");
  if (spec.kind == KernelKind::IMQ) {
    const double er = spec.epsilon * r;
    return 1.0 / std::sqrt(1.0 + er * er);
  }
  return std::pow(r, 2 * spec.phs_order + 1);
}

StencilBasis sh_degree_for_stencil(int n) {
  if (n < 1) throw ArgumentError("sh_degree_for_stencil: n must be >= 1");
  // Integer floor of (sqrt(n) - 1) / 2 without trusting sqrt rounding.
  int s = static_cast<int>(std::sqrt(static_cast<double>(n)));
  while (s * s > n) --s;
  while ((s + 1) * (s + 1) <= n) ++s;
  const int degree = (s - 1) / 2;
  return {SHBasis{degree}, degree < 1 ? 1 : degree};
}

void sh_eval(const SHBasis& basis, const Vec3& x, std::span<double> out) {
  const int lmax = basis.degree;
  const double z = x.z;

  // qmm carries the sectoral normalized factor P_m^m / sin^m(theta);
  // (cr, ci) = Re/Im (x + i y)^m supplies sin^m(theta) cos/sin(m lambda).
  double qmm = 0.5 / std::sqrt(std::numbers::pi);
  double cr = 1.0;
  double ci = 0.0;
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) {
      qmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      const double nr = cr * x.x - ci * x.y;
      ci = cr * x.y + ci * x.x;
      cr = nr;
    }
    const double scale_c = m == 0 ? 1.0 : std::numbers::sqrt2 * cr;
    const double scale_s = std::numbers::sqrt2 * ci;

    double q_lm2 = 0.0;
    double q_lm1 = qmm;
    for (int l = m; l <= lmax; ++l) {
      double q;
      if (l == m) {
        q = qmm;
      } else if (l == m + 1) {
        q = z * std::sqrt(2.0 * m + 3.0) * qmm;
      } else {
        const double ll = l;
        const double mm = m;
        const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
        const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
        q = a * (z * q_lm1 - b * q_lm2);
      }
      if (l > m) {
        q_lm2 = q_lm1;
        q_lm1 = q;
      }
      out[sh_index(l, m)] = q * scale_c;
      if (m > 0) out[sh_index(l, -m)] = q * scale_s;
    }
  }
}

std::vector<double> sh_eval(const SHBasis& basis, const Vec3& x) {
  std::vector<double> out(basis.dim());
  sh_eval(basis, x, out);
  return out;
}

}  // namespace slrbf
