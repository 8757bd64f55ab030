#include "slrbf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slrbf/errors.hpp"

namespace slrbf {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void require_same_size(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) throw ArgumentError(std::string(what) + ": fields have different lengths");
}

}  // namespace

double QuadratureRule::integrate(std::span<const double> f) const {
  if (f.size() != weights.size()) throw ArgumentError("quadrature: field length does not match rule");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += weights[i] * f[i];
  return s;
}

QuadratureRule equal_weight_rule(std::size_t num_nodes) {
  if (num_nodes == 0) throw ArgumentError("equal_weight_rule: no nodes");
  return {std::vector<double>(num_nodes, kFourPi / static_cast<double>(num_nodes))};
}

QuadratureRule equal_weight_rule(const NodeSet& nodes) { return equal_weight_rule(nodes.size()); }

RelativeNorms rel_norms(std::span<const double> q_num, std::span<const double> q_exact) {
  require_same_size(q_num, q_exact, "rel_norms");
  double e2 = 0.0, x2 = 0.0, einf = 0.0, xinf = 0.0;
  for (std::size_t i = 0; i < q_num.size(); ++i) {
    const double e = q_num[i] - q_exact[i];
    e2 += e * e;
    x2 += q_exact[i] * q_exact[i];
    einf = std::max(einf, std::abs(e));
    xinf = std::max(xinf, std::abs(q_exact[i]));
  }
  if (xinf == 0.0) throw ArgumentError("rel_norms: exact field is identically zero");
  return {std::sqrt(e2) / std::sqrt(x2), einf / xinf};
}

ErrorSplit dissipation_dispersion(std::span<const double> q_num, std::span<const double> q_exact,
                                  const QuadratureRule& rule) {
  require_same_size(q_num, q_exact, "dissipation_dispersion");
  const std::size_t n = q_num.size();
  const double mean_x = rule.integrate(q_exact) / kFourPi;
  const double mean_n = rule.integrate(q_num) / kFourPi;

  std::vector<double> dx(n), dn(n), prod(n), sq(n), diff2(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = q_exact[i] - mean_x;
    dn[i] = q_num[i] - mean_n;
    prod[i] = dx[i] * dn[i];
    sq[i] = dx[i] * dx[i];
    const double d = q_exact[i] - q_num[i];
    diff2[i] = d * d;
  }
  const double var_x = rule.integrate(sq) / kFourPi;
  for (std::size_t i = 0; i < n; ++i) sq[i] = dn[i] * dn[i];
  const double var_n = rule.integrate(sq) / kFourPi;
  const double cov = rule.integrate(prod) / kFourPi;
  const double mse = rule.integrate(diff2) / kFourPi;

  ErrorSplit out;
  out.mean_square_error = mse;
  if (mse == 0.0) return out;
  const double sx = std::sqrt(var_x);
  const double sn = std::sqrt(var_n);
  const double dissipation = (sx - sn) * (sx - sn) + (mean_x - mean_n) * (mean_x - mean_n);
  const double dispersion = 2.0 * (sx * sn - cov);
  out.dissipation = dissipation / mse;
  out.dispersion = dispersion / mse;
  return out;
}

double mass_error(std::span<const double> q_num, std::span<const double> q_exact, const QuadratureRule& rule) {
  require_same_size(q_num, q_exact, "mass_error");
  std::vector<double> d(q_num.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = q_exact[i] - q_num[i];
  return std::abs(rule.integrate(d) / kFourPi);
}

double fit_convergence_rate(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) throw ArgumentError("fit_convergence_rate: need at least two (N, error) pairs");
  const auto used = pairs.size() >= 4 ? pairs.subspan(1) : pairs;
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, err] : used) {
    if (!(n > 0.0) || !(err > 0.0)) throw ArgumentError("fit_convergence_rate: N and errors must be positive");
    sx += std::log(std::sqrt(n));
    sy += std::log(err);
  }
  const double m = static_cast<double>(used.size());
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, err] : used) {
    const double x = std::log(std::sqrt(n)) - mx;
    sxx += x * x;
    sxy += x * (std::log(err) - my);
  }
  if (sxx == 0.0) throw ArgumentError("fit_convergence_rate: all N are equal");
  return -sxy / sxx;
}

DiagnosticsRecord make_record(double time, std::span<const double> q_num,
                              std::optional<std::span<const double>> q_exact,
                              std::span<const double> q_mass_reference, const QuadratureRule& rule) {
  DiagnosticsRecord r;
  r.time = time;
  const auto [lo, hi] = std::minmax_element(q_num.begin(), q_num.end());
  r.field_min = *lo;
  r.field_max = *hi;
  if (q_exact) {
    const RelativeNorms norms = rel_norms(q_num, *q_exact);
    const ErrorSplit split = dissipation_dispersion(q_num, *q_exact, rule);
    r.rel_l2 = norms.l2;
    r.rel_linf = norms.linf;
    r.dissipation = split.dissipation;
    r.dispersion = split.dispersion;
    r.mass_error = mass_error(q_num, *q_exact, rule);
  } else {
    r.mass_error = mass_error(q_num, q_mass_reference, rule);
  }
  return r;
}

}  // namespace slrbf
