#include "slrbf/testcases.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slrbf/errors.hpp"

namespace slrbf {

namespace {

constexpr double kPi = std::numbers::pi;

double bell(double r, double radius) { return r < radius ? 0.5 * (1.0 + std::cos(kPi * r / radius)) : 0.0; }

double safe_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

}  // namespace

Vec3 solid_body_axis(double alpha) { return {0.0, -std::sin(alpha), -std::cos(alpha)}; }

VelocityField solid_body_velocity(double alpha) {
  // The (u, v) field is exactly the rigid rotation k x x; evaluating the
  // cross product avoids the longitude singularity at the poles.
  const Vec3 k = solid_body_axis(alpha);
  return [k](const Vec3& x, double) { return cross(k, x); };
}

Vec3 rotate_about(const Vec3& x, const Vec3& k, double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  return c * x + s * cross(k, x) + ((1.0 - c) * dot(k, x)) * k;
}

double cosine_bell_ic(const Vec3& x) { return bell(safe_acos(x.x), kCosineBellRadius); }

VelocityField deformational_velocity() {
  return [](const Vec3& x, double t) -> Vec3 {
    if (x.x == 0.0 && x.y == 0.0) return {};  // both components vanish at the poles
    const SphericalCoords sc = to_spherical(x);
    const SphericalBasis b = spherical_basis(sc);
    const double T = kDeformationPeriod;
    const double amp = (10.0 / T) * std::cos(kPi * t / T);
    const double shift = 2.0 * kPi * t / T;
    const double s = std::sin(sc.lambda - shift);
    const double u = amp * s * s * std::sin(2.0 * sc.theta) + (2.0 * kPi / T) * std::cos(sc.theta);
    const double v = amp * std::sin(2.0 * (sc.lambda - shift)) * std::cos(sc.theta);
    return u * b.lambda_hat + v * b.theta_hat;
  };
}

double deform_cosine_ic(const Vec3& x) {
  const double q1 = bell(safe_acos(dot(x, kBellCenter1)), 0.5);
  const double q2 = bell(safe_acos(dot(x, kBellCenter2)), 0.5);
  return 0.1 + 0.9 * (q1 + q2);
}

double deform_gauss_ic(const Vec3& x) {
  return 0.95 * (std::exp(-5.0 * distance2(x, kBellCenter1)) + std::exp(-5.0 * distance2(x, kBellCenter2)));
}

std::string to_string(TestCaseName name) {
  switch (name) {
    case TestCaseName::SolidBodyCosine: return "sbr-cosine";
    case TestCaseName::DeformCosine: return "deform-cosine";
    case TestCaseName::DeformGauss: return "deform-gauss";
  }
  return "unknown";
}

TestCaseName testcase_from_string(const std::string& s) {
  if (s == "sbr-cosine") return TestCaseName::SolidBodyCosine;
  if (s == "deform-cosine") return TestCaseName::DeformCosine;
  if (s == "deform-gauss") return TestCaseName::DeformGauss;
  throw ConfigError("unknown testcase '" + s + "' (expected sbr-cosine, deform-cosine or deform-gauss)");
}

TestCase make_testcase(TestCaseName name, double alpha) {
  TestCase tc;
  tc.name = name;
  if (name == TestCaseName::SolidBodyCosine) {
    const Vec3 k = solid_body_axis(alpha);
    tc.velocity = solid_body_velocity(alpha);
    tc.initial = cosine_bell_ic;
    tc.exact_at = [k](const Vec3& x, double t) -> std::optional<double> {
      return cosine_bell_ic(rotate_about(x, k, -t));
    };
    tc.t_final_default = 2.0 * kPi;
    return tc;
  }
  tc.velocity = deformational_velocity();
  tc.initial = name == TestCaseName::DeformCosine ? deform_cosine_ic : deform_gauss_ic;
  tc.exact_at = [ic = tc.initial](const Vec3& x, double t) -> std::optional<double> {
    const double T = kDeformationPeriod;
    if (std::abs(t) <= 1e-9 * T || std::abs(t - T) <= 1e-9 * T) return ic(x);
    return std::nullopt;
  };
  tc.t_final_default = kDeformationPeriod;
  return tc;
}

std::vector<double> sample(const NodeSet& nodes, const std::function<double(const Vec3&)>& f) {
  std::vector<double> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = f(nodes[i]);
  return out;
}

std::optional<std::vector<double>> exact_field(const TestCase& tc, const NodeSet& nodes, double t) {
  if (!tc.exact_at || nodes.size() == 0) return std::nullopt;
  std::vector<double> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::optional<double> v = tc.exact_at(nodes[i], t);
    if (!v) return std::nullopt;
    out[i] = *v;
  }
  return out;
}

ExactProvider exact_provider(const TestCase& tc, const NodeSet& nodes) {
  return [tc, &nodes](double t) { return exact_field(tc, nodes, t); };
}

}  // namespace slrbf
