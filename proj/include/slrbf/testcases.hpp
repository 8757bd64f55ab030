#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slrbf/geometry.hpp"
#include "slrbf/transport.hpp"

namespace slrbf {

/// Solid-body rotation at angle alpha to the equator, converted from
/// (u, v) = (sin th sin la sin a - cos th cos a, cos la sin a) to Cartesian.
/// For alpha = pi/2, (1, 0, 0) moves toward +z with unit speed.
VelocityField solid_body_velocity(double alpha);

/// Axis k of the rigid rotation u = k x x generated by solid_body_velocity.
Vec3 solid_body_axis(double alpha);

/// Rotates x by angle t about the unit axis k (right-handed).
Vec3 rotate_about(const Vec3& x, const Vec3& k, double t);

inline constexpr double kCosineBellRadius = 1.0 / 3.0;
inline constexpr double kDeformationPeriod = 5.0;

/// Cosine bell of radius 1/3 centred at (1, 0, 0).
double cosine_bell_ic(const Vec3& x);

/// Reversing deformational flow with period T = 5 (including the 2 pi / T
/// background zonal rotation).
VelocityField deformational_velocity();

/// 0.1 + 0.9 (q1 + q2), cosine bells of radius 1/2 at p1, p2.
double deform_cosine_ic(const Vec3& x);

/// 0.95 (exp(-5 |x - p1|^2) + exp(-5 |x - p2|^2)).
double deform_gauss_ic(const Vec3& x);

inline const Vec3 kBellCenter1{0.8660254037844386, 0.5, 0.0};
inline const Vec3 kBellCenter2{0.8660254037844386, -0.5, 0.0};

enum class TestCaseName { SolidBodyCosine, DeformCosine, DeformGauss };

std::string to_string(TestCaseName name);
TestCaseName testcase_from_string(const std::string& s);

struct TestCase {
  TestCaseName name = TestCaseName::SolidBodyCosine;
  VelocityField velocity;
  std::function<double(const Vec3&)> initial;
  /// Exact pointwise solution at time t, where one is known.
  std::function<std::optional<double>(const Vec3&, double)> exact_at;
  double t_final_default = 0.0;
};

/// alpha only affects the solid-body case.
TestCase make_testcase(TestCaseName name, double alpha = 1.5707963267948966);

std::vector<double> sample(const NodeSet& nodes, const std::function<double(const Vec3&)>& f);

/// Nodal exact solution at t, or nullopt where none is known.
std::optional<std::vector<double>> exact_field(const TestCase& tc, const NodeSet& nodes, double t);

/// ExactProvider bound to a test case and node set.
ExactProvider exact_provider(const TestCase& tc, const NodeSet& nodes);

}  // namespace slrbf
