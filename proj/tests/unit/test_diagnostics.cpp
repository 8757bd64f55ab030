#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "slrbf/basis.hpp"
#include "slrbf/diagnostics.hpp"
#include "slrbf/errors.hpp"
#include "slrbf/testcases.hpp"

using namespace slrbf;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> perturbed(std::span<const double> f, double amp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> out(f.begin(), f.end());
  for (double& v : out) v += amp * g(rng);
  return out;
}

double worst_harmonic_product_error(const NodeSet& s) {
  const QuadratureRule rule = equal_weight_rule(s);
  const SHBasis b{4};
  std::vector<std::vector<double>> y(b.dim(), std::vector<double>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto v = sh_eval(b, s[i]);
    for (int k = 0; k < b.dim(); ++k) y[k][i] = v[k];
  }
  double worst = 0.0;
  std::vector<double> prod(s.size());
  for (int a = 0; a < b.dim(); ++a)
    for (int c = a; c < b.dim(); ++c) {
      for (std::size_t i = 0; i < s.size(); ++i) prod[i] = y[a][i] * y[c][i];
      worst = std::max(worst, std::abs(rule.integrate(prod) - (a == c ? 1.0 : 0.0)));
    }
  return worst;
}

}  // namespace

TEST_CASE("equal-weight quadrature") {
  const NodeSet s = icosahedral_nodes(5);
  const QuadratureRule rule = equal_weight_rule(s);
  CHECK(rule.integrate(std::vector<double>(s.size(), 1.0)) == doctest::Approx(4 * kPi).epsilon(1e-12));
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  CHECK(std::abs(wsum - 4 * kPi) <= 1e-3 * 4 * kPi);
  CHECK(std::abs(rule.integrate(sample(s, [](const Vec3& x) { return x.z; })))<= 1e-12);

  auto y20 = [](const Vec3& x) { return sh_eval(SHBasis{2}, x)[sh_index(2, 0)]; };
  CHECK(rule.integrate(sample(s, [&](const Vec3& x) { return y20(x) * y20(x); })) == doctest::Approx(1.0).epsilon(2e-2));

  // products of harmonics up to degree 4: within 3 percent of orthonormality
  // on equal-area nodes; icosahedral cells are not equal-area and sit near 3%
  const double fib = worst_harmonic_product_error(fibonacci_nodes(10242));
  const double ico = worst_harmonic_product_error(s);
  MESSAGE("worst harmonic product error: fibonacci " << fib << ", icosahedral " << ico);
  CHECK(fib <= 3e-2);
  CHECK(ico <= 4e-2);
  CHECK_THROWS_AS(rule.integrate(std::vector<double>(3)), ArgumentError);
}

TEST_CASE("relative norms") {
  const NodeSet s = icosahedral_nodes(3);
  const auto q = sample(s, deform_cosine_ic);
  const RelativeNorms zero = rel_norms(q, q);
  CHECK(zero.l2 == 0.0);
  CHECK(zero.linf == 0.0);
  std::vector<double> scaled(q);
  for (double& v : scaled) v *= 1.01;
  const RelativeNorms r = rel_norms(scaled, q);
  CHECK(r.l2 == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(r.linf == doctest::Approx(0.01).epsilon(1e-12));

  const auto p = perturbed(q, 1e-3, 1);
  long double e2 = 0, x2 = 0, ei = 0, xi = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    e2 += (long double)(p[i] - q[i]) * (p[i] - q[i]);
    x2 += (long double)q[i] * q[i];
    ei = std::max(ei, (long double)std::abs(p[i] - q[i]));
    xi = std::max(xi, (long double)std::abs(q[i]));
  }
  const RelativeNorms h = rel_norms(p, q);
  CHECK(h.l2 == doctest::Approx(static_cast<double>(std::sqrt(e2 / x2))).epsilon(1e-13));
  CHECK(h.linf == doctest::Approx(static_cast<double>(ei / xi)).epsilon(1e-15));
  CHECK_THROWS_AS(rel_norms(q, std::vector<double>(q.size(), 0.0)), ArgumentError);
  CHECK_THROWS_AS(rel_norms(q, std::vector<double>(3, 1.0)), ArgumentError);
}

TEST_CASE("dissipation and dispersion") {
  const NodeSet s = icosahedral_nodes(4);
  const QuadratureRule rule = equal_weight_rule(s);
  const auto q = sample(s, cosine_bell_ic);

  SUBCASE("identical fields") {
    const ErrorSplit e = dissipation_dispersion(q, q, rule);
    CHECK(e.dissipation == 0.0);
    CHECK(e.dispersion == 0.0);
    CHECK(e.mean_square_error == 0.0);
  }
  SUBCASE("constant shift is pure dissipation") {
    std::vector<double> p(q);
    for (double& v : p) v += 0.05;
    const ErrorSplit e = dissipation_dispersion(p, q, rule);
    CHECK(e.dissipation == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(e.dispersion) <= 1e-10);
  }
  SUBCASE("amplified anomaly is pure dissipation") {
    const double mean = rule.integrate(q) / (4 * kPi);
    std::vector<double> p(q);
    for (double& v : p) v = mean + 2.0 * (v - mean);
    long double var = 0;
    for (double v : q) var += (long double)(v - mean) * (v - mean);
    var /= q.size();
    const ErrorSplit e = dissipation_dispersion(p, q, rule);
    CHECK(e.mean_square_error == doctest::Approx(static_cast<double>(var)).epsilon(1e-10));
    CHECK(e.dissipation == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(e.dispersion) <= 1e-10);
  }
  SUBCASE("split sums to one for arbitrary pairs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto p = perturbed(q, 0.01 * (seed + 1), seed);
      const ErrorSplit e = dissipation_dispersion(p, q, rule);
      CHECK(std::abs(e.dissipation + e.dispersion - 1.0) <= 1e-10);
      CHECK(e.dissipation >= 0.0);
    }
    // a phase error: rotated bell
    const Vec3 k{0, 0, 1};
    const auto p = sample(s, [&](const Vec3& x) { return cosine_bell_ic(rotate_about(x, k, -0.05)); });
    const ErrorSplit e = dissipation_dispersion(p, q, rule);
    CHECK(std::abs(e.dissipation + e.dispersion - 1.0) <= 1e-10);
    CHECK(e.dispersion > e.dissipation);
  }
}

TEST_CASE("mass error") {
  const NodeSet s = icosahedral_nodes(3);
  const QuadratureRule rule = equal_weight_rule(s);
  const auto q = sample(s, deform_gauss_ic);
  CHECK(mass_error(q, q, rule) == 0.0);
  std::vector<double> p(q);
  for (double& v : p) v += 0.25;
  CHECK(mass_error(p, q, rule) == doctest::Approx(0.25).epsilon(1e-12));
  p = q;
  p[17] += 0.3;
  CHECK(mass_error(p, q, rule) == doctest::Approx(0.3 / s.size()).epsilon(1e-10));
}

TEST_CASE("convergence rate fit") {
  const std::vector<std::pair<double, double>> exact{{1000, 1e-2}, {4000, 2.5e-3}, {16000, 6.25e-4}};
  CHECK(fit_convergence_rate(exact) == doctest::Approx(2.0).epsilon(1e-12));
  const std::vector<std::pair<double, double>> two{{100, 1e-2}, {400, 2.5e-3}};
  CHECK(fit_convergence_rate(two) == doctest::Approx(2.0).epsilon(1e-12));

  // the first point is dropped once there are four or more
  const std::vector<std::pair<double, double>> outlier{{100, 1.0}, {400, 1e-2}, {1600, 5e-3}, {6400, 2.5e-3}};
  CHECK(fit_convergence_rate(outlier) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<double, double>> pts;
    for (double n : {642.0, 2562.0, 10242.0, 40962.0, 163842.0}) {
      pts.emplace_back(n, 3.0 * std::pow(std::sqrt(n), -3.0) * (1.0 + noise(rng)));
    }
    const double p = fit_convergence_rate(pts);
    CHECK(p >= 2.8);
    CHECK(p <= 3.2);
  }
  CHECK_THROWS_AS(fit_convergence_rate(std::vector<std::pair<double, double>>{{1, 1}}), ArgumentError);
  CHECK_THROWS_AS(fit_convergence_rate(std::vector<std::pair<double, double>>{{1, 1}, {4, 0}}), ArgumentError);
}

TEST_CASE("diagnostics do not depend on node order") {
  const NodeSet s = icosahedral_nodes(3);
  const QuadratureRule rule = equal_weight_rule(s);
  const auto q = sample(s, cosine_bell_ic);
  const auto p = perturbed(q, 0.02, 3);
  std::vector<std::size_t> perm(q.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(4);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> qp(q.size()), pp(q.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    qp[i] = q[perm[i]];
    pp[i] = p[perm[i]];
  }
  const auto a = dissipation_dispersion(p, q, rule), b = dissipation_dispersion(pp, qp, rule);
  CHECK(a.dissipation == doctest::Approx(b.dissipation).epsilon(1e-10));
  CHECK(a.dispersion == doctest::Approx(b.dispersion).epsilon(1e-10));
  CHECK(rel_norms(p, q).l2 == doctest::Approx(rel_norms(pp, qp).l2).epsilon(1e-13));
  CHECK(mass_error(p, q, rule) == doctest::Approx(mass_error(pp, qp, rule)).epsilon(1e-9).scale(1e-15));
}

TEST_CASE("records") {
  const NodeSet s = icosahedral_nodes(2);
  const QuadratureRule rule = equal_weight_rule(s);
  const auto q = sample(s, deform_cosine_ic);
  std::vector<double> p(q);
  for (double& v : p) v += 1e-3;
  const DiagnosticsRecord with = make_record(5.0, p, std::span<const double>(q), q, rule);
  CHECK(with.has_errors());
  CHECK(with.mass_error == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(with.field_min == doctest::Approx(0.101));
  const DiagnosticsRecord without = make_record(2.0, p, std::nullopt, q, rule);
  CHECK_FALSE(without.has_errors());
  CHECK(std::isnan(without.dispersion));
  CHECK(without.mass_error == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(without.field_max == *std::max_element(p.begin(), p.end()));
}
