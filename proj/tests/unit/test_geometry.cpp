#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "slrbf/errors.hpp"
#include "slrbf/geometry.hpp"

using namespace slrbf;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return project_to_sphere({g(rng), g(rng), g(rng)});
}

// Exhaustive scan: smallest distance, then smallest index.
Index brute_nearest(const NodeSet& s, const Vec3& q) {
  Index best = 0;
  double bd = distance2(s[0], q);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double d = distance2(s[i], q);
    if (d < bd) {
      bd = d;
      best = static_cast<Index>(i);
    }
  }
  return best;
}

std::vector<Index> brute_knn(const NodeSet& s, const Vec3& q, std::size_t k) {
  std::vector<Index> idx(s.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Index>(i);
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    const double da = distance2(s[a], q), db = distance2(s[b], q);
    return da != db ? da < db : a < b;
  });
  idx.resize(k);
  return idx;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("project_to_sphere") {
  CHECK(project_to_sphere({2, 0, 0}) == Vec3{1, 0, 0});
  const Vec3 p = project_to_sphere({1, 1, 1});
  const double s = 1.0 / std::sqrt(3.0);
  CHECK(p.x == doctest::Approx(s).epsilon(1e-15));
  CHECK(p.y == doctest::Approx(s).epsilon(1e-15));
  CHECK(p.z == doctest::Approx(s).epsilon(1e-15));
  const Vec3 q = project_to_sphere(p);
  CHECK(distance(p, q) <= 1e-16);
  CHECK_THROWS_AS(project_to_sphere({0, 0, 0}), DomainError);
}

TEST_CASE("spherical coordinates and tangent frame") {
  SUBCASE("axis examples") {
    const Vec3 x = to_cartesian({0.0, 0.0});
    CHECK(distance(x, {1, 0, 0}) < 1e-15);
    const SphericalBasis b = spherical_basis({0.0, 0.0});
    CHECK(distance(b.lambda_hat, {0, 1, 0}) < 1e-15);
    CHECK(distance(b.theta_hat, {0, 0, 1}) < 1e-15);
    CHECK(distance(to_cartesian({std::numbers::pi / 2, 0.0}), {0, 1, 0}) < 1e-15);
  }
  SUBCASE("orthonormal frame and round trip") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lam(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> th(-1.5, 1.5);
    for (int i = 0; i < 1000; ++i) {
      const SphericalCoords sc{lam(rng), th(rng)};
      const Vec3 x = to_cartesian(sc);
      const SphericalBasis b = spherical_basis(sc);
      CHECK(std::abs(norm(b.lambda_hat) - 1.0) <= 1e-14);
      CHECK(std::abs(norm(b.theta_hat) - 1.0) <= 1e-14);
      CHECK(std::abs(dot(b.lambda_hat, b.theta_hat)) <= 1e-14);
      CHECK(std::abs(dot(b.lambda_hat, x)) <= 1e-14);
      CHECK(std::abs(dot(b.theta_hat, x)) <= 1e-14);
      // recover with atan2 / asin directly
      CHECK(std::abs(std::atan2(x.y, x.x) - sc.lambda) <= 1e-13);
      CHECK(std::abs(std::asin(x.z) - sc.theta) <= 1e-13);
      const SphericalCoords back = to_spherical(x);
      CHECK(std::abs(back.lambda - sc.lambda) <= 1e-13);
      CHECK(std::abs(back.theta - sc.theta) <= 1e-13);
    }
  }
}

TEST_CASE("icosahedral node counts and nesting") {
  const NodeSet l0 = icosahedral_nodes(0);
  CHECK(l0.size() == 12);
  for (const Vec3& v : l0.points()) CHECK(std::abs(norm(v) - 1.0) <= 1e-13);
  // two vertices on the z axis
  int polar = 0;
  for (const Vec3& v : l0.points()) polar += std::abs(std::abs(v.z) - 1.0) < 1e-15;
  CHECK(polar == 2);

  const NodeSet l3 = icosahedral_nodes(3);
  const NodeSet l4 = icosahedral_nodes(4);
  CHECK(l3.size() == 642);
  CHECK(l4.size() == 2562);
  for (std::size_t i = 0; i < l3.size(); ++i) CHECK(l3[i] == l4[i]);
  CHECK_FALSE(l4.find_duplicate());
  CHECK_THROWS_AS(icosahedral_nodes(kMaxIcosahedralLevel + 1), ConfigError);

  const NodeSet again = icosahedral_nodes(4);
  for (std::size_t i = 0; i < l4.size(); ++i) REQUIRE(again[i] == l4[i]);
}

TEST_CASE("level 5 separation and spacing") {
  const NodeSet s = icosahedral_nodes(5);
  REQUIRE(s.size() == 10242);
  const double h = 2.0 / std::sqrt(static_cast<double>(s.size()));
  double dmin = 1e9;
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::abs(norm(s[i]) - 1.0) <= 1e-13);
    for (std::size_t j = i + 1; j < s.size(); ++j) dmin = std::min(dmin, distance2(s[i], s[j]));
  }
  dmin = std::sqrt(dmin);
  CHECK(dmin >= h / 1.5);
  CHECK(dmin <= h * 2.0);
  CHECK(s.spacing() >= h / 2.0);
  CHECK(s.spacing() <= h * 2.0);
}

TEST_CASE("frequency icosahedral counts") {
  for (int f : {1, 2, 3, 5, 24}) {
    const NodeSet s = icosahedral_nodes_frequency(f);
    CHECK(s.size() == static_cast<std::size_t>(10 * f * f + 2));
    CHECK_FALSE(s.find_duplicate());
  }
  const auto s = icosahedral_nodes_for_count(5762);
  REQUIRE(s);
  CHECK(s->size() == 5762);
  CHECK_FALSE(icosahedral_nodes_for_count(5000));
  // bisection counts resolve to the bisection ordering
  const auto b = icosahedral_nodes_for_count(642);
  REQUIRE(b);
  const NodeSet l3 = icosahedral_nodes(3);
  for (std::size_t i = 0; i < l3.size(); ++i) REQUIRE((*b)[i] == l3[i]);
}

TEST_CASE("nearest neighbour against exhaustive scan") {
  const NodeSet s = icosahedral_nodes(4);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 3000; ++t) {
    const Vec3 q = random_unit(rng);
    REQUIRE(s.nearest(q) == brute_nearest(s, q));
  }
  for (std::size_t j = 0; j < s.size(); j += 37) CHECK(s.nearest(s[j]) == static_cast<Index>(j));

  // exact tie: a point equidistant from two nodes resolves to the smaller index
  const NodeSet pair(std::vector<Vec3>{{0, 1, 0}, {1, 0, 0}});
  const Vec3 mid{1.0, 1.0, 0.0};
  CHECK(distance2(pair[0], mid) == distance2(pair[1], mid));
  CHECK(pair.nearest(mid) == 0);
}

TEST_CASE("knn against full sort") {
  const NodeSet s = icosahedral_nodes(4);
  std::mt19937_64 rng(12);
  for (int t = 0; t < 300; ++t) {
    const Vec3 q = random_unit(rng);
    for (std::size_t k : {1, 17, 31, 84}) {
      const auto got = s.knn(q, k);
      REQUIRE(got == brute_knn(s, q, k));
    }
    CHECK(s.knn(q, 1)[0] == s.nearest(q));
  }
  const NodeSet small = icosahedral_nodes(1);
  auto all = small.knn({0, 0, 1}, small.size());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == static_cast<Index>(i));
  CHECK_THROWS_AS(small.knn({0, 0, 1}, small.size() + 1), ArgumentError);
}

TEST_CASE("radius queries against exhaustive scan") {
  const NodeSet s = icosahedral_nodes(4);
  std::mt19937_64 rng(13);
  std::vector<Index> got;
  for (int t = 0; t < 200; ++t) {
    const Vec3 q = random_unit(rng);
    const double r = 0.05 + 0.3 * (t % 7) / 7.0;
    got.clear();
    s.tree().within_radius(q, r, got);
    std::vector<Index> want;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (distance2(s[i], q) < r * r) want.push_back(static_cast<Index>(i));
    }
    REQUIRE(got == want);
  }
}

TEST_CASE("node files") {
  SUBCASE("three axis points") {
    const auto p = write_temp("slrbf_axes.txt", "# axes\n1 0 0\n0 1 0\n\n0 0 1  # z\n");
    const NodeSet s = load_nodes(p);
    CHECK(s.size() == 3);
    CHECK(s[2] == Vec3{0, 0, 1});
  }
  SUBCASE("slightly off-sphere points are projected") {
    const auto p = write_temp("slrbf_near.txt", "1.0000005 0 0\n0 1 0\n");
    const NodeSet s = load_nodes(p);
    CHECK(std::abs(norm(s[0]) - 1.0) <= 1e-15);
  }
  SUBCASE("off-sphere point") {
    const auto p = write_temp("slrbf_off.txt", "1 0 0\n0.5 0.5 0.5\n");
    CHECK_THROWS_AS(load_nodes(p), DataError);
  }
  SUBCASE("malformed line reports its number") {
    const auto p = write_temp("slrbf_bad.txt", "1 0 0\n0 1\n");
    try {
      load_nodes(p);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }
  SUBCASE("round trip to the last bit of projection") {
    const NodeSet s = icosahedral_nodes(2);
    const auto p = std::filesystem::temp_directory_path() / "slrbf_rt.txt";
    save_nodes(s, p);
    const NodeSet t = load_nodes(p);
    REQUIRE(t.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(distance(t[i], s[i]) <= 1e-15);
  }
}

TEST_CASE("fibonacci nodes") {
  const NodeSet f = fibonacci_nodes(131);
  CHECK(f.size() == 131);
  CHECK_FALSE(f.find_duplicate());
  for (const Vec3& v : f.points()) CHECK(std::abs(norm(v) - 1.0) <= 1e-13);
  const double h = 2.0 / std::sqrt(131.0);
  CHECK(f.spacing() > h / 2.0);
  CHECK(f.spacing() < h * 2.0);
}
