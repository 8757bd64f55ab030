#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace slrbf {

using Index = std::int32_t;

/// Cartesian 3-vector. Points on the unit sphere use the same type; functions
/// that return "on-sphere" values guarantee |norm - 1| <= 1e-13.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s; y *= s; z *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Squared Euclidean distance. Every distance comparison in the library goes
/// through this one expression so that ties compare bit-identically.
constexpr double distance2(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}
inline double distance(const Vec3& a, const Vec3& b) { return std::sqrt(distance2(a, b)); }

/// Longitude lambda in [-pi, pi], latitude theta in [-pi/2, pi/2].
struct SphericalCoords {
  double lambda = 0.0;
  double theta = 0.0;
};

struct SphericalBasis {
  Vec3 lambda_hat;
  Vec3 theta_hat;
};

/// Returns p / |p|. Throws DomainError for the zero vector.
Vec3 project_to_sphere(const Vec3& p);

Vec3 to_cartesian(const SphericalCoords& sc);
SphericalCoords to_spherical(const Vec3& x);

/// Unit tangent vectors in the directions of increasing longitude and
/// latitude. At the poles the frame is the one implied by the given lambda.
SphericalBasis spherical_basis(const SphericalCoords& sc);

/// Static 3-d kd-tree. Queries order candidates by (squared distance, index)
/// so results are deterministic under ties.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::span<const Vec3> points);

  std::size_t size() const { return points_.size(); }

  Index nearest(const Vec3& q) const;

  /// k nearest indices sorted by ascending distance, index order on ties.
  std::vector<Index> knn(const Vec3& q, std::size_t k) const;

  /// Appends every index with distance2 < radius^2, in ascending index order.
  void within_radius(const Vec3& q, double radius, std::vector<Index>& out) const;

 private:
  struct Node {
    double split = 0.0;
    std::int32_t begin = 0;
    std::int32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int8_t axis = -1;  // -1 marks a leaf
  };

  std::int32_t build(std::int32_t begin, std::int32_t end);

  std::vector<Vec3> points_;
  std::vector<Index> perm_;
  std::vector<Node> nodes_;
};

/// Fixed Eulerian node set on the unit sphere together with its spatial index.
/// Immutable after construction.
class NodeSet {
 public:
  NodeSet() = default;
  /// Takes ownership of points that are already on the sphere. Distinctness is
  /// not checked here; see find_duplicate().
  explicit NodeSet(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Vec3> points() const { return points_; }

  /// Mean nearest-neighbour distance.
  double spacing() const { return spacing_h_; }

  Index nearest(const Vec3& q) const { return tree_->nearest(q); }
  std::vector<Index> knn(const Vec3& q, std::size_t k) const;
  const KdTree& tree() const { return *tree_; }

  /// First pair (i < j) of coincident nodes, if any.
  std::optional<std::pair<Index, Index>> find_duplicate() const;

 private:
  std::vector<Vec3> points_;
  double spacing_h_ = 0.0;
  std::shared_ptr<const KdTree> tree_;
};

inline constexpr int kMaxIcosahedralLevel = 8;

/// Recursive edge bisection of the icosahedron: N = 10 * 4^level + 2.
/// Parents keep their indices, so level l is a prefix of level l + 1.
NodeSet icosahedral_nodes(int level);

/// Icosahedral nodes of arbitrary frequency f (each face edge split into f
/// pieces, then projected): N = 10 f^2 + 2. Covers counts such as 5762,
/// 23042 and 92162 that bisection cannot reach.
NodeSet icosahedral_nodes_frequency(int frequency);

/// Fibonacci-spiral set with exactly m points.
NodeSet fibonacci_nodes(std::size_t m);

/// Reads whitespace-separated x y z triples; '#' starts a comment. Points
/// within 1e-6 of unit norm are projected, anything else is a DataError.
NodeSet load_nodes(const std::filesystem::path& path);

void save_nodes(const NodeSet& nodes, const std::filesystem::path& path);

/// Resolves a node count to a generated icosahedral set (bisection counts
/// first, then general frequency). Returns nullopt if N is not of the form
/// 10 f^2 + 2.
std::optional<NodeSet> icosahedral_nodes_for_count(std::size_t n);

}  // namespace slrbf
