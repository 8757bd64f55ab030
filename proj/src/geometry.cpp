#include "slrbf/geometry.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "slrbf/errors.hpp"

namespace slrbf {

Vec3 project_to_sphere(const Vec3& p) {
  const double r = norm(p);
  if (!(r > 0.0)) throw DomainError("project_to_sphere: zero vector");
  return {p.x / r, p.y / r, p.z / r};
}

Vec3 to_cartesian(const SphericalCoords& sc) {
  const double ct = std::cos(sc.theta);
  return {ct * std::cos(sc.lambda), ct * std::sin(sc.lambda), std::sin(sc.theta)};
}

SphericalCoords to_spherical(const Vec3& x) {
  return {std::atan2(x.y, x.x), std::asin(std::clamp(x.z, -1.0, 1.0))};
}

SphericalBasis spherical_basis(const SphericalCoords& sc) {
  const double sl = std::sin(sc.lambda);
  const double cl = std::cos(sc.lambda);
  const double st = std::sin(sc.theta);
  const double ct = std::cos(sc.theta);
  return {{-sl, cl, 0.0}, {-st * cl, -st * sl, ct}};
}

NodeSet::NodeSet(std::vector<Vec3> points)
    : points_(std::move(points)), tree_(std::make_shared<const KdTree>(points_)) {
  if (points_.empty()) throw ArgumentError("NodeSet: empty point set");
  if (points_.size() == 1) return;
  double sum = 0.0;
  for (const Vec3& p : points_) {
    const auto nn = tree_->knn(p, 2);
    sum += distance(p, points_[nn[0]] == p ? points_[nn[1]] : points_[nn[0]]);
  }
  spacing_h_ = sum / static_cast<double>(points_.size());
}

std::vector<Index> NodeSet::knn(const Vec3& q, std::size_t k) const {
  if (k > size()) throw ArgumentError("knn: n = " + std::to_string(k) + " exceeds N = " + std::to_string(size()));
  return tree_->knn(q, k);
}

std::optional<std::pair<Index, Index>> NodeSet::find_duplicate() const {
  std::optional<std::pair<Index, Index>> found;
  if (size() < 2) return found;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto nn = tree_->knn(points_[i], 2);
    for (Index j : nn) {
      if (static_cast<std::size_t>(j) != i && points_[j] == points_[i]) {
        const std::pair<Index, Index> pair{std::min(static_cast<Index>(i), j), std::max(static_cast<Index>(i), j)};
        if (!found || pair < *found) found = pair;
      }
    }
  }
  return found;
}

namespace {

// Icosahedron with vertices on the +-z axis and two staggered rings of five.
std::vector<Vec3> icosahedron_vertices() {
  std::vector<Vec3> v;
  v.reserve(12);
  v.push_back({0.0, 0.0, 1.0});
  const double zr = 1.0 / std::sqrt(5.0);
  const double rr = 2.0 / std::sqrt(5.0);
  for (int k = 0; k < 5; ++k) {
    const double lon = 2.0 * std::numbers::pi * k / 5.0;
    v.push_back({rr * std::cos(lon), rr * std::sin(lon), zr});
  }
  for (int k = 0; k < 5; ++k) {
    const double lon = 2.0 * std::numbers::pi * (k + 0.5) / 5.0;
    v.push_back({rr * std::cos(lon), rr * std::sin(lon), -zr});
  }
  v.push_back({0.0, 0.0, -1.0});
  return v;
}

using Face = std::array<Index, 3>;

std::vector<Face> icosahedron_faces() {
  std::vector<Face> f;
  f.reserve(20);
  for (int k = 0; k < 5; ++k) {
    const Index u0 = 1 + k;
    const Index u1 = 1 + (k + 1) % 5;
    const Index l0 = 6 + k;
    const Index l1 = 6 + (k + 1) % 5;
    f.push_back({0, u0, u1});
    f.push_back({u0, l0, u1});
    f.push_back({u1, l0, l1});
    f.push_back({l0, 11, l1});
  }
  return f;
}

}  // namespace

NodeSet icosahedral_nodes(int level) {
  if (level < 0 || level > kMaxIcosahedralLevel) {
    throw ConfigError("icosahedral_nodes: level must be in [0, " + std::to_string(kMaxIcosahedralLevel) + "]");
  }
  std::vector<Vec3> pts = icosahedron_vertices();
  std::vector<Face> faces = icosahedron_faces();
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<Index, Index>, Index> midpoint;
    auto mid = [&](Index a, Index b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      pts.push_back(project_to_sphere(pts[key.first] + pts[key.second]));
      const auto id = static_cast<Index>(pts.size() - 1);
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(4 * faces.size());
    for (const Face& f : faces) {
      const Index ab = mid(f[0], f[1]);
      const Index bc = mid(f[1], f[2]);
      const Index ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({ab, f[1], bc});
      next.push_back({ca, bc, f[2]});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  return NodeSet(std::move(pts));
}

NodeSet icosahedral_nodes_frequency(int f) {
  if (f < 1 || f > (1 << kMaxIcosahedralLevel)) {
    throw ConfigError("icosahedral_nodes_frequency: frequency must be in [1, 256]");
  }
  const std::vector<Vec3> verts = icosahedron_vertices();
  const std::vector<Face> faces = icosahedron_faces();
  std::vector<Vec3> pts = verts;

  // Interior edge points, generated once per edge and oriented low -> high.
  std::map<std::pair<Index, Index>, std::size_t> edge_start;
  for (const Face& face : faces) {
    for (int e = 0; e < 3; ++e) {
      const auto key = std::minmax(face[e], face[(e + 1) % 3]);
      if (edge_start.contains(key)) continue;
      edge_start.emplace(key, pts.size());
      for (int i = 1; i < f; ++i) {
        const double t = static_cast<double>(i) / f;
        pts.push_back(project_to_sphere((1.0 - t) * verts[key.first] + t * verts[key.second]));
      }
    }
  }
  for (const Face& face : faces) {
    for (int i = 1; i < f; ++i) {
      for (int j = 1; i + j < f; ++j) {
        const int k = f - i - j;
        const Vec3 p = (static_cast<double>(i) / f) * verts[face[0]] +
                       (static_cast<double>(j) / f) * verts[face[1]] +
                       (static_cast<double>(k) / f) * verts[face[2]];
        pts.push_back(project_to_sphere(p));
      }
    }
  }
  return NodeSet(std::move(pts));
}

NodeSet fibonacci_nodes(std::size_t m) {
  if (m == 0) throw ArgumentError("fibonacci_nodes: m must be positive");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> pts(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(m);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double lon = golden * static_cast<double>(i);
    pts[i] = project_to_sphere({r * std::cos(lon), r * std::sin(lon), z});
  }
  return NodeSet(std::move(pts));
}

NodeSet load_nodes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_nodes: cannot open " + path.string());
  std::vector<Vec3> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    Vec3 p;
    std::string extra;
    if (!(ls >> p.x >> p.y >> p.z) || (ls >> extra)) {
      throw ParseError("load_nodes: expected three reals in " + path.string(), lineno);
    }
    const double r = norm(p);
    if (!std::isfinite(r) || std::abs(r - 1.0) > 1e-6) {
      std::ostringstream msg;
      msg << "load_nodes: point on line " << lineno << " has norm " << r << ", not on the unit sphere";
      throw DataError(msg.str());
    }
    pts.push_back(project_to_sphere(p));
  }
  if (pts.empty()) throw DataError("load_nodes: no points in " + path.string());
  NodeSet nodes(std::move(pts));
  if (auto dup = nodes.find_duplicate()) {
    throw DataError("load_nodes: duplicate nodes " + std::to_string(dup->first) + " and " +
                    std::to_string(dup->second));
  }
  return nodes;
}

void save_nodes(const NodeSet& nodes, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("save_nodes: cannot open " + path.string());
  out << "# " << nodes.size() << " nodes on the unit sphere\n";
  out << std::setprecision(17);
  for (const Vec3& p : nodes.points()) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
}

std::optional<NodeSet> icosahedral_nodes_for_count(std::size_t n) {
  if (n < 12 || (n - 2) % 10 != 0) return std::nullopt;
  const std::size_t f2 = (n - 2) / 10;
  const auto f = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(f2))));
  if (f * f != f2) return std::nullopt;
  for (int level = 0; level <= kMaxIcosahedralLevel; ++level) {
    if (f == (std::size_t{1} << level)) return icosahedral_nodes(level);
  }
  if (f > (std::size_t{1} << kMaxIcosahedralLevel)) return std::nullopt;
  return icosahedral_nodes_frequency(static_cast<int>(f));
}

}  // namespace slrbf
