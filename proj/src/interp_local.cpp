#include "slrbf/interp_local.hpp"

#include <Eigen/Core>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <exception>
#include <mutex>
#include <string>

#include "slrbf/errors.hpp"

namespace slrbf {

DenseMatrix augmented_matrix(std::span<const Vec3> points, double scale, const KernelSpec& kernel,
                             const SHBasis& sh) {
  const std::size_t n = points.size();
  const std::size_t m = static_cast<std::size_t>(sh.dim());
  const double inv_s2 = 1.0 / (scale * scale);
  DenseMatrix a(n + m, n + m);
  std::vector<double> p(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = kernel_eval_r2(kernel, distance2(points[i], points[j]) * inv_s2);
    }
    sh_eval(sh, points[i], p);
    for (std::size_t k = 0; k < m; ++k) {
      a(i, n + k) = p[k];
      a(n + k, i) = p[k];
    }
  }
  return a;
}

AugmentedSystem AugmentedSystem::factor(std::span<const Vec3> points, double scale, const KernelSpec& kernel,
                                        const SHBasis& sh) {
  const std::size_t n = points.size();
  const std::size_t m = static_cast<std::size_t>(sh.dim());
  if (n < m) throw SingularMatrix("augmented system: fewer points than harmonics");

  Eigen::MatrixXd p(n, m);
  std::vector<double> y(m);
  for (std::size_t i = 0; i < n; ++i) {
    sh_eval(sh, points[i], y);
    for (std::size_t k = 0; k < m; ++k) p(i, k) = y[k];
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(p);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);

  AugmentedSystem sys;
  sys.n_ = n;
  sys.m_ = m;
  sys.scale_ = scale;
  sys.r_.assign(m * m, 0.0);
  double rmax = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) sys.r_[i * m + j] = qr.matrixQR()(i, j);
    rmax = std::max(rmax, std::abs(sys.r_[i * m + i]));
  }
  const double rank_tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * rmax;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(std::abs(sys.r_[i * m + i]) > rank_tol)) {
      throw SingularMatrix("augmented system: harmonic block is rank deficient on these points");
    }
  }

  const double inv_s2 = 1.0 / (scale * scale);
  DenseMatrix a(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = kernel_eval_r2(kernel, distance2(points[i], points[j]) * inv_s2);
    for (std::size_t k = 0; k < m; ++k) {
      a(i, n + k) = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      a(n + k, i) = a(i, n + k);
    }
  }
  sys.lu_ = lu(std::move(a));
  return sys;
}

void AugmentedSystem::solve_in_place(std::span<double> rhs) const {
  if (rhs.size() != size()) throw ArgumentError("augmented system: right-hand side has the wrong length");
  std::fill(rhs.begin() + static_cast<std::ptrdiff_t>(n_), rhs.end(), 0.0);
  lu_.solve_in_place(rhs);
  // d = R^{-1} d_Q by back substitution.
  double* d = rhs.data() + n_;
  for (std::size_t i = m_; i-- > 0;) {
    double s = d[i];
    for (std::size_t j = i + 1; j < m_; ++j) s -= r_[i * m_ + j] * d[j];
    d[i] = s / r_[i * m_ + i];
  }
}

LocalInterpolant LocalInterpolant::build(const NodeSet& nodes, int stencil_size) {
  const StencilBasis basis = sh_degree_for_stencil(stencil_size);
  if (stencil_size <= basis.sh.dim()) {
    throw ConfigError("local stencil size n = " + std::to_string(stencil_size) +
                      " must exceed the number of harmonics " + std::to_string(basis.sh.dim()));
  }
  if (static_cast<std::size_t>(stencil_size) > nodes.size()) {
    throw ConfigError("local stencil size n = " + std::to_string(stencil_size) + " exceeds N = " +
                      std::to_string(nodes.size()));
  }

  LocalInterpolant li;
  li.nodes_ = nodes;
  li.n_ = stencil_size;
  li.sh_ = basis.sh;
  li.kernel_ = KernelSpec::phs(basis.phs_order);
  li.stencils_.resize(nodes.size());

  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto pts = nodes.points();

#pragma omp parallel
  {
    std::vector<Vec3> member_pts(static_cast<std::size_t>(stencil_size));
#pragma omp for schedule(dynamic, 32)
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      try {
        Stencil& st = li.stencils_[k];
        st.center = static_cast<Index>(k);
        st.members = nodes.knn(pts[k], static_cast<std::size_t>(stencil_size));
        // A coincident node with a smaller index could be listed first.
        auto self = std::find(st.members.begin(), st.members.end(), st.center);
        if (self == st.members.end()) {
          st.members.back() = st.center;
          self = st.members.end() - 1;
        }
        std::rotate(st.members.begin(), self, self + 1);

        double scale = 0.0;
        for (std::size_t j = 0; j < st.members.size(); ++j) {
          member_pts[j] = pts[st.members[j]];
          scale = std::max(scale, distance(pts[k], member_pts[j]));
        }
        st.scale = scale > 0.0 ? scale : 1.0;
        try {
          st.system = AugmentedSystem::factor(member_pts, st.scale, li.kernel_, li.sh_);
        } catch (const SingularMatrix& e) {
          throw SingularMatrix("local stencil centred at node " + std::to_string(k) + ": " + e.what());
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return li;
}

StencilFit LocalInterpolant::fit_stencil(const Stencil& st, std::span<const double> values) const {
  if (values.size() != st.members.size()) {
    throw ArgumentError("fit_stencil: expected " + std::to_string(st.members.size()) + " values");
  }
  std::vector<double> rhs(st.system.size(), 0.0);
  std::copy(values.begin(), values.end(), rhs.begin());
  st.system.solve_in_place(rhs);
  StencilFit fit;
  fit.rbf.assign(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(values.size()));
  fit.poly.assign(rhs.begin() + static_cast<std::ptrdiff_t>(values.size()), rhs.end());
  return fit;
}

double LocalInterpolant::evaluate_fit(const Stencil& st, const StencilFit& fit, const Vec3& x) const {
  const double inv_s2 = 1.0 / (st.scale * st.scale);
  double s = 0.0;
  for (std::size_t j = 0; j < st.members.size(); ++j) {
    s += fit.rbf[j] * kernel_eval_r2(kernel_, distance2(x, nodes_[st.members[j]]) * inv_s2);
  }
  const std::vector<double> p = sh_eval(sh_, x);
  for (std::size_t i = 0; i < p.size(); ++i) s += fit.poly[i] * p[i];
  return s;
}

double LocalInterpolant::evaluate_one(std::span<const double> field, const Vec3& target, std::vector<double>& rhs,
                                      std::vector<double>& p) const {
  const Stencil& st = stencils_[nodes_.nearest(target)];
  const std::size_t n = st.members.size();
  for (std::size_t j = 0; j < n; ++j) rhs[j] = field[st.members[j]];
  st.system.solve_in_place(rhs);

  const double inv_s2 = 1.0 / (st.scale * st.scale);
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    s += rhs[j] * kernel_eval_r2(kernel_, distance2(target, nodes_[st.members[j]]) * inv_s2);
  }
  sh_eval(sh_, target, p);
  for (std::size_t i = 0; i < p.size(); ++i) s += rhs[n + i] * p[i];
  return s;
}

void LocalInterpolant::evaluate(std::span<const double> field, std::span<const Vec3> targets,
                                std::span<double> out) const {
  if (field.size() != nodes_.size()) throw ArgumentError("eval_local: field size does not match node count");
  if (out.size() != targets.size()) throw ArgumentError("eval_local: output size mismatch");
#pragma omp parallel
  {
    std::vector<double> rhs(system_size());
    std::vector<double> p(static_cast<std::size_t>(sh_.dim()));
#pragma omp for schedule(static)
    for (std::size_t t = 0; t < targets.size(); ++t) out[t] = evaluate_one(field, targets[t], rhs, p);
  }
}

std::vector<double> LocalInterpolant::evaluate(std::span<const double> field, std::span<const Vec3> targets) const {
  std::vector<double> out(targets.size());
  evaluate(field, targets, out);
  return out;
}

}  // namespace slrbf
