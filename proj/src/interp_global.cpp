#include "slrbf/interp_global.hpp"

#include <cmath>
#include <string>

#include "slrbf/errors.hpp"

namespace slrbf {

DenseMatrix global_kernel_matrix(const NodeSet& nodes, const KernelSpec& kernel) {
  const std::size_t n = nodes.size();
  DenseMatrix a(n, n);
  const auto pts = nodes.points();
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = kernel_eval_r2(kernel, distance2(pts[i], pts[j]));
  }
  return a;
}

GlobalInterpolant GlobalInterpolant::build(const NodeSet& nodes, std::optional<double> epsilon,
                                           const EpsilonSearch& search) {
  // two equal rows make the matrix singular; roundoff can hide the zero pivot
  if (const auto dup = nodes.find_duplicate()) {
    throw NotPositiveDefinite("global kernel matrix: nodes " + std::to_string(dup->first) + " and " +
                              std::to_string(dup->second) + " coincide");
  }
  GlobalInterpolant gi;
  gi.nodes_ = nodes;

  if (epsilon) {
    gi.kernel_ = KernelSpec::imq(*epsilon);
    try {
      gi.chol_ = cholesky(global_kernel_matrix(nodes, gi.kernel_));
    } catch (const NotPositiveDefinite& e) {
      throw NotPositiveDefinite(std::string(e.what()) + "; try a larger epsilon");
    }
    gi.attempts_ = 1;
    gi.condition_ = 1.0 / gi.chol_.rcond();
    return gi;
  }

  double eps = search.initial_epsilon > 0.0 ? search.initial_epsilon
                                            : std::sqrt(static_cast<double>(nodes.size())) / 32.0;

  // Factorizes at eps; true when the result is admissible.
  Factorization trial;
  double trial_cond = 0.0;
  auto attempt = [&](double e) {
    ++gi.attempts_;
    trial = Factorization();
    try {
      trial = cholesky(global_kernel_matrix(nodes, KernelSpec::imq(e)));
    } catch (const NotPositiveDefinite&) {
      return false;
    }
    trial_cond = 1.0 / trial.rcond();
    return trial_cond <= search.max_condition;
  };
  auto accept = [&](double e) {
    gi.kernel_ = KernelSpec::imq(e);
    gi.chol_ = std::move(trial);
    gi.condition_ = trial_cond;
  };

  double hi = 0.0;  // smallest accepted
  double lo = 0.0;  // largest rejected below hi
  if (attempt(eps)) {
    accept(eps);
    hi = eps;
    for (int k = 0; k < search.max_doublings; ++k) {
      const double e = hi / 2.0;
      if (!attempt(e)) {
        lo = e;
        break;
      }
      accept(e);
      hi = e;
    }
  } else {
    lo = eps;
    for (int k = 0; k < search.max_doublings; ++k) {
      const double e = lo * 2.0;
      if (attempt(e)) {
        accept(e);
        hi = e;
        break;
      }
      lo = e;
    }
    if (hi == 0.0) {
      throw NotPositiveDefinite("global interpolant: no shape parameter up to " + std::to_string(lo) +
                                " gave an acceptable factorization; check for duplicate nodes");
    }
  }
  for (int k = 0; lo > 0.0 && k < search.refine_steps; ++k) {
    const double mid = std::sqrt(lo * hi);
    if (attempt(mid)) {
      accept(mid);
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return gi;
}

void GlobalInterpolant::fit(std::span<const double> values) {
  if (values.size() != nodes_.size()) {
    throw ArgumentError("fit_global: expected " + std::to_string(nodes_.size()) + " values, got " +
                        std::to_string(values.size()));
  }
  coeffs_.assign(values.begin(), values.end());
  chol_.solve_in_place(coeffs_);
  fitted_ = true;
}

void GlobalInterpolant::evaluate(std::span<const Vec3> points, std::span<double> out) const {
  if (!fitted_) throw ArgumentError("eval_global: fit() has not been called");
  if (out.size() != points.size()) throw ArgumentError("eval_global: output size mismatch");
  const auto nodes = nodes_.points();
  const std::size_t n = nodes.size();
  const double e2 = kernel_.epsilon * kernel_.epsilon;
  const double* c = coeffs_.data();

#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Vec3 q = points[p];
    // Four independent partial sums; the combination order is fixed, so the
    // result does not depend on the thread count.
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
      for (int l = 0; l < 4; ++l) {
        const double r2 = distance2(q, nodes[k + l]);
        s[l] += c[k + l] / std::sqrt(1.0 + e2 * r2);
      }
    }
    for (; k < n; ++k) s[0] += c[k] / std::sqrt(1.0 + e2 * distance2(q, nodes[k]));
    out[p] = (s[0] + s[1]) + (s[2] + s[3]);
  }
}

std::vector<double> GlobalInterpolant::evaluate(std::span<const Vec3> points) const {
  std::vector<double> out(points.size());
  evaluate(points, out);
  return out;
}

void GlobalInterpolant::interpolate(std::span<const double> field, std::span<const Vec3> targets,
                                    std::span<double> out) {
  fit(field);
  evaluate(targets, out);
}

}  // namespace slrbf
