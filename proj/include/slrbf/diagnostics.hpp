#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "slrbf/geometry.hpp"

namespace slrbf {

/// Per-node quadrature weights on the sphere.
struct QuadratureRule {
  std::vector<double> weights;

  /// sum_i w_i f_i, summed sequentially in node order.
  double integrate(std::span<const double> f) const;
};

/// Every weight 4 pi / N. Second-order accurate on quasi-uniform nodes.
QuadratureRule equal_weight_rule(const NodeSet& nodes);
QuadratureRule equal_weight_rule(std::size_t num_nodes);

struct RelativeNorms {
  double l2 = 0.0;
  double linf = 0.0;
};

/// Relative discrete l2 and l-infinity errors over nodal values. Throws
/// ArgumentError when the exact field is identically zero.
RelativeNorms rel_norms(std::span<const double> q_num, std::span<const double> q_exact);

/// Takacs dissipation / dispersion split, each divided by the mean square
/// error. Returns (0, 0) when the mean square error is zero.
struct ErrorSplit {
  double dissipation = 0.0;
  double dispersion = 0.0;
  double mean_square_error = 0.0;
};
ErrorSplit dissipation_dispersion(std::span<const double> q_num, std::span<const double> q_exact,
                                  const QuadratureRule& rule);

/// |(1 / 4 pi) integral (q_exact - q_num) dS|.
double mass_error(std::span<const double> q_num, std::span<const double> q_exact, const QuadratureRule& rule);

/// Least-squares slope p of log(error) against -log(sqrt(N)), i.e. error ~
/// C N^(-p/2). With four or more pairs the first (coarsest) is dropped.
double fit_convergence_rate(std::span<const std::pair<double, double>> pairs);

inline constexpr double kNotAvailable = std::numeric_limits<double>::quiet_NaN();

/// One checkpoint of a run. Error fields are NaN when no exact solution is
/// known at `time` (deformational flow between t = 0 and t = T).
struct DiagnosticsRecord {
  double time = 0.0;
  double rel_l2 = kNotAvailable;
  double rel_linf = kNotAvailable;
  double dissipation = kNotAvailable;
  double dispersion = kNotAvailable;
  double mass_error = 0.0;
  double field_min = 0.0;
  double field_max = 0.0;

  bool has_errors() const { return rel_l2 == rel_l2; }
};

/// Builds a record. Without q_exact, the mass error is taken against
/// q_mass_reference (the initial field: the flows here are divergence free,
/// so total mass is invariant).
DiagnosticsRecord make_record(double time, std::span<const double> q_num,
                              std::optional<std::span<const double>> q_exact,
                              std::span<const double> q_mass_reference, const QuadratureRule& rule);

}  // namespace slrbf
