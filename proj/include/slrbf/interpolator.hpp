#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "slrbf/geometry.hpp"

namespace slrbf {

/// Maps nodal values of a field to values at arbitrary points on the sphere.
/// One interpolation per semi-Lagrangian step.
class Interpolator {
 public:
  virtual ~Interpolator() = default;

  /// field has one value per node; out has one slot per target.
  virtual void interpolate(std::span<const double> field, std::span<const Vec3> targets,
                           std::span<double> out) = 0;

  virtual std::string_view name() const = 0;

  /// Targets that fell outside every local support and needed a fallback.
  virtual std::size_t fallback_count() const { return 0; }
};

}  // namespace slrbf
