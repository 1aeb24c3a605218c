#pragma once

#include <functional>

#include "parrep/pdmp/geometry.hpp"

namespace parrep {

struct QuadratureResult {
  double value = 0.0;       // at 2n panels per axis
  double coarse = 0.0;      // at n panels per axis
  double relative_change = 0.0;
};

/// <1_region> = int_region exp(-beta V) / int_[0,1]^2 exp(-beta V) by
/// composite 2-D Gauss-Legendre quadrature at n and 2n panels per unit
/// length. Throws QuadratureNotConverged if the two differ by more than
/// `tolerance` relative.
QuadratureResult quadrature_reference(const std::function<double(pdmp::Vec2)>& V, double beta,
                                      const pdmp::Box& region, int n = 64,
                                      double tolerance = 1e-8);

}  // namespace parrep
