#pragma once

#include "imoc/pwlinear.hpp"

namespace imoc {

/// The pair (theta, phi) bridging reparametrized time [0,1] and original
/// time [0,T]: theta is nondecreasing piecewise linear onto [0,T], constant
/// across each atom interval I_i; phi is the completed cumulative measure.
/// Both share one breakpoint grid in s.
struct GraphCompletion {
  PwLinear theta;  // 1 x points
  PwLinear phi;    // q x points
  struct AtomInterval {
    int atom_index = 0;
    double s_lo = 0.0, s_hi = 0.0;
  };
  std::vector<AtomInterval> atom_intervals;
  double lip_theta = 0.0;  // b
  double lip_phi = 0.0;    // r
  double horizon = 0.0;

  int measure_dim() const { return phi.dim(); }
  bool matches(const GraphCompletion& other, double tol = 1e-12) const;
};

}  // namespace imoc
