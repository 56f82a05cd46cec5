#pragma once

#include "imoc/measure.hpp"

namespace imoc {

/// Time change pi(t) = (t + |mu|([0,t])) / (T + ||mu||); with left_limit
/// set, uses |mu|([0,t)) so pi(t-) is available (pi(0-) = 0).
double pi_map(const VectorMeasure& mu, double t, bool left_limit = false);

/// Canonical graph completion of mu: theta is the monotone pseudo-inverse
/// of pi, affine between atom plateaus; phi follows F off atom intervals
/// and accumulates the rescaled atom profile across each I_i.
GraphCompletion build_completion(const VectorMeasure& mu);

/// A solution of the reparametrized system mapped back to original time.
struct OriginalTimeSolution {
  std::vector<double> t;
  Matrix x;  // n x t.size(); columns at atom times appear twice (t-, t+)
  struct Arc {
    int atom_index = 0;
    double t = 0.0;
    std::vector<double> tau;  // arc parameter in [0,1]
    Matrix x;                 // n x tau.size()
  };
  std::vector<Arc> arcs;
};

class Trajectory;  // sim module

/// x(t) = y(pi(t)) on the given grid plus both one-sided values at every
/// atom; each atom contributes the arc y restricted to I_i reparametrized
/// by alpha. Throws ConsistencyError when y's completion does not match mu's.
OriginalTimeSolution push_forward(const Trajectory& y, const VectorMeasure& mu,
                                  const std::vector<double>& t_grid,
                                  int arc_samples = 65);

}  // namespace imoc
