#pragma once

#include "imoc/metrics.hpp"

#include <optional>

namespace imoc {

/// A function on [0,1]: Euler polyline node values or a certified
/// fixed-step reference solution, with the decision point that produced it.
class Trajectory {
 public:
  enum class Kind { euler_polyline, reference };

  Trajectory(Kind kind, std::vector<double> s, Matrix values,
             DecisionPoint eta, std::optional<double> certificate = {});

  Kind kind;
  std::vector<double> s;  // nodes, increasing, s.front()=0, s.back()=1
  Matrix values;          // n x nodes
  DecisionPoint eta;
  std::optional<double> certificate;  // step-halving sup-norm estimate

  int state_dim() const { return static_cast<int>(values.rows()); }
  int nodes() const { return static_cast<int>(s.size()); }
  Vector at(double si) const;  // affine between nodes
  double sup_norm() const;
};

struct SimOptions {
  double reference_tol = 1e-10;
  int max_halvings = 22;
  int initial_subcells = 8;  // per completion/control cell
};

/// The exact recursion y_{k+1} = y_k + f(y_k,u_k) dtheta_k + g(y_k) dphi_k
/// on the uniform N-grid. The impulse must be an atom-free knot measure.
Trajectory euler_solve(const ProblemSpec& spec, const DecisionPoint& eta,
                       int n_cells);

/// Fixed-step classical RK4 on the reparametrized dynamics with the mesh
/// aligned to every breakpoint of theta, phi and u, refined by halving
/// until two successive solutions agree within tol in sup norm.
Trajectory reference_solve(const ProblemSpec& spec, const DecisionPoint& eta,
                           double tol, const SimOptions& opts = {});

struct GrowthBoundReport {
  int violations = 0;
  double min_slack = 0.0;  // min over nodes of bound - (|y_k| + 1)
  double bound = 0.0;      // e^beta (1 + |xi0|)
};

/// Checks |y_k| + 1 <= e^beta (1 + |xi0|) at every node of an Euler polyline.
GrowthBoundReport growth_bound_check(const Trajectory& traj,
                          const RegularityConstants& constants);

struct UniquenessReport {
  bool agreed = false;
  double discrepancy = 0.0;
  double allowance = 0.0;  // 10 * tol
};

/// Gronwall-style surrogate: two reference solves on differently seeded
/// meshes must agree within 10*tol in sup norm.
UniquenessReport uniqueness_check(const ProblemSpec& spec,
                                  const DecisionPoint& eta, double tol);

}  // namespace imoc
