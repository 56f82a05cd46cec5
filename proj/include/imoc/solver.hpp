#pragma once

#include "imoc/sim.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace imoc {

/// Flattened unknowns of a level-N decision point: initial state, the
/// piecewise-constant control coefficients, nonnegative knot gaps summing
/// to T, and cumulative-measure increments in K.
struct DecisionVector {
  Vector xi0;   // n
  Matrix u;     // m x N (m may be 0)
  Vector gaps;  // N, >= 0, sum = T
  Matrix db;    // q x N, coordinatewise >= 0

  int level() const { return static_cast<int>(gaps.size()); }
  int flat_size() const;
  Vector flatten() const;
  static DecisionVector unflatten(const Vector& z, int n, int m, int q, int N);

  static DecisionVector start(const ProblemSpec& spec, int N);
  /// Embeds the represented point into S_{2N}: controls repeat, gaps and
  /// increments split in half.
  DecisionVector prolong() const;

  PiecewiseLinearMeasure measure(double horizon) const;
  DecisionPoint to_point(const ProblemSpec& spec) const;
};

struct SolveOptions {
  double grad_tol = 1e-7;
  double constraint_tol = 1e-8;
  double rho0 = 10.0;
  double rho_mult = 10.0;
  int max_outer = 12;
  int max_iter = 600;
  double armijo_c1 = 1e-4;
  double alpha0 = 1.0;
  std::uint64_t seed = 1;
  int gamma_restarts = 2;
  int gamma_max_iter = 200;
  double gamma_grad_tol = 1e-6;
  double gamma_tol = 1e-3;  // converged results must have gamma >= -gamma_tol
};

struct SolveResult {
  DecisionVector eta;
  double objective = 0.0;
  double gamma = 0.0;  // gamma^{C,N} at eta
  double feasibility = 0.0;  // max_k |y_k| - (L + 1/N)
  int iterations = 0;
  bool converged = false;
};

/// Objective f0(xi0, y_N(1)) and its exact gradient over all unknowns via
/// the reverse sweep of the Euler recursion. rho adds the quadratic
/// exterior penalty on |y_k| <= bound at every node.
std::pair<double, Vector> objective_and_gradient(const DecisionVector& v,
                                                 const ProblemSpec& spec,
                                                 double rho, double bound);

/// Componentwise projection: xi0 onto C, controls onto Ubar, increments
/// clamped to K, gaps clamped nonnegative and rescaled to sum T.
DecisionVector project_feasible(const DecisionVector& v,
                                const ProblemSpec& spec);

/// State-constraint violation max_k |y_k| - bound at the Euler nodes.
double state_violation(const DecisionVector& v, const ProblemSpec& spec,
                       double bound);

SolveResult solve_level(const ProblemSpec& spec, int N,
                        const std::optional<DecisionVector>& warm_start,
                        const SolveOptions& opts);

/// Multi-start upper bound on the optimality function at eta: the best
/// found value of <grad f0(xi), xibar - xi> + (1/2) dbar over S_{C,N}.
double gamma_cn(const DecisionVector& eta, const ProblemSpec& spec, int N,
                const SolveOptions& opts);

struct LevelRecord {
  int N = 0;
  SolveResult result;
  double d_to_next = std::numeric_limits<double>::quiet_NaN();
  double d_to_known = std::numeric_limits<double>::quiet_NaN();
  double gap_to_known = std::numeric_limits<double>::quiet_NaN();
  std::string failure;  // nonempty when this level's solve threw
};

struct StudyReport {
  std::vector<LevelRecord> levels;
  std::uint64_t seed = 0;
  double gamma_tolerance_declared = 0.0;
};

struct KnownSolution {
  DecisionPoint eta;
  double optimal_value = 0.0;
};

StudyReport study(const ProblemSpec& spec, const std::vector<int>& level_exps,
                  const SolveOptions& opts,
                  const std::optional<KnownSolution>& known = {});

struct ErrorBoundReport {
  std::vector<int> n_values;
  std::vector<double> e;  // sup-node trajectory error per level
  std::vector<double> c;  // objective error per level
  double slope_e = 0.0;
  double slope_c = 0.0;
  double k_xi0 = 0.0;  // least constant with e_N <= K/N
  double k_s = 0.0;    // least constant with c_N <= K/N
  double delta = 0.0;  // perturbation size of the shifted-start variant
  std::vector<double> e_perturbed;
  double k_xi0_perturbed = 0.0;  // least K with e'_N <= K (delta + 1/N)
  bool exact = false;            // all errors at rounding level
};

/// Euler-vs-reference error decay for a fixed decision point, with the
/// fitted bound constants of the first-order estimates.
ErrorBoundReport error_bound_report(const ProblemSpec& spec,
                                    const DecisionPoint& eta,
                                    const std::vector<int>& level_exps,
                                    double delta = 0.1);

struct GraphConvergenceReport {
  std::vector<int> n_values;
  std::vector<double> dist;  // Hausdorff distance per level
};

/// Discretizes eta per level, builds the node set {(theta_N(s_k), y_k)}
/// and measures its Hausdorff distance to the completed graph of the
/// reference solution (dense trajectory samples plus atom arcs).
GraphConvergenceReport graph_convergence_report(
    const ProblemSpec& spec, const DecisionPoint& eta,
    const std::vector<int>& level_exps, int dense_samples = 40000);

/// Level-N discretization of a general decision point: measure via
/// `approximate`, control sampled cellwise on the grid.
DecisionPoint discretize(const ProblemSpec& spec, const DecisionPoint& eta,
                         int n_cells);

/// The time-state sample set Lambda^N of an Euler polyline.
Matrix discrete_graph(const Trajectory& traj);

/// Dense sample of gr X_mu: (t, x(t)) along the pushed-forward solution
/// plus (t_i, arc) points over every atom interval.
Matrix completed_graph(const Trajectory& reference, const VectorMeasure& mu,
                       int dense_samples);

/// Least-squares slope of log(err) against log(N).
double log_log_slope(const std::vector<int>& n_values,
                     const std::vector<double>& errs);

}  // namespace imoc
