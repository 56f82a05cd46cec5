#include "imoc/sim.hpp"

#include <algorithm>
#include <cmath>

namespace imoc {

Trajectory::Trajectory(Kind kind, std::vector<double> s, Matrix values,
                       DecisionPoint eta, std::optional<double> certificate)
    : kind(kind),
      s(std::move(s)),
      values(std::move(values)),
      eta(std::move(eta)),
      certificate(certificate) {
  if (this->s.size() < 2 ||
      static_cast<int>(this->s.size()) != this->values.cols())
    throw DomainError("trajectory node/value mismatch");
}

Vector Trajectory::at(double si) const {
  if (si < -1e-12 || si > 1.0 + 1e-12)
    throw DomainError("trajectory argument outside [0,1]");
  si = std::clamp(si, 0.0, 1.0);
  auto it = std::upper_bound(s.begin(), s.end(), si);
  int k = std::clamp(static_cast<int>(it - s.begin()) - 1, 0,
                     static_cast<int>(s.size()) - 2);
  double w = s[k + 1] - s[k];
  if (w <= 0.0) return values.col(k + 1);
  double a = (si - s[k]) / w;
  return (1.0 - a) * values.col(k) + a * values.col(k + 1);
}

double Trajectory::sup_norm() const {
  double m = 0.0;
  for (int k = 0; k < nodes(); ++k) m = std::max(m, values.col(k).norm());
  return m;
}

namespace {

Vector control_at(const DecisionPoint& eta, double s) {
  if (eta.control.dim() == 0) return Vector(0);
  return eta.control(s);
}

double divergence_threshold(const ProblemSpec& spec) {
  return 1e6 * (1.0 + spec.state_bound);
}

}  // namespace

Trajectory euler_solve(const ProblemSpec& spec, const DecisionPoint& eta,
                       int n_cells) {
  Grid grid(n_cells);
  const auto* pn = eta.impulse.as_pn();
  if (!pn)
    throw DomainError("euler_solve needs an atom-free knot-grid impulse");
  if (eta.control.dim() > 0) {
    for (double bp : eta.control.breakpoints()) {
      double frac = bp * grid.n;
      if (std::abs(frac - std::round(frac)) > 1e-9)
        throw DomainError("control breakpoints must lie on the Euler grid");
    }
  }
  const GraphCompletion& gc = eta.impulse.completion();
  const int n = grid.n;
  const double blow = divergence_threshold(spec);

  std::vector<double> s(n + 1);
  Matrix y(spec.state_dim, n + 1);
  y.col(0) = eta.xi0;
  double th_prev = gc.theta(0.0)(0);
  Vector ph_prev = gc.phi(0.0);
  for (int k = 0; k < n; ++k) {
    s[k] = grid.node(k);
    double sk1 = grid.node(k + 1);
    double th_next = gc.theta(sk1)(0);
    Vector ph_next = gc.phi(sk1);
    Vector u = control_at(eta, s[k]);
    Vector step = spec.dynamics.eval(y.col(k), u) * (th_next - th_prev) +
                  spec.dynamics.jump.eval(y.col(k)) * (ph_next - ph_prev);
    y.col(k + 1) = y.col(k) + step;
    if (!y.col(k + 1).allFinite() || y.col(k + 1).norm() > blow)
      throw DivergenceError("euler state blew up at step " + std::to_string(k),
                            k);
    th_prev = th_next;
    ph_prev = std::move(ph_next);
  }
  s[n] = 1.0;
  return Trajectory(Trajectory::Kind::euler_polyline, std::move(s),
                    std::move(y), eta);
}

namespace {

// One RK4 step for ydot = f(y, u) a + g(y) w with constant u, a, w.
Vector rk4_step(const ProblemSpec& spec, const Vector& y, const Vector& u,
                double a, const Vector& w, double h) {
  auto rhs = [&](const Vector& z) -> Vector {
    return spec.dynamics.eval(z, u) * a + spec.dynamics.jump.eval(z) * w;
  };
  Vector k1 = rhs(y);
  Vector k2 = rhs(y + 0.5 * h * k1);
  Vector k3 = rhs(y + 0.5 * h * k2);
  Vector k4 = rhs(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Mesh of s-cells aligned to every breakpoint of theta/phi/u, each split
// into `sub` equal pieces.
std::vector<double> aligned_mesh(const DecisionPoint& eta, int sub) {
  const GraphCompletion& gc = eta.impulse.completion();
  std::vector<double> base = gc.theta.breakpoints();
  if (eta.control.dim() > 0)
    base = merged_breakpoints(base, eta.control.breakpoints());
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  std::vector<double> mesh;
  mesh.push_back(base.front());
  for (size_t i = 0; i + 1 < base.size(); ++i) {
    double w = base[i + 1] - base[i];
    if (w <= 0.0) continue;
    for (int j = 1; j <= sub; ++j) mesh.push_back(base[i] + w * j / sub);
  }
  return mesh;
}

Matrix integrate_on_mesh(const ProblemSpec& spec, const DecisionPoint& eta,
                         const std::vector<double>& mesh) {
  const GraphCompletion& gc = eta.impulse.completion();
  const double blow = divergence_threshold(spec);
  Matrix y(spec.state_dim, mesh.size());
  y.col(0) = eta.xi0;
  for (size_t k = 0; k + 1 < mesh.size(); ++k) {
    double h = mesh[k + 1] - mesh[k];
    double mid = 0.5 * (mesh[k] + mesh[k + 1]);
    double a = (gc.theta(mesh[k + 1])(0) - gc.theta(mesh[k])(0)) / h;
    Vector w = (gc.phi(mesh[k + 1]) - gc.phi(mesh[k])) / h;
    Vector u = control_at(eta, mid);
    y.col(k + 1) = rk4_step(spec, y.col(k), u, a, w, h);
    if (!y.col(k + 1).allFinite() || y.col(k + 1).norm() > blow)
      throw DivergenceError(
          "reference state blew up near s = " + std::to_string(mesh[k]),
          static_cast<int>(k));
  }
  return y;
}

}  // namespace

Trajectory reference_solve(const ProblemSpec& spec, const DecisionPoint& eta,
                           double tol, const SimOptions& opts) {
  std::vector<double> mesh = aligned_mesh(eta, opts.initial_subcells);
  Matrix y;
  bool have_prev = false;
  double err = std::numeric_limits<double>::infinity();
  for (int halving = 0; halving <= opts.max_halvings; ++halving) {
    Matrix ycur;
    try {
      ycur = integrate_on_mesh(spec, eta, mesh);
    } catch (const DivergenceError&) {
      // Coarse meshes may be outside the stability region; refine and retry.
      have_prev = false;
      std::vector<double> fine;
      fine.reserve(mesh.size() * 2);
      for (size_t i = 0; i + 1 < mesh.size(); ++i) {
        fine.push_back(mesh[i]);
        fine.push_back(0.5 * (mesh[i] + mesh[i + 1]));
      }
      fine.push_back(mesh.back());
      mesh = std::move(fine);
      continue;
    }
    if (have_prev) {
      err = 0.0;
      for (int i = 0; 2 * i < static_cast<int>(mesh.size()); ++i)
        err = std::max(err, (y.col(i) - ycur.col(2 * i)).norm());
      if (err < tol)
        return Trajectory(Trajectory::Kind::reference, std::move(mesh),
                          std::move(ycur), eta, err);
    }
    y = std::move(ycur);
    have_prev = true;
    std::vector<double> fine;
    fine.reserve(mesh.size() * 2);
    for (size_t i = 0; i + 1 < mesh.size(); ++i) {
      fine.push_back(mesh[i]);
      fine.push_back(0.5 * (mesh[i] + mesh[i + 1]));
    }
    fine.push_back(mesh.back());
    mesh = std::move(fine);
  }
  throw AccuracyError("reference_solve: tolerance " + std::to_string(tol) +
                      " not reached, last estimate " + std::to_string(err));
}

GrowthBoundReport growth_bound_check(const Trajectory& traj,
                          const RegularityConstants& constants) {
  GrowthBoundReport rep;
  rep.bound = std::exp(constants.beta()) * (1.0 + traj.values.col(0).norm());
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < traj.nodes(); ++k) {
    double lhs = traj.values.col(k).norm() + 1.0;
    double slack = rep.bound - lhs;
    rep.min_slack = std::min(rep.min_slack, slack);
    if (slack < -1e-9) ++rep.violations;
  }
  return rep;
}

UniquenessReport uniqueness_check(const ProblemSpec& spec,
                                  const DecisionPoint& eta, double tol) {
  SimOptions a, b;
  a.initial_subcells = 8;
  b.initial_subcells = 11;  // different step pattern
  Trajectory ya = reference_solve(spec, eta, tol, a);
  Trajectory yb = reference_solve(spec, eta, tol, b);
  UniquenessReport rep;
  rep.allowance = 10.0 * tol;
  // Compare at shared mesh nodes (base breakpoints and cell midpoints),
  // where both solutions carry node-accurate values.
  std::vector<double> base = aligned_mesh(eta, 2);
  for (double s : base)
    rep.discrepancy = std::max(rep.discrepancy, (ya.at(s) - yb.at(s)).norm());
  rep.agreed = rep.discrepancy <= rep.allowance;
  return rep;
}

}  // namespace imoc
