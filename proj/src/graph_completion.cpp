#include "imoc/graph_completion.hpp"

#include "imoc/sim.hpp"

#include <algorithm>
#include <cmath>

namespace imoc {

bool GraphCompletion::matches(const GraphCompletion& other, double tol) const {
  if (measure_dim() != other.measure_dim()) return false;
  if (!nearly_equal(horizon, other.horizon, tol)) return false;
  if (!theta.same_breakpoints(other.theta, tol)) return false;
  if ((theta.values() - other.theta.values()).cwiseAbs().maxCoeff() > tol)
    return false;
  if ((phi.values() - other.phi.values()).cwiseAbs().maxCoeff() > tol)
    return false;
  return true;
}

double pi_map(const VectorMeasure& mu, double t, bool left_limit) {
  if (t < -1e-12 || t > mu.horizon() + 1e-12)
    throw DomainError("pi_map argument outside [0, T]");
  t = std::clamp(t, 0.0, mu.horizon());
  if (left_limit && t == 0.0) return 0.0;
  double v = mu.variation(t, left_limit);
  return (t + v) / (mu.horizon() + mu.total_variation());
}

GraphCompletion build_completion(const VectorMeasure& mu) {
  const double T = mu.horizon();
  const int q = mu.dim();
  const double denom = T + mu.total_variation();

  // Events in t: 0, every ac knot, every atom time, T.
  std::vector<double> events = mu.ac_distribution().breakpoints();
  for (const auto& a : mu.atoms()) events.push_back(a.t);
  events.push_back(0.0);
  events.push_back(T);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(),
                           [](double a, double b) { return a == b; }),
               events.end());

  std::vector<double> s;
  std::vector<double> th;
  std::vector<Vector> ph;
  GraphCompletion gc;
  auto push = [&](double si, double ti, const Vector& pi_val) {
    if (!s.empty() && si <= s.back() + 1e-15 &&
        std::abs(ti - th.back()) < 1e-15 &&
        (pi_val - ph.back()).cwiseAbs().maxCoeff() < 1e-15)
      return;  // coincident point
    s.push_back(si);
    th.push_back(ti);
    ph.push_back(pi_val);
  };

  size_t atom_idx = 0;
  for (size_t e = 0; e < events.size(); ++e) {
    double t = events[e];
    bool is_atom = atom_idx < mu.atoms().size() && mu.atoms()[atom_idx].t == t;
    double s_left = pi_map(mu, t, true);
    push(s_left, t, mu.distribution(t, true));
    if (is_atom) {
      const Atom& a = mu.atoms()[atom_idx];
      double s_right = pi_map(mu, t, false);
      GraphCompletion::AtomInterval iv;
      iv.atom_index = static_cast<int>(atom_idx);
      iv.s_lo = s_left;
      iv.s_hi = s_right;
      gc.atom_intervals.push_back(iv);
      // phi accumulates the rescaled profile across I_i; theta stays at t.
      Vector acc = mu.distribution(t, true);
      const AtomProfile& prof = a.profile;
      double len = s_right - s_left;
      for (int p = 0; p < prof.pieces(); ++p) {
        double sig0 = prof.breakpoints[p], sig1 = prof.breakpoints[p + 1];
        acc += prof.values.col(p) * (sig1 - sig0);
        push(s_left + sig1 * len, t, acc);
      }
      ++atom_idx;
    }
  }

  // Exact endpoints.
  s.front() = 0.0;
  s.back() = 1.0;
  (void)denom;

  Matrix theta_vals(1, s.size()), phi_vals(q, s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    theta_vals(0, i) = th[i];
    phi_vals.col(i) = ph[i];
  }
  gc.theta = PwLinear(s, std::move(theta_vals));
  gc.phi = PwLinear(s, std::move(phi_vals));
  gc.horizon = T;
  for (int k = 0; k < gc.theta.cells(); ++k) {
    gc.lip_theta = std::max(gc.lip_theta, std::abs(gc.theta.cell_slope(k)(0)));
    gc.lip_phi = std::max(gc.lip_phi, gc.phi.cell_slope(k).norm());
  }
  return gc;
}

OriginalTimeSolution push_forward(const Trajectory& y, const VectorMeasure& mu,
                                  const std::vector<double>& t_grid,
                                  int arc_samples) {
  GraphCompletion gc = build_completion(mu);
  if (!y.eta.impulse.completion().matches(gc, 1e-9))
    throw ConsistencyError(
        "trajectory was produced under a different graph completion");

  std::vector<double> ts = t_grid;
  for (const auto& a : mu.atoms()) ts.push_back(a.t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  OriginalTimeSolution out;
  const int n = static_cast<int>(y.values.rows());
  std::vector<Vector> cols;
  size_t atom_idx = 0;
  for (double t : ts) {
    if (t < -1e-12 || t > mu.horizon() + 1e-12)
      throw DomainError("push_forward grid point outside [0, T]");
    bool is_atom =
        atom_idx < mu.atoms().size() && mu.atoms()[atom_idx].t == t;
    if (is_atom) {
      out.t.push_back(t);
      cols.push_back(y.at(pi_map(mu, t, true)));
      ++atom_idx;
    }
    out.t.push_back(t);
    cols.push_back(y.at(pi_map(mu, t, false)));
  }
  out.x.resize(n, cols.size());
  for (size_t i = 0; i < cols.size(); ++i) out.x.col(i) = cols[i];

  for (size_t i = 0; i < mu.atoms().size(); ++i) {
    const auto& iv = gc.atom_intervals[i];
    OriginalTimeSolution::Arc arc;
    arc.atom_index = static_cast<int>(i);
    arc.t = mu.atoms()[i].t;
    arc.x.resize(n, arc_samples);
    for (int k = 0; k < arc_samples; ++k) {
      double tau = static_cast<double>(k) / (arc_samples - 1);
      arc.tau.push_back(tau);
      arc.x.col(k) = y.at(iv.s_lo + tau * (iv.s_hi - iv.s_lo));
    }
    out.arcs.push_back(std::move(arc));
  }
  return out;
}

}  // namespace imoc
