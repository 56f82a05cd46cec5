#include "imoc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace imoc {

int DecisionVector::flat_size() const {
  return static_cast<int>(xi0.size() + u.size() + gaps.size() + db.size());
}

Vector DecisionVector::flatten() const {
  Vector z(flat_size());
  int at = 0;
  z.segment(at, xi0.size()) = xi0;
  at += static_cast<int>(xi0.size());
  for (int k = 0; k < u.cols(); ++k) {
    z.segment(at, u.rows()) = u.col(k);
    at += static_cast<int>(u.rows());
  }
  z.segment(at, gaps.size()) = gaps;
  at += static_cast<int>(gaps.size());
  for (int k = 0; k < db.cols(); ++k) {
    z.segment(at, db.rows()) = db.col(k);
    at += static_cast<int>(db.rows());
  }
  return z;
}

DecisionVector DecisionVector::unflatten(const Vector& z, int n, int m, int q,
                                         int N) {
  DecisionVector v;
  int at = 0;
  v.xi0 = z.segment(at, n);
  at += n;
  v.u.resize(m, N);
  for (int k = 0; k < N; ++k) {
    v.u.col(k) = z.segment(at, m);
    at += m;
  }
  v.gaps = z.segment(at, N);
  at += N;
  v.db.resize(q, N);
  for (int k = 0; k < N; ++k) {
    v.db.col(k) = z.segment(at, q);
    at += q;
  }
  return v;
}

DecisionVector DecisionVector::start(const ProblemSpec& spec, int N) {
  DecisionVector v;
  v.xi0 = spec.initial_set.center();
  v.u.resize(spec.control_dim, N);
  if (spec.control_dim > 0) v.u.colwise() = spec.control_set.center();
  v.gaps = Vector::Constant(N, spec.horizon / N);
  v.db = Matrix::Zero(spec.measure_dim, N);
  return v;
}

DecisionVector DecisionVector::prolong() const {
  const int N = level();
  DecisionVector out;
  out.xi0 = xi0;
  out.u.resize(u.rows(), 2 * N);
  out.gaps.resize(2 * N);
  out.db.resize(db.rows(), 2 * N);
  for (int k = 0; k < N; ++k) {
    if (u.rows() > 0) {
      out.u.col(2 * k) = u.col(k);
      out.u.col(2 * k + 1) = u.col(k);
    }
    out.gaps[2 * k] = 0.5 * gaps[k];
    out.gaps[2 * k + 1] = 0.5 * gaps[k];
    out.db.col(2 * k) = 0.5 * db.col(k);
    out.db.col(2 * k + 1) = 0.5 * db.col(k);
  }
  return out;
}

PiecewiseLinearMeasure DecisionVector::measure(double horizon) const {
  const int N = level();
  std::vector<double> knots(N + 1);
  Matrix values(db.rows(), N + 1);
  knots[0] = 0.0;
  values.col(0).setZero();
  for (int k = 0; k < N; ++k) {
    knots[k + 1] = std::min(knots[k] + std::max(0.0, gaps[k]), horizon);
    values.col(k + 1) = values.col(k) + db.col(k).cwiseMax(0.0);
  }
  knots[N] = horizon;  // gaps sum to T after projection; pin the endpoint
  return PiecewiseLinearMeasure(horizon, std::move(knots), std::move(values));
}

DecisionPoint DecisionVector::to_point(const ProblemSpec& spec) const {
  PwConstant ctrl;
  if (spec.control_dim > 0) ctrl = PwConstant::on_uniform_grid(u);
  return DecisionPoint{xi0, ctrl, Impulse(measure(spec.horizon))};
}

namespace {

struct EulerStates {
  Matrix y;  // n x (N+1)
};

EulerStates forward_pass(const DecisionVector& v, const ProblemSpec& spec) {
  const int N = v.level();
  EulerStates st;
  st.y.resize(spec.state_dim, N + 1);
  st.y.col(0) = v.xi0;
  const double blow = 1e6 * (1.0 + spec.state_bound);
  for (int k = 0; k < N; ++k) {
    Vector u = v.u.rows() > 0 ? Vector(v.u.col(k)) : Vector(0);
    st.y.col(k + 1) = st.y.col(k) +
                      spec.dynamics.eval(st.y.col(k), u) * v.gaps[k] +
                      spec.dynamics.jump.eval(st.y.col(k)) * v.db.col(k);
    if (!st.y.col(k + 1).allFinite() || st.y.col(k + 1).norm() > blow)
      throw DivergenceError("euler state blew up at step " + std::to_string(k),
                            k);
  }
  return st;
}

Vector penalty_grad(const Vector& y, double rho, double bound) {
  double n = y.norm();
  double excess = n - bound;
  if (excess <= 0.0 || n == 0.0) return Vector::Zero(y.size());
  return (2.0 * rho * excess / n) * y;
}

double penalty_value(const Vector& y, double rho, double bound) {
  double excess = std::max(0.0, y.norm() - bound);
  return rho * excess * excess;
}

}  // namespace

double state_violation(const DecisionVector& v, const ProblemSpec& spec,
                       double bound) {
  EulerStates st = forward_pass(v, spec);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < st.y.cols(); ++k)
    worst = std::max(worst, st.y.col(k).norm() - bound);
  return worst;
}

std::pair<double, Vector> objective_and_gradient(const DecisionVector& v,
                                                 const ProblemSpec& spec,
                                                 double rho, double bound) {
  const int N = v.level();
  const int n = spec.state_dim, m = spec.control_dim, q = spec.measure_dim;
  EulerStates st = forward_pass(v, spec);
  const Vector& y_end = st.y.col(N);

  double value = spec.cost.value(v.xi0, y_end);
  auto [g0, g1] = spec.cost.gradient(v.xi0, y_end);
  if (rho > 0.0)
    for (int k = 0; k <= N; ++k) value += penalty_value(st.y.col(k), rho, bound);

  DecisionVector grad;
  grad.xi0 = Vector::Zero(n);
  grad.u = Matrix::Zero(m, N);
  grad.gaps = Vector::Zero(N);
  grad.db = Matrix::Zero(q, N);

  // Reverse sweep: lambda_k = dF/dy_k.
  Vector lambda = g1;
  if (rho > 0.0) lambda += penalty_grad(y_end, rho, bound);
  for (int k = N - 1; k >= 0; --k) {
    const Vector yk = st.y.col(k);
    Vector u = m > 0 ? Vector(v.u.col(k)) : Vector(0);
    if (m > 0) grad.u.col(k) = v.gaps[k] * (spec.dynamics.B.transpose() * lambda);
    grad.gaps[k] = spec.dynamics.eval(yk, u).dot(lambda);
    grad.db.col(k) = spec.dynamics.jump.eval(yk).transpose() * lambda;

    Matrix a_k = Matrix::Identity(n, n) +
                 v.gaps[k] * spec.dynamics.drift_jacobian() +
                 spec.dynamics.jump.apply_jacobian(yk, v.db.col(k));
    lambda = a_k.transpose() * lambda;
    if (rho > 0.0) lambda += penalty_grad(yk, rho, bound);
  }
  grad.xi0 = lambda + g0;

  return {value, grad.flatten()};
}

DecisionVector project_feasible(const DecisionVector& v,
                                const ProblemSpec& spec) {
  DecisionVector out = v;
  out.xi0 = spec.initial_set.project(v.xi0);
  for (int k = 0; k < out.u.cols(); ++k)
    if (out.u.rows() > 0) out.u.col(k) = spec.control_set.project(v.u.col(k));
  out.db = v.db.cwiseMax(0.0);
  out.gaps = v.gaps.cwiseMax(0.0);
  double total = out.gaps.sum();
  if (total <= 1e-300)
    out.gaps.setConstant(spec.horizon / out.level());
  else
    out.gaps *= spec.horizon / total;
  return out;
}

namespace {

struct InnerResult {
  Vector z;
  double value = 0.0;
  int iterations = 0;
  bool stationary = false;
};

// Projected gradient with Armijo backtracking over the flattened vector.
// Backtracking probes call the (cheap) value function only.
InnerResult projected_gradient(
    const std::function<double(const Vector&)>& value,
    const std::function<Vector(const Vector&)>& gradient,
    const std::function<Vector(const Vector&)>& project, Vector z0,
    double grad_tol, int max_iter, double c1, double alpha0) {
  InnerResult res;
  res.z = project(z0);
  double f = value(res.z);
  Vector g = gradient(res.z);
  double alpha = alpha0;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    // Stationarity via the fixed-step projected-gradient displacement.
    Vector probe = project(res.z - alpha0 * g);
    if ((probe - res.z).norm() / alpha0 < grad_tol) {
      res.stationary = true;
      break;
    }
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vector zt = project(res.z - alpha * g);
      Vector dz = zt - res.z;
      if (dz.norm() == 0.0) break;
      double ft;
      try {
        ft = value(zt);
      } catch (const DivergenceError&) {
        alpha *= 0.5;
        continue;
      }
      if (ft <= f + c1 * g.dot(dz)) {
        res.z = std::move(zt);
        f = ft;
        g = gradient(res.z);
        alpha = std::min(alpha * 2.0, 1e6);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.stationary = true;  // no acceptable step left at this scale
      break;
    }
  }
  res.value = f;
  return res;
}

}  // namespace

SolveResult solve_level(const ProblemSpec& spec, int N,
                        const std::optional<DecisionVector>& warm_start,
                        const SolveOptions& opts) {
  Grid grid(N);
  const double bound = spec.state_bound + 1.0 / N;
  DecisionVector v0 = warm_start ? *warm_start : DecisionVector::start(spec, N);
  if (v0.level() != N) throw DomainError("warm start level mismatch");
  v0 = project_feasible(v0, spec);

  auto project = [&](const Vector& z) {
    return project_feasible(DecisionVector::unflatten(z, spec.state_dim,
                                                      spec.control_dim,
                                                      spec.measure_dim, N),
                            spec)
        .flatten();
  };

  SolveResult out;
  double rho = opts.rho0;
  Vector z = v0.flatten();
  int total_iters = 0;
  bool stationary = false;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    auto value = [&](const Vector& zz) {
      return objective_and_gradient(
                 DecisionVector::unflatten(zz, spec.state_dim, spec.control_dim,
                                           spec.measure_dim, N),
                 spec, rho, bound)
          .first;
    };
    auto gradient = [&](const Vector& zz) {
      return objective_and_gradient(
                 DecisionVector::unflatten(zz, spec.state_dim, spec.control_dim,
                                           spec.measure_dim, N),
                 spec, rho, bound)
          .second;
    };
    InnerResult inner =
        projected_gradient(value, gradient, project, z, opts.grad_tol,
                           opts.max_iter, opts.armijo_c1, opts.alpha0);
    z = inner.z;
    total_iters += inner.iterations;
    stationary = inner.stationary;
    DecisionVector vcur = DecisionVector::unflatten(
        z, spec.state_dim, spec.control_dim, spec.measure_dim, N);
    double viol = state_violation(vcur, spec, bound);
    if (viol <= opts.constraint_tol) break;
    rho *= opts.rho_mult;
  }

  DecisionVector v = DecisionVector::unflatten(z, spec.state_dim,
                                               spec.control_dim,
                                               spec.measure_dim, N);

  // Exterior penalty leaves an O(tol) overshoot on active constraints;
  // pull the point back to the feasible side along the segment toward the
  // zero-impulse anchor when that anchor is itself feasible.
  double viol = state_violation(v, spec, bound);
  if (viol > 0.0) {
    DecisionVector anchor = v;
    anchor.db.setZero();
    anchor = project_feasible(anchor, spec);
    if (state_violation(anchor, spec, bound) <= 0.0) {
      double lo = 0.0, hi = 1.0;  // fraction kept of (v - anchor)
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        DecisionVector probe = anchor;
        probe.xi0 = anchor.xi0 + mid * (v.xi0 - anchor.xi0);
        if (probe.u.size() > 0)
          probe.u = anchor.u + mid * (v.u - anchor.u);
        probe.gaps = anchor.gaps + mid * (v.gaps - anchor.gaps);
        probe.db = anchor.db + mid * (v.db - anchor.db);
        if (state_violation(probe, spec, bound) <= 0.0)
          lo = mid;
        else
          hi = mid;
      }
      DecisionVector restored = anchor;
      restored.xi0 = anchor.xi0 + lo * (v.xi0 - anchor.xi0);
      if (restored.u.size() > 0) restored.u = anchor.u + lo * (v.u - anchor.u);
      restored.gaps = anchor.gaps + lo * (v.gaps - anchor.gaps);
      restored.db = anchor.db + lo * (v.db - anchor.db);
      v = project_feasible(restored, spec);
    }
  }

  out.eta = v;
  auto [obj, grad] = objective_and_gradient(v, spec, 0.0, bound);
  (void)grad;
  out.objective = obj;
  out.feasibility = state_violation(v, spec, bound);
  out.iterations = total_iters;
  out.gamma = gamma_cn(v, spec, N, opts);
  out.converged = stationary && out.feasibility <= 0.0 &&
                  out.gamma >= -opts.gamma_tol;
  return out;
}

namespace {

DecisionVector random_feasible(const ProblemSpec& spec, int N,
                               std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DecisionVector v;
  v.xi0 = spec.initial_set.sample(rng);
  v.u.resize(spec.control_dim, N);
  for (int k = 0; k < N; ++k)
    if (spec.control_dim > 0) v.u.col(k) = spec.control_set.sample(rng);
  v.gaps.resize(N);
  for (int k = 0; k < N; ++k) v.gaps[k] = 0.05 + unit(rng);
  v.gaps *= spec.horizon / v.gaps.sum();
  v.db.resize(spec.measure_dim, N);
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < spec.measure_dim; ++j)
      v.db(j, k) = unit(rng) * spec.horizon / N;
  v = project_feasible(v, spec);
  // Shrink the impulse until the state constraint holds.
  for (int attempt = 0; attempt < 60; ++attempt) {
    if (state_violation(v, spec, bound) <= 0.0) return v;
    v.db *= 0.5;
  }
  v.db.setZero();
  return v;
}

}  // namespace

double gamma_cn(const DecisionVector& eta, const ProblemSpec& spec, int N,
                const SolveOptions& opts) {
  const double bound = spec.state_bound + 1.0 / N;
  const int n = spec.state_dim, m = spec.control_dim, q = spec.measure_dim;

  EulerStates st = forward_pass(eta, spec);
  const Vector y_end = st.y.col(N);
  auto [a, b] = spec.cost.gradient(eta.xi0, y_end);
  DecisionPoint eta_pt = eta.to_point(spec);
  const PwLinear& pair_eta = eta_pt.impulse.pair_distribution();
  const Vector& totals_eta = eta_pt.impulse.pair_total();
  const PwLinear& phiext_eta = eta_pt.impulse.phi_extended();

  // d4 against the fixed eta, built straight from the decision variables
  // (the probe's completion phi is the uniform-grid interpolant of its
  // cumulative values, so no completion construction is needed).
  auto d4_probe = [&](const DecisionVector& w) {
    std::vector<double> knots(N + 1), sgrid(N + 1);
    Matrix vals(q + 1, N + 1);
    knots[0] = 0.0;
    vals.col(0).setZero();
    for (int k = 0; k < N; ++k) {
      knots[k + 1] =
          std::min(knots[k] + std::max(0.0, w.gaps[k]), spec.horizon);
      vals.col(k + 1).head(q) = vals.col(k).head(q) + w.db.col(k).cwiseMax(0.0);
      vals(q, k + 1) = vals.col(k + 1).head(q).sum();
    }
    knots[N] = spec.horizon;
    for (int k = 0; k <= N; ++k) sgrid[k] = double(k) / N;
    PwLinear pair_w(std::move(knots), vals);
    PwLinear phiext_w(std::move(sgrid), std::move(vals));
    double term1 = (pair_w.values().col(N) - totals_eta).norm();
    double term2 = integral_norm_diff(pair_w, pair_eta);
    double term3 = max_norm_diff(phiext_w, phiext_eta);
    return term1 + term2 + term3;
  };

  // Raw subproblem objective: <grad f0(xi), xibar - xi> + (1/2) dbar.
  auto value_with_penalty = [&](const DecisionVector& vbar, double rho) {
    EulerStates stb = forward_pass(vbar, spec);
    double inner = a.dot(vbar.xi0 - eta.xi0) + b.dot(stb.y.col(N) - y_end);
    double d2_term = 0.0;
    if (m > 0) d2_term = (vbar.u - eta.u).squaredNorm() / N;
    double val =
        inner + 0.5 * (d1(vbar.xi0, eta.xi0) + d2_term + d4_probe(vbar));
    if (rho > 0.0)
      for (int k = 0; k <= N; ++k)
        val += penalty_value(stb.y.col(k), rho, bound);
    return val;
  };
  auto raw_value = [&](const DecisionVector& vbar) {
    return value_with_penalty(vbar, 0.0);
  };

  // Gradient: adjoint for the endpoint and penalty terms, analytic for
  // d1/d2, forward differences for the d4 block (gaps and increments).
  auto grad_of = [&](const DecisionVector& vbar, double rho) {
    EulerStates stb = forward_pass(vbar, spec);
    DecisionVector g;
    g.xi0 = Vector::Zero(n);
    g.u = Matrix::Zero(m, N);
    g.gaps = Vector::Zero(N);
    g.db = Matrix::Zero(q, N);

    Vector lambda = b + penalty_grad(stb.y.col(N), rho, bound);
    for (int k = N - 1; k >= 0; --k) {
      const Vector yk = stb.y.col(k);
      Vector u = m > 0 ? Vector(vbar.u.col(k)) : Vector(0);
      if (m > 0) g.u.col(k) = vbar.gaps[k] * (spec.dynamics.B.transpose() * lambda);
      g.gaps[k] = spec.dynamics.eval(yk, u).dot(lambda);
      g.db.col(k) = spec.dynamics.jump.eval(yk).transpose() * lambda;
      Matrix a_k = Matrix::Identity(n, n) +
                   vbar.gaps[k] * spec.dynamics.drift_jacobian() +
                   spec.dynamics.jump.apply_jacobian(yk, vbar.db.col(k));
      lambda = a_k.transpose() * lambda;
      lambda += penalty_grad(yk, rho, bound);
    }
    g.xi0 = lambda + a;

    // d1: subgradient, tie broken toward zero at coincidence.
    Vector dx = vbar.xi0 - eta.xi0;
    double nx = dx.norm();
    if (nx > 1e-14) g.xi0 += 0.5 * dx / nx;
    // d2 over the shared uniform grid.
    if (m > 0) g.u += (0.5 / N) * 2.0 * (vbar.u - eta.u);

    // d4 block by forward differences off a shared base value.
    const double h0 = 1e-6;
    const double base = 0.5 * d4_probe(vbar);
    DecisionVector w = vbar;
    for (int k = 0; k < N; ++k) {
      const double saved = w.gaps[k];
      w.gaps[k] = saved + h0;
      g.gaps[k] += (0.5 * d4_probe(w) - base) / h0;
      w.gaps[k] = saved;
      for (int j = 0; j < q; ++j) {
        const double sv = w.db(j, k);
        w.db(j, k) = sv + h0;
        g.db(j, k) += (0.5 * d4_probe(w) - base) / h0;
        w.db(j, k) = sv;
      }
    }
    return g.flatten();
  };

  auto project = [&](const Vector& z) {
    return project_feasible(
               DecisionVector::unflatten(z, n, m, q, N), spec)
        .flatten();
  };

  std::mt19937_64 rng(opts.seed * 7919 + N);
  std::vector<DecisionVector> starts;
  starts.push_back(eta);
  for (int r = 0; r < opts.gamma_restarts; ++r)
    starts.push_back(random_feasible(spec, N, rng, bound));

  double best = raw_value(eta);  // exactly zero
  for (const auto& s0 : starts) {
    double rho = opts.rho0;
    auto value = [&](const Vector& z) {
      return value_with_penalty(DecisionVector::unflatten(z, n, m, q, N), rho);
    };
    auto gradient = [&](const Vector& z) {
      return grad_of(DecisionVector::unflatten(z, n, m, q, N), rho);
    };
    InnerResult inner = projected_gradient(
        value, gradient, project, s0.flatten(), opts.gamma_grad_tol,
        opts.gamma_max_iter, opts.armijo_c1, opts.alpha0);
    DecisionVector vb =
        DecisionVector::unflatten(inner.z, n, m, q, N);
    if (state_violation(vb, spec, bound) <= opts.constraint_tol)
      best = std::min(best, raw_value(vb));
  }
  return best;
}

StudyReport study(const ProblemSpec& spec, const std::vector<int>& level_exps,
                  const SolveOptions& opts,
                  const std::optional<KnownSolution>& known) {
  if (level_exps.size() < 2)
    throw DomainError("study needs at least two levels");
  for (size_t i = 1; i < level_exps.size(); ++i)
    if (level_exps[i] <= level_exps[i - 1])
      throw DomainError("study levels must be strictly ascending");

  StudyReport rep;
  rep.seed = opts.seed;
  rep.gamma_tolerance_declared = opts.gamma_grad_tol;
  std::optional<DecisionVector> warm;
  for (int k : level_exps) {
    int N = 1 << k;
    LevelRecord rec;
    rec.N = N;
    if (warm)
      while (warm->level() < N) *warm = warm->prolong();
    try {
      rec.result = solve_level(spec, N, warm, opts);
      warm = rec.result.eta;
    } catch (const std::exception& e) {
      // A failed level is recorded and the study moves on cold.
      rec.result.eta = DecisionVector::start(spec, N);
      rec.result.objective = std::numeric_limits<double>::quiet_NaN();
      rec.result.converged = false;
      rec.failure = e.what();
      warm.reset();
    }
    if (known && rec.failure.empty()) {
      DecisionPoint pt = rec.result.eta.to_point(spec);
      rec.d_to_known = d_full(pt, known->eta);
      rec.gap_to_known = std::abs(rec.result.objective - known->optimal_value);
    }
    rep.levels.push_back(std::move(rec));
  }
  for (size_t i = 0; i + 1 < rep.levels.size(); ++i) {
    if (!rep.levels[i].failure.empty() || !rep.levels[i + 1].failure.empty())
      continue;
    DecisionPoint a = rep.levels[i].result.eta.to_point(spec);
    DecisionPoint b = rep.levels[i + 1].result.eta.to_point(spec);
    rep.levels[i].d_to_next = d_full(a, b);
  }
  return rep;
}

DecisionPoint discretize(const ProblemSpec& spec, const DecisionPoint& eta,
                         int n_cells) {
  Grid grid(n_cells);
  PiecewiseLinearMeasure pn = [&] {
    if (const auto* vm = eta.impulse.as_measure())
      return approximate(*vm, eta.impulse.completion(), n_cells);
    const auto* pl = eta.impulse.as_pn();
    return *pl;
  }();
  PwConstant ctrl;
  if (spec.control_dim > 0 && eta.control.dim() > 0) {
    Matrix u(eta.control.dim(), n_cells);
    for (int k = 0; k < n_cells; ++k) u.col(k) = eta.control(grid.node(k));
    ctrl = PwConstant::on_uniform_grid(u);
  }
  return DecisionPoint{eta.xi0, ctrl, Impulse(std::move(pn))};
}

Matrix discrete_graph(const Trajectory& traj) {
  const GraphCompletion& gc = traj.eta.impulse.completion();
  Matrix out(1 + traj.state_dim(), traj.nodes());
  for (int k = 0; k < traj.nodes(); ++k) {
    out(0, k) = gc.theta(traj.s[k])(0);
    out.col(k).tail(traj.state_dim()) = traj.values.col(k);
  }
  return out;
}

Matrix completed_graph(const Trajectory& reference, const VectorMeasure& mu,
                       int dense_samples) {
  std::vector<double> tgrid(dense_samples);
  for (int i = 0; i < dense_samples; ++i)
    tgrid[i] = mu.horizon() * i / (dense_samples - 1);
  OriginalTimeSolution sol =
      push_forward(reference, mu, tgrid, std::max(64, dense_samples / 16));
  int n = static_cast<int>(sol.x.rows());
  int cols = static_cast<int>(sol.x.cols());
  for (const auto& arc : sol.arcs) cols += static_cast<int>(arc.x.cols());
  Matrix out(1 + n, cols);
  int at = 0;
  for (int i = 0; i < sol.x.cols(); ++i, ++at) {
    out(0, at) = sol.t[i];
    out.col(at).tail(n) = sol.x.col(i);
  }
  for (const auto& arc : sol.arcs)
    for (int i = 0; i < arc.x.cols(); ++i, ++at) {
      out(0, at) = arc.t;
      out.col(at).tail(n) = arc.x.col(i);
    }
  return out;
}

GraphConvergenceReport graph_convergence_report(
    const ProblemSpec& spec, const DecisionPoint& eta,
    const std::vector<int>& level_exps, int dense_samples) {
  const auto* vm = eta.impulse.as_measure();
  if (!vm)
    throw DomainError("graph_convergence_report needs a general measure");
  Trajectory ref = reference_solve(spec, eta, 1e-10);
  Matrix graph = completed_graph(ref, *vm, dense_samples);

  GraphConvergenceReport rep;
  for (int k : level_exps) {
    int N = 1 << k;
    DecisionPoint etaN = discretize(spec, eta, N);
    Trajectory yN = euler_solve(spec, etaN, N);
    rep.n_values.push_back(N);
    rep.dist.push_back(hausdorff(discrete_graph(yN), graph));
  }
  return rep;
}

double log_log_slope(const std::vector<int>& n_values,
                     const std::vector<double>& errs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t i = 0; i < n_values.size(); ++i) {
    if (errs[i] <= 0.0) continue;
    double x = std::log(static_cast<double>(n_values[i]));
    double y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return 0.0;
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ErrorBoundReport error_bound_report(const ProblemSpec& spec,
                                    const DecisionPoint& eta,
                                    const std::vector<int>& level_exps,
                                    double delta) {
  if (level_exps.size() < 4)
    throw DomainError("error_bound_report needs at least 4 levels");
  Trajectory ref = reference_solve(spec, eta, 1e-11);
  double f_ref = spec.cost.value(eta.xi0, ref.values.col(ref.nodes() - 1));

  ErrorBoundReport rep;
  rep.delta = delta;
  Vector shift = Vector::Zero(spec.state_dim);
  shift[0] = delta;
  for (int k : level_exps) {
    int N = 1 << k;
    DecisionPoint etaN = discretize(spec, eta, N);
    Trajectory yN = euler_solve(spec, etaN, N);
    double e = 0.0;
    for (int i = 0; i < yN.nodes(); ++i)
      e = std::max(e, (yN.values.col(i) - ref.at(yN.s[i])).norm());
    double c = std::abs(f_ref - spec.cost.value(eta.xi0,
                                                yN.values.col(yN.nodes() - 1)));
    rep.n_values.push_back(N);
    rep.e.push_back(e);
    rep.c.push_back(c);

    DecisionPoint shifted = etaN;
    shifted.xi0 = eta.xi0 + shift;
    Trajectory yNs = euler_solve(spec, shifted, N);
    double ep = 0.0;
    for (int i = 0; i < yNs.nodes(); ++i)
      ep = std::max(ep, (yNs.values.col(i) - ref.at(yNs.s[i])).norm());
    rep.e_perturbed.push_back(ep);
  }
  rep.slope_e = log_log_slope(rep.n_values, rep.e);
  rep.slope_c = log_log_slope(rep.n_values, rep.c);
  double worst_e = 0.0, worst_c = 0.0, worst_p = 0.0;
  bool all_tiny = true;
  for (size_t i = 0; i < rep.n_values.size(); ++i) {
    worst_e = std::max(worst_e, rep.e[i] * rep.n_values[i]);
    worst_c = std::max(worst_c, rep.c[i] * rep.n_values[i]);
    worst_p = std::max(worst_p,
                       rep.e_perturbed[i] / (delta + 1.0 / rep.n_values[i]));
    if (rep.e[i] > 1e-13) all_tiny = false;
  }
  rep.k_xi0 = worst_e;
  rep.k_s = worst_c;
  rep.k_xi0_perturbed = worst_p;
  rep.exact = all_tiny;
  return rep;
}

}  // namespace imoc
