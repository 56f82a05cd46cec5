#include "imoc/measure.hpp"

#include <algorithm>
#include <cmath>

namespace imoc {

AtomProfile AtomProfile::constant(const Vector& value) {
  AtomProfile p;
  p.breakpoints = {0.0, 1.0};
  p.values = value;
  return p;
}

Vector AtomProfile::at(double sigma) const {
  if (sigma < -1e-12 || sigma > 1.0 + 1e-12)
    throw DomainError("profile argument outside [0,1]");
  sigma = std::clamp(sigma, 0.0, 1.0);
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), sigma);
  int k = std::clamp(static_cast<int>(it - breakpoints.begin()) - 1, 0,
                     pieces() - 1);
  return values.col(k);
}

Vector AtomProfile::integral() const {
  Vector out = Vector::Zero(values.rows());
  for (int k = 0; k < pieces(); ++k)
    out += values.col(k) * (breakpoints[k + 1] - breakpoints[k]);
  return out;
}

std::vector<Violation> validate_profile(const AtomProfile& profile,
                                        const Vector& atom_value,
                                        double atom_variation, double tol) {
  std::vector<Violation> out;
  if (profile.breakpoints.size() < 2 ||
      std::abs(profile.breakpoints.front()) > tol ||
      std::abs(profile.breakpoints.back() - 1.0) > tol) {
    out.push_back({"profile", "breakpoints must partition [0,1]"});
    return out;
  }
  for (int k = 0; k < profile.pieces(); ++k) {
    double mass = profile.values.col(k).cwiseAbs().sum();
    if (std::abs(mass - atom_variation) > tol) {
      out.push_back({"profile",
                     "condition (i) violated on piece " + std::to_string(k) +
                         ": |psi| = " + std::to_string(mass) +
                         ", atom variation = " + std::to_string(atom_variation)});
      break;
    }
  }
  if ((profile.integral() - atom_value).cwiseAbs().maxCoeff() > tol)
    out.push_back({"profile", "condition (ii) violated: profile does not "
                              "integrate to the atom value"});
  return out;
}

VectorMeasure::VectorMeasure(double horizon, PwLinear ac_distribution,
                             std::vector<Atom> atoms)
    : horizon_(horizon), ac_(std::move(ac_distribution)), atoms_(std::move(atoms)) {
  if (horizon_ <= 0.0) throw DomainError("measure horizon must be positive");
  if (!nearly_equal(ac_.lo(), 0.0, 1e-12) ||
      !nearly_equal(ac_.hi(), horizon_, 1e-9))
    throw DomainError("ac distribution must span [0, T]");
  if (ac_.values().col(0).cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("ac distribution must vanish at t = 0");
  for (int k = 0; k + 1 < ac_.points(); ++k) {
    Vector inc = ac_.values().col(k + 1) - ac_.values().col(k);
    if (inc.minCoeff() < -1e-12)
      throw DomainError("ac distribution must be coordinatewise nondecreasing");
  }
  double prev = -1.0;
  for (const auto& a : atoms_) {
    if (a.t < 0.0 || a.t > horizon_)
      throw DomainError("atom time outside [0, T]");
    if (a.t <= prev) throw DomainError("atom times must be strictly increasing");
    prev = a.t;
    if (a.value.size() != ac_.dim())
      throw DomainError("atom value dimension mismatch");
    if (a.value.minCoeff() < 0.0 || a.value.cwiseAbs().sum() == 0.0)
      throw DomainError("atom values must lie in K \\ {0}");
  }
}

VectorMeasure VectorMeasure::zero(double horizon, int q) {
  return VectorMeasure(horizon,
                       PwLinear::constant(0.0, horizon, Vector::Zero(q)), {});
}

VectorMeasure VectorMeasure::absolutely_continuous(double horizon,
                                                   std::vector<double> knots,
                                                   Matrix values) {
  return VectorMeasure(horizon, PwLinear(std::move(knots), std::move(values)),
                       {});
}

VectorMeasure VectorMeasure::atomic(double horizon, int q,
                                    std::vector<Atom> atoms) {
  return VectorMeasure(horizon,
                       PwLinear::constant(0.0, horizon, Vector::Zero(q)),
                       std::move(atoms));
}

Vector VectorMeasure::distribution(double t, bool left_limit) const {
  if (t < -1e-12 || t > horizon_ + 1e-12)
    throw DomainError("distribution argument outside [0, T]");
  t = std::clamp(t, 0.0, horizon_);
  Vector out = ac_(t);
  for (const auto& a : atoms_) {
    if (a.t > t) break;
    if (a.t < t || !left_limit) out += a.value;
  }
  return out;
}

double VectorMeasure::variation(double t, bool left_limit) const {
  return distribution(t, left_limit).sum();
}

PwLinear VectorMeasure::distribution_function() const {
  std::vector<double> xs;
  std::vector<Vector> cols;
  size_t next_atom = 0;
  auto push_atoms_before = [&](double t) {
    while (next_atom < atoms_.size() && atoms_[next_atom].t < t) {
      const auto& a = atoms_[next_atom];
      xs.push_back(a.t);
      cols.push_back(distribution(a.t, true));
      xs.push_back(a.t);
      cols.push_back(distribution(a.t, false));
      ++next_atom;
    }
  };
  for (int k = 0; k < ac_.points(); ++k) {
    double t = ac_.breakpoints()[k];
    push_atoms_before(t);
    if (next_atom < atoms_.size() && atoms_[next_atom].t == t) {
      xs.push_back(t);
      cols.push_back(distribution(t, true));
      xs.push_back(t);
      cols.push_back(distribution(t, false));
      ++next_atom;
    } else {
      xs.push_back(t);
      cols.push_back(distribution(t, false));
    }
  }
  push_atoms_before(horizon_ + 1.0);
  Matrix ys(dim(), xs.size());
  for (size_t i = 0; i < cols.size(); ++i) ys.col(i) = cols[i];
  return PwLinear(std::move(xs), std::move(ys));
}

PiecewiseLinearMeasure::PiecewiseLinearMeasure(
    double horizon, std::vector<double> knots, Matrix values,
    std::shared_ptr<const GraphCompletion> attached)
    : horizon_(horizon),
      knots_(std::move(knots)),
      values_(std::move(values)),
      attached_(std::move(attached)) {
  if (horizon_ <= 0.0) throw DomainError("measure horizon must be positive");
  if (knots_.size() < 2 || static_cast<int>(knots_.size()) != values_.cols())
    throw DomainError("knot/value count mismatch");
  if (!nearly_equal(knots_.front(), 0.0, 1e-12) ||
      !nearly_equal(knots_.back(), horizon_, 1e-9))
    throw DomainError("knots must span [0, T]");
  if (values_.col(0).cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("distribution must vanish at t = 0");
  for (size_t k = 0; k + 1 < knots_.size(); ++k) {
    if (knots_[k + 1] < knots_[k] - 1e-15)
      throw DomainError("knots must be nondecreasing");
    Vector inc = values_.col(k + 1) - values_.col(k);
    if (inc.minCoeff() < -1e-12)
      throw DomainError("knot increments must lie in K");
  }
}

Vector PiecewiseLinearMeasure::distribution(double t, bool left_limit) const {
  PwLinear f = distribution_function();
  if (t < -1e-12 || t > horizon_ + 1e-12)
    throw DomainError("distribution argument outside [0, T]");
  t = std::clamp(t, 0.0, horizon_);
  return left_limit ? f.left_limit(t) : f(t);
}

double PiecewiseLinearMeasure::variation(double t, bool left_limit) const {
  return distribution(t, left_limit).sum();
}

PwLinear PiecewiseLinearMeasure::distribution_function() const {
  return PwLinear(knots_, values_);
}

GraphCompletion PiecewiseLinearMeasure::own_completion() const {
  int n = cells();
  std::vector<double> s(n + 1);
  for (int k = 0; k <= n; ++k) s[k] = static_cast<double>(k) / n;
  Matrix th(1, n + 1);
  for (int k = 0; k <= n; ++k) th(0, k) = knots_[k];
  GraphCompletion gc;
  gc.theta = PwLinear(s, th);
  gc.phi = PwLinear(s, values_);
  gc.horizon = horizon_;
  double b = 0.0, r = 0.0;
  for (int k = 0; k < n; ++k) {
    b = std::max(b, std::abs(gc.theta.cell_slope(k)(0)));
    r = std::max(r, gc.phi.cell_slope(k).norm());
  }
  gc.lip_theta = b;
  gc.lip_phi = r;
  return gc;
}

GraphCompletion PiecewiseLinearMeasure::completion() const {
  if (attached_) return *attached_;
  return own_completion();
}

PiecewiseLinearMeasure approximate(const VectorMeasure& mu,
                                   const GraphCompletion& gc, int n_cells) {
  Grid grid(n_cells);
  const int n = grid.n;
  std::vector<double> s(n + 1);
  Matrix th(1, n + 1);
  Matrix ph(mu.dim(), n + 1);
  for (int k = 0; k <= n; ++k) {
    s[k] = grid.node(k);
    th(0, k) = gc.theta(s[k])(0);
    ph.col(k) = gc.phi(s[k]);
  }

  auto sampled = std::make_shared<GraphCompletion>();
  sampled->theta = PwLinear(s, th);
  sampled->phi = PwLinear(s, ph);
  sampled->horizon = mu.horizon();
  for (int k = 0; k < n; ++k) {
    sampled->lip_theta =
        std::max(sampled->lip_theta, std::abs(sampled->theta.cell_slope(k)(0)));
    sampled->lip_phi = std::max(sampled->lip_phi, sampled->phi.cell_slope(k).norm());
  }

  // Distinct theta samples become the distribution knots; a run of equal
  // samples keeps the phi value at the run's s-midpoint, so an atom's mass
  // lands on the adjacent cells.
  std::vector<double> knots;
  std::vector<Vector> vals;
  const double tol = 1e-13 * (1.0 + mu.horizon());
  int k = 0;
  while (k <= n) {
    int j = k;
    while (j + 1 <= n && th(0, j + 1) - th(0, k) <= tol) ++j;
    knots.push_back(th(0, k));
    vals.push_back(gc.phi(0.5 * (s[k] + s[j])));
    k = j + 1;
  }
  knots.front() = 0.0;
  knots.back() = mu.horizon();
  vals.front() = Vector::Zero(mu.dim());
  vals.back() = gc.phi(1.0);
  Matrix values(mu.dim(), knots.size());
  for (size_t i = 0; i < vals.size(); ++i) values.col(i) = vals[i];
  return PiecewiseLinearMeasure(mu.horizon(), std::move(knots),
                                std::move(values), std::move(sampled));
}

}  // namespace imoc
