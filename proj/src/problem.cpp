#include "imoc/problem.hpp"

#include <cmath>

namespace imoc {

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size())
    throw DomainError("box bounds dimension mismatch");
  for (int i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i]) throw DomainError("box has empty face");
  ConvexSet s;
  s.rep_ = Box{std::move(lower), std::move(upper)};
  return s;
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (radius < 0.0) throw DomainError("ball radius must be nonnegative");
  ConvexSet s;
  s.rep_ = Ball{std::move(center), radius};
  return s;
}

ConvexSet ConvexSet::empty() {
  ConvexSet s;
  s.rep_ = Box{Vector(0), Vector(0)};
  return s;
}

int ConvexSet::dim() const {
  if (auto* b = as_box()) return static_cast<int>(b->lower.size());
  if (auto* b = as_ball()) return static_cast<int>(b->center.size());
  return 0;
}

Vector ConvexSet::project(const Vector& p) const {
  if (auto* b = as_box()) return p.cwiseMax(b->lower).cwiseMin(b->upper);
  if (auto* b = as_ball()) {
    Vector d = p - b->center;
    double n = d.norm();
    if (n <= b->radius) return p;
    return b->center + d * (b->radius / n);
  }
  return p;
}

bool ConvexSet::contains(const Vector& p, double tol) const {
  return (p - project(p)).norm() <= tol;
}

Vector ConvexSet::center() const {
  if (auto* b = as_box()) return 0.5 * (b->lower + b->upper);
  if (auto* b = as_ball()) return b->center;
  return Vector(0);
}

Vector ConvexSet::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (auto* b = as_box()) {
    Vector out(b->lower.size());
    for (int i = 0; i < out.size(); ++i)
      out[i] = b->lower[i] + unit(rng) * (b->upper[i] - b->lower[i]);
    return out;
  }
  if (auto* b = as_ball()) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector d(b->center.size());
    for (int i = 0; i < d.size(); ++i) d[i] = gauss(rng);
    double n = d.norm();
    if (n == 0.0) return b->center;
    double radial = std::pow(unit(rng), 1.0 / std::max(1, int(d.size())));
    return b->center + d * (b->radius * radial / n);
  }
  return Vector(0);
}

double ConvexSet::max_norm() const {
  if (auto* b = as_box()) {
    if (b->lower.size() == 0) return 0.0;
    Vector m = b->lower.cwiseAbs().cwiseMax(b->upper.cwiseAbs());
    return m.norm();
  }
  if (auto* b = as_ball()) return b->center.norm() + b->radius;
  return 0.0;
}

Matrix JumpField::eval(const Vector& x) const {
  if (kind == Kind::constant) return G;
  return D.array().colwise() * x.array() + E.array();
}

Matrix JumpField::apply_jacobian(const Vector& x, const Vector& w) const {
  int n = static_cast<int>(x.size());
  if (kind == Kind::constant) return Matrix::Zero(n, n);
  return Matrix((D * w).asDiagonal());
}

Vector Dynamics::eval(const Vector& x, const Vector& u) const {
  Vector out = drift(x);
  if (B.cols() > 0) out += B * u;
  return out;
}

double Cost::value(const Vector& x0, const Vector& x1) const {
  double v = 0.0;
  if (w0 != 0.0) v += w0 * (x0 - target0).squaredNorm();
  v += w1 * (x1 - target1).squaredNorm();
  if (a0.size()) v += a0.dot(x0);
  if (a1.size()) v += a1.dot(x1);
  return v;
}

std::pair<Vector, Vector> Cost::gradient(const Vector& x0,
                                         const Vector& x1) const {
  Vector g0 = Vector::Zero(x0.size());
  Vector g1 = 2.0 * w1 * (x1 - target1);
  if (w0 != 0.0) g0 += 2.0 * w0 * (x0 - target0);
  if (a0.size()) g0 += a0;
  if (a1.size()) g1 += a1;
  return {g0, g1};
}

Cost Cost::scaled(double factor) const {
  Cost out = *this;
  out.w0 *= factor;
  out.w1 *= factor;
  if (out.a0.size()) out.a0 *= factor;
  if (out.a1.size()) out.a1 *= factor;
  return out;
}

Vector eval_dynamics(const ProblemSpec& spec, const Vector& x,
                     const Vector& u) {
  if (x.size() != spec.state_dim)
    throw DomainError("eval_dynamics: state dimension mismatch");
  if (u.size() != spec.control_dim)
    throw DomainError("eval_dynamics: control dimension mismatch");
  Vector out = spec.dynamics.eval(x, u);
  for (int i = 0; i < out.size(); ++i)
    if (!std::isfinite(out[i]))
      throw InvalidField("dynamics component " + std::to_string(i) +
                         " is not finite");
  return out;
}

RegularityConstants estimate_constants(const ProblemSpec& spec,
                                       int sample_count, std::uint64_t seed) {
  if (sample_count < 100)
    throw DomainError("estimate_constants needs sample_count >= 100");
  std::mt19937_64 rng(seed);
  const double box = spec.state_bound + 1.0;
  std::uniform_real_distribution<double> ux(-box, box);
  auto rand_x = [&] {
    Vector x(spec.state_dim);
    for (int i = 0; i < x.size(); ++i) x[i] = ux(rng);
    return x;
  };
  auto rand_u = [&] {
    if (spec.control_dim == 0) return Vector(0);
    return spec.control_set.sample(rng);
  };

  double qf = 0.0, qg = 0.0, growth = 0.0;
  for (int i = 0; i < sample_count; ++i) {
    Vector x1 = rand_x(), x2 = rand_x();
    Vector u1 = rand_u(), u2 = rand_u();
    double den = (x1 - x2).norm() + (u1 - u2).norm();
    if (den > 1e-12) {
      qf = std::max(qf, (spec.dynamics.eval(x1, u1) - spec.dynamics.eval(x2, u2))
                            .norm() /
                            den);
    }
    double dx = (x1 - x2).norm();
    if (dx > 1e-12) {
      qg = std::max(
          qg, (spec.dynamics.jump.eval(x1) - spec.dynamics.jump.eval(x2)).norm() /
                  dx);
    }
    double denom = 1.0 + x1.norm();
    growth = std::max(growth, spec.dynamics.eval(x1, u1).norm() / denom);
    growth = std::max(growth, spec.dynamics.jump.eval(x1).norm() / denom);
  }

  RegularityConstants out;
  out.k_prime = std::max(1.0, 1.5 * qf);
  out.k_dprime = std::max(1.0, 1.5 * qg);
  out.k1 = std::max(1.0, 1.5 * growth);
  out.b = 0.0;
  out.r = 0.0;
  return out;
}

namespace {
double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}
}  // namespace

RegularityConstants analytic_constants(const ProblemSpec& spec) {
  const Dynamics& dyn = spec.dynamics;
  double anorm = spectral_norm(dyn.A);
  double bnorm = spectral_norm(dyn.B);
  double cnorm = dyn.c.size() ? dyn.c.norm() : 0.0;
  double ubound = spec.control_dim > 0 ? spec.omega * spec.beta_max : 0.0;

  RegularityConstants out;
  out.k_prime = std::max(1.0, std::max(anorm, bnorm));
  double g_lip = 0.0, g_growth = 0.0;
  if (dyn.jump.kind == JumpField::Kind::constant) {
    g_growth = dyn.jump.G.norm();
  } else {
    g_lip = dyn.jump.D.norm();  // Frobenius bounds the operator rank
    g_growth = std::max(dyn.jump.D.norm(), dyn.jump.E.norm());
  }
  out.k_dprime = std::max(1.0, g_lip);
  out.k1 = std::max({1.0, anorm, cnorm + bnorm * ubound, g_growth});
  return out;
}

std::vector<Violation> validate(const ProblemSpec& spec) {
  std::vector<Violation> out;
  auto add = [&](const std::string& key, const std::string& msg) {
    out.push_back({key, msg});
  };

  if (spec.state_dim <= 0) add("dims.state", "state dimension must be positive");
  if (spec.control_dim < 0)
    add("dims.control", "control dimension must be nonnegative");
  if (spec.measure_dim <= 0)
    add("dims.measure", "measure dimension must be positive");
  if (!(spec.horizon > 0.0)) add("horizon", "horizon must be positive");
  if (!(spec.omega > 0.0 && spec.omega < 1.0))
    add("omega", "omega must lie in (0,1)");
  if (!(spec.beta_max > 0.0)) add("beta_max", "beta_max must be positive");
  if (!(spec.state_bound > 0.0))
    add("state_bound", "state bound must be positive");
  if (!out.empty()) return out;

  if (spec.initial_set.dim() != spec.state_dim)
    add("initial_set", "initial set dimension mismatch");
  if (spec.control_dim > 0 && spec.control_set.dim() != spec.control_dim)
    add("control_set", "control set dimension mismatch");
  if (!out.empty()) return out;

  // Ubar must sit inside the ball of radius omega*beta_max.
  if (spec.control_dim > 0) {
    double cap = spec.omega * spec.beta_max;
    if (spec.control_set.max_norm() > cap + 1e-12)
      add("control_set", "control set exceeds bound omega*beta_max");
  }

  // Linearity in u and finiteness over the working box.
  std::mt19937_64 rng(0x5eedu);
  const double box = spec.state_bound + 1.0;
  std::uniform_real_distribution<double> ux(-box, box);
  std::uniform_real_distribution<double> ua(0.0, 1.0);
  bool linear_ok = true, finite_ok = true;
  for (int i = 0; i < 64 && (linear_ok || finite_ok); ++i) {
    Vector x(spec.state_dim);
    for (int j = 0; j < x.size(); ++j) x[j] = ux(rng);
    Vector u1(spec.control_dim), u2(spec.control_dim);
    if (spec.control_dim > 0) {
      u1 = spec.control_set.sample(rng);
      u2 = spec.control_set.sample(rng);
    }
    double a = ua(rng);
    Vector lhs = spec.dynamics.eval(x, a * u1 + (1 - a) * u2);
    Vector rhs = a * spec.dynamics.eval(x, u1) +
                 (1 - a) * spec.dynamics.eval(x, u2);
    double scale = 1.0 + lhs.norm();
    if ((lhs - rhs).norm() > 1e-12 * scale) linear_ok = false;
    if (!lhs.allFinite() || !spec.dynamics.jump.eval(x).allFinite())
      finite_ok = false;
  }
  if (!linear_ok) add("dynamics", "dynamics are not linear in the control");
  if (!finite_ok) add("dynamics", "field evaluation is not finite on the box");
  return out;
}

}  // namespace imoc
