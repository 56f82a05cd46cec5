#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imoc/sim.hpp"
#include "imoc/solver.hpp"

#include <cmath>
#include <random>

using namespace imoc;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

ProblemSpec scalar_spec(double drift_slope, double jump_gain,
                        double state_bound = 20.0) {
  ProblemSpec spec;
  spec.state_dim = 1;
  spec.control_dim = 0;
  spec.measure_dim = 1;
  spec.horizon = 1.0;
  spec.dynamics.A = Matrix::Constant(1, 1, drift_slope);
  spec.dynamics.c = Vector::Zero(1);
  spec.dynamics.B = Matrix::Zero(1, 0);
  spec.dynamics.jump.G = Matrix::Constant(1, 1, jump_gain);
  spec.cost.target1 = vec1(0.0);
  spec.initial_set = ConvexSet::box(vec1(-10.0), vec1(10.0));
  spec.control_set = ConvexSet::empty();
  spec.beta_max = 1.0;
  spec.omega = 0.5;
  spec.state_bound = state_bound;
  return spec;
}

PiecewiseLinearMeasure uniform_mass(double mass, int cells) {
  std::vector<double> knots(cells + 1);
  Matrix vals(1, cells + 1);
  for (int k = 0; k <= cells; ++k) {
    knots[k] = double(k) / cells;
    vals(0, k) = mass * k / cells;
  }
  return PiecewiseLinearMeasure(1.0, std::move(knots), std::move(vals));
}

VectorMeasure atom_measure(double t, double mass) {
  Atom a;
  a.t = t;
  a.value = vec1(mass);
  a.profile = AtomProfile::constant(a.value);
  return VectorMeasure::atomic(1.0, 1, {a});
}

}  // namespace

TEST_CASE("euler matches phi increments when f = 0, g = 1") {
  ProblemSpec spec = scalar_spec(0.0, 1.0);
  DecisionPoint eta{vec1(0.0), PwConstant(), Impulse(uniform_mass(1.0, 2))};
  Trajectory y = euler_solve(spec, eta, 2);
  CHECK(y.values(0, 0) == doctest::Approx(0.0));
  CHECK(y.values(0, 1) == doctest::Approx(0.5));
  CHECK(y.values(0, 2) == doctest::Approx(1.0));
}

TEST_CASE("euler compounding: f(x) = x, N = 4") {
  ProblemSpec spec = scalar_spec(1.0, 0.0);
  DecisionPoint eta{vec1(1.0), PwConstant(), Impulse(uniform_mass(0.0, 4))};
  Trajectory y = euler_solve(spec, eta, 4);
  CHECK(y.values(0, 4) == doctest::Approx(std::pow(1.25, 4)));
}

TEST_CASE("euler error at N = 2^10 sits under the fitted K/N") {
  // dx = a x dt + dmu with the closed form x(T) = e^{aT} x0 + m e^{a(T-tau)}.
  const double a = 1.0, m = 2.0, tau = 0.5;
  ProblemSpec spec = scalar_spec(a, 1.0);
  VectorMeasure mu = atom_measure(tau, m);
  DecisionPoint eta{vec1(1.0), PwConstant(), Impulse(mu)};
  double closed = std::exp(a) + m * std::exp(a * (1.0 - tau));

  std::vector<double> errs;
  std::vector<int> ns;
  for (int k = 3; k <= 10; ++k) {
    int n = 1 << k;
    DecisionPoint etaN = discretize(spec, eta, n);
    Trajectory y = euler_solve(spec, etaN, n);
    errs.push_back(std::abs(y.values(0, y.nodes() - 1) - closed));
    ns.push_back(n);
  }
  double fitted = 0.0;
  for (size_t i = 0; i < errs.size(); ++i)
    fitted = std::max(fitted, errs[i] * ns[i]);
  CHECK(errs.back() <= fitted / 1024 + 1e-15);
  // First-order decay.
  CHECK(errs.back() < errs.front() / 64);
}

TEST_CASE("reference solve reproduces e") {
  ProblemSpec spec = scalar_spec(1.0, 0.0);
  DecisionPoint eta{vec1(1.0), PwConstant(),
                    Impulse(VectorMeasure::zero(1.0, 1))};
  Trajectory y = reference_solve(spec, eta, 1e-10);
  CHECK(y.values(0, y.nodes() - 1) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(y.certificate.value() < 1e-10);
}

TEST_CASE("reference solve crosses a unit atom linearly") {
  ProblemSpec spec = scalar_spec(0.0, 1.0);
  VectorMeasure mu = atom_measure(0.5, 1.0);
  DecisionPoint eta{vec1(0.0), PwConstant(), Impulse(mu)};
  Trajectory y = reference_solve(spec, eta, 1e-10);
  // I = [0.25, 0.75]; y rises linearly from 0 to 1 across it.
  CHECK(y.at(0.25)(0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(y.at(0.5)(0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(y.at(0.75)(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(y.at(1.0)(0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("multiplicative atom integrates to e^m") {
  ProblemSpec spec = scalar_spec(0.0, 1.0);
  spec.dynamics.jump.kind = JumpField::Kind::diag_affine;
  spec.dynamics.jump.D = Matrix::Constant(1, 1, 1.0);
  spec.dynamics.jump.E = Matrix::Zero(1, 1);
  VectorMeasure mu = atom_measure(0.5, 1.0);
  DecisionPoint eta{vec1(1.0), PwConstant(), Impulse(mu)};
  Trajectory y = reference_solve(spec, eta, 1e-11);
  CHECK(y.at(0.75)(0) == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("euler is deterministic") {
  ProblemSpec spec = scalar_spec(0.7, 0.3);
  DecisionPoint eta{vec1(0.4), PwConstant(), Impulse(uniform_mass(0.8, 16))};
  Trajectory y1 = euler_solve(spec, eta, 16);
  Trajectory y2 = euler_solve(spec, eta, 16);
  CHECK((y1.values - y2.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("uniform convergence of Euler polylines to the reference") {
  // Mild atom problem with a control.
  ProblemSpec spec = scalar_spec(0.3, 1.0);
  spec.control_dim = 1;
  spec.dynamics.B = Matrix::Constant(1, 1, 0.5);
  spec.control_set = ConvexSet::box(vec1(-0.4), vec1(0.4));
  VectorMeasure mu = atom_measure(0.5, 1.0);
  Matrix uvals(1, 2);
  uvals << 0.3, -0.2;
  PwConstant u({0.0, 0.5, 1.0}, uvals);
  DecisionPoint eta{vec1(1.0), u, Impulse(mu)};
  Trajectory ref = reference_solve(spec, eta, 1e-11);

  double prev = std::numeric_limits<double>::infinity();
  double sup = prev;
  for (int k = 3; k <= 10; ++k) {
    int n = 1 << k;
    DecisionPoint etaN = discretize(spec, eta, n);
    Trajectory y = euler_solve(spec, etaN, n);
    sup = 0.0;
    for (int i = 0; i < y.nodes(); ++i)
      sup = std::max(sup, (y.values.col(i) - ref.at(y.s[i])).norm());
    CHECK(sup < prev);
    prev = sup;
  }
  CHECK(sup < 1e-2);
}

TEST_CASE("growth bound holds with slack for zero fields") {
  ProblemSpec spec = scalar_spec(0.0, 0.0);
  DecisionPoint eta{vec1(0.7), PwConstant(), Impulse(uniform_mass(0.0, 8))};
  Trajectory y = euler_solve(spec, eta, 8);
  RegularityConstants rc;
  rc.k1 = 1.0;
  GraphCompletion gc = eta.impulse.completion();
  GrowthBoundReport rep = growth_bound_check(y, rc.with_completion(gc.lip_theta,
                                                        gc.lip_phi));
  CHECK(rep.violations == 0);
  // y constant: slack is (e^beta - 1)(1 + |xi0|).
  double beta = rc.k1 * (gc.lip_theta + gc.lip_phi);
  CHECK(rep.min_slack ==
        doctest::Approx((std::exp(beta) - 1.0) * 1.7).epsilon(1e-9));
}

TEST_CASE("growth bound is tight when beta = 0") {
  Trajectory y(Trajectory::Kind::euler_polyline, {0.0, 1.0},
               Matrix::Constant(1, 2, 0.7),
               DecisionPoint{vec1(0.7), PwConstant(),
                             Impulse(VectorMeasure::zero(1.0, 1))});
  RegularityConstants rc;
  rc.k1 = 0.0;
  CHECK(growth_bound_check(y, rc).min_slack == doctest::Approx(0.0));
  CHECK(growth_bound_check(y, rc).violations == 0);
}

TEST_CASE("euler polyline cell slopes obey the growth bound") {
  ProblemSpec spec = scalar_spec(0.9, 0.8);
  DecisionPoint eta{vec1(0.5), PwConstant(), Impulse(uniform_mass(1.2, 32))};
  Trajectory y = euler_solve(spec, eta, 32);
  RegularityConstants rc = analytic_constants(spec);
  GraphCompletion gc = eta.impulse.completion();
  double beta = rc.k1 * (gc.lip_theta + gc.lip_phi);
  for (int k = 0; k + 1 < y.nodes(); ++k) {
    double slope = std::abs(y.values(0, k + 1) - y.values(0, k)) /
                   (y.s[k + 1] - y.s[k]);
    CHECK(slope <= beta * (y.values.col(k).norm() + 1.0) + 1e-9);
  }
}

TEST_CASE("conservation: f = 0, g = I gives y(1) - y(0) = phi(1)") {
  ProblemSpec spec = scalar_spec(0.0, 1.0);
  DecisionPoint eta{vec1(0.3), PwConstant(), Impulse(uniform_mass(2.5, 8))};
  Trajectory y = euler_solve(spec, eta, 8);
  CHECK(y.values(0, 8) - y.values(0, 0) == doctest::Approx(2.5));
}

TEST_CASE("uniqueness surrogate agrees across mesh seeds") {
  ProblemSpec spec = scalar_spec(0.8, 1.0);
  VectorMeasure mu = atom_measure(0.4, 0.7);
  DecisionPoint eta{vec1(1.0), PwConstant(), Impulse(mu)};
  UniquenessReport rep = uniqueness_check(spec, eta, 1e-9);
  CHECK(rep.agreed);
  CHECK(rep.discrepancy <= rep.allowance);

  // Bitwise equality for the trivial ODE.
  ProblemSpec z = scalar_spec(0.0, 0.0);
  DecisionPoint etaz{vec1(0.2), PwConstant(),
                     Impulse(VectorMeasure::zero(1.0, 1))};
  SimOptions same;
  Trajectory y1 = reference_solve(z, etaz, 1e-12, same);
  Trajectory y2 = reference_solve(z, etaz, 1e-12, same);
  CHECK((y1.values - y2.values).cwiseAbs().maxCoeff() == 0.0);

  // Stiff decay (rate 50) still certifies: coarse meshes sit outside the
  // explicit stability region and get refined away.
  ProblemSpec stiff = scalar_spec(-50.0, 0.0, 2.0);
  DecisionPoint etas{vec1(1.0), PwConstant(),
                     Impulse(VectorMeasure::zero(1.0, 1))};
  UniquenessReport srep = uniqueness_check(stiff, etas, 1e-8);
  CHECK(srep.agreed);
  Trajectory ys = reference_solve(stiff, etas, 1e-8);
  CHECK(ys.at(1.0)(0) == doctest::Approx(std::exp(-50.0)).epsilon(1e-4));
}

TEST_CASE("euler rejects controls off the grid") {
  ProblemSpec spec = scalar_spec(0.0, 1.0);
  spec.control_dim = 1;
  spec.dynamics.B = Matrix::Constant(1, 1, 1.0);
  spec.control_set = ConvexSet::box(vec1(-0.4), vec1(0.4));
  Matrix uvals(1, 2);
  uvals << 0.1, -0.1;
  PwConstant u({0.0, 0.3, 1.0}, uvals);  // breakpoint 0.3 not on an N=8 grid
  DecisionPoint eta{vec1(0.0), u, Impulse(uniform_mass(0.5, 8))};
  CHECK_THROWS_AS(euler_solve(spec, eta, 8), DomainError);
}

TEST_CASE("reference solve reports an unreachable tolerance") {
  ProblemSpec spec = scalar_spec(1.0, 0.0);
  DecisionPoint eta{vec1(1.0), PwConstant(),
                    Impulse(VectorMeasure::zero(1.0, 1))};
  SimOptions opts;
  opts.max_halvings = 1;
  opts.initial_subcells = 1;
  CHECK_THROWS_AS(reference_solve(spec, eta, 1e-30, opts), AccuracyError);
}

TEST_CASE("atoms at the horizon endpoints integrate cleanly") {
  ProblemSpec spec = scalar_spec(0.0, 1.0);
  Atom a0{0.0, vec1(0.5), AtomProfile::constant(vec1(0.5))};
  Atom aT{1.0, vec1(0.25), AtomProfile::constant(vec1(0.25))};
  VectorMeasure mu = VectorMeasure::atomic(1.0, 1, {a0, aT});
  DecisionPoint eta{vec1(0.0), PwConstant(), Impulse(mu)};
  Trajectory y = reference_solve(spec, eta, 1e-10);
  // dx = dmu: y(1) = total mass; the jump at 0 lands before any drift time.
  CHECK(y.at(1.0)(0) == doctest::Approx(0.75).epsilon(1e-9));
  OriginalTimeSolution sol = push_forward(y, mu, {0.0, 0.5, 1.0});
  // Columns: (0-, 0), (0.5), (1-, 1).
  CHECK(sol.x(0, 0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sol.x(0, 1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.x(0, 3) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.x(0, 4) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("divergence raises with the offending step") {
  ProblemSpec spec = scalar_spec(4.0, 0.0, 0.5);
  // Blowup threshold is 1e6 (1 + L); drive hard with a large measure.
  spec.dynamics.jump.G = Matrix::Constant(1, 1, 1e7);
  DecisionPoint eta{vec1(1.0), PwConstant(), Impulse(uniform_mass(50.0, 8))};
  CHECK_THROWS_AS(euler_solve(spec, eta, 8), DivergenceError);
}
