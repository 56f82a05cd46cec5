#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imoc/graph_completion.hpp"
#include "imoc/sim.hpp"

#include <cmath>

using namespace imoc;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

VectorMeasure unit_atom(double t, double mass = 1.0, double horizon = 1.0) {
  Atom a;
  a.t = t;
  a.value = vec1(mass);
  a.profile = AtomProfile::constant(a.value);
  return VectorMeasure::atomic(horizon, 1, {a});
}

ProblemSpec scalar_jump_spec(double drift_slope, double jump_gain) {
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
  spec.state_bound = 10.0;
  return spec;
}

}  // namespace

TEST_CASE("pi map of the zero measure is the identity scaling") {
  VectorMeasure mu = VectorMeasure::zero(1.0, 1);
  CHECK(pi_map(mu, 0.7) == doctest::Approx(0.7));
  CHECK_THROWS_AS(pi_map(mu, -0.1), DomainError);
}

TEST_CASE("pi map around an atom") {
  VectorMeasure mu = unit_atom(0.5);
  CHECK(pi_map(mu, 0.4) == doctest::Approx(0.2));
  CHECK(pi_map(mu, 0.5, true) == doctest::Approx(0.25));
  CHECK(pi_map(mu, 0.5) == doctest::Approx(0.75));

  VectorMeasure mu0 = unit_atom(0.0);
  CHECK(pi_map(mu0, 0.0, true) == doctest::Approx(0.0));
  CHECK(pi_map(mu0, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("completion of the unit atom matches the hand computation") {
  VectorMeasure mu = unit_atom(0.5);
  GraphCompletion gc = build_completion(mu);
  CHECK(gc.theta(0.0)(0) == doctest::Approx(0.0));
  CHECK(gc.theta(0.125)(0) == doctest::Approx(0.25));
  CHECK(gc.theta(0.25)(0) == doctest::Approx(0.5));
  CHECK(gc.theta(0.5)(0) == doctest::Approx(0.5));
  CHECK(gc.theta(0.75)(0) == doctest::Approx(0.5));
  CHECK(gc.theta(1.0)(0) == doctest::Approx(1.0));
  CHECK(gc.phi(0.25)(0) == doctest::Approx(0.0));
  CHECK(gc.phi(0.5)(0) == doctest::Approx(0.5));
  CHECK(gc.phi(0.75)(0) == doctest::Approx(1.0));
  CHECK(gc.phi(1.0)(0) == doctest::Approx(1.0));
  CHECK(gc.lip_theta == doctest::Approx(2.0));
  CHECK(gc.lip_phi == doctest::Approx(2.0));
  REQUIRE(gc.atom_intervals.size() == 1);
  CHECK(gc.atom_intervals[0].s_lo == doctest::Approx(0.25));
  CHECK(gc.atom_intervals[0].s_hi == doctest::Approx(0.75));
}

TEST_CASE("completion of the zero measure") {
  VectorMeasure mu = VectorMeasure::zero(2.0, 1);
  GraphCompletion gc = build_completion(mu);
  CHECK(gc.theta(0.5)(0) == doctest::Approx(1.0));
  CHECK(gc.phi(0.7)(0) == doctest::Approx(0.0));
  CHECK(gc.lip_theta == doctest::Approx(2.0));  // b = T
  CHECK(gc.lip_phi == doctest::Approx(0.0));
}

TEST_CASE("knot measure completion is the uniform-grid interpolant") {
  Matrix vals(1, 3);
  vals << 0.0, 0.25, 1.0;
  PiecewiseLinearMeasure pn(1.0, {0.0, 0.5, 1.0}, vals);
  GraphCompletion gc = pn.completion();
  CHECK(gc.theta(0.5)(0) == doctest::Approx(0.5));
  CHECK(gc.theta(0.25)(0) == doctest::Approx(0.25));
  CHECK(gc.phi(0.5)(0) == doctest::Approx(0.25));
  CHECK(gc.phi(0.75)(0) == doctest::Approx(0.625));
}

TEST_CASE("round-trip identities between pi and theta") {
  Atom a1{0.3, vec1(0.5), AtomProfile::constant(vec1(0.5))};
  Atom a2{0.8, vec1(1.5), AtomProfile::constant(vec1(1.5))};
  Matrix ac(1, 2);
  ac << 0.0, 0.5;
  VectorMeasure mu(1.0, PwLinear({0.0, 1.0}, ac), {a1, a2});
  GraphCompletion gc = build_completion(mu);

  for (double t : {0.05, 0.2, 0.55, 0.79, 0.95}) {
    double s = pi_map(mu, t);
    CHECK(gc.theta(s)(0) == doctest::Approx(t).epsilon(1e-12));
    // Off-atom agreement of phi with the distribution function.
    CHECK((gc.phi(s) - mu.distribution(t)).norm() ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  // s outside atom intervals: pi(theta(s)) = s.
  for (double s : {0.02, 0.1, 0.95}) {
    bool inside = false;
    for (const auto& iv : gc.atom_intervals)
      inside = inside || (s > iv.s_lo && s < iv.s_hi);
    if (inside) continue;
    CHECK(pi_map(mu, gc.theta(s)(0)) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("atom interval lengths account for the atomic variation") {
  Atom a1{0.3, vec1(0.5), AtomProfile::constant(vec1(0.5))};
  Atom a2{0.8, vec1(1.5), AtomProfile::constant(vec1(1.5))};
  VectorMeasure mu = VectorMeasure::atomic(1.0, 1, {a1, a2});
  GraphCompletion gc = build_completion(mu);
  double total = 0.0;
  for (const auto& iv : gc.atom_intervals) total += iv.s_hi - iv.s_lo;
  CHECK(total == doctest::Approx(2.0 / 3.0));  // ||atoms|| / (T + ||mu||)

  // phi increment across each interval equals the atom value.
  for (size_t i = 0; i < gc.atom_intervals.size(); ++i) {
    const auto& iv = gc.atom_intervals[i];
    Vector inc = gc.phi(iv.s_hi) - gc.phi(iv.s_lo);
    CHECK((inc - mu.atoms()[i].value).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("theta is nondecreasing at every breakpoint") {
  Atom a1{0.0, vec1(0.2), AtomProfile::constant(vec1(0.2))};
  Atom a2{0.5, vec1(1.0), AtomProfile::constant(vec1(1.0))};
  Atom a3{1.0, vec1(0.4), AtomProfile::constant(vec1(0.4))};
  Matrix ac(1, 3);
  ac << 0.0, 0.3, 0.9;
  VectorMeasure mu(1.0, PwLinear({0.0, 0.6, 1.0}, ac), {a1, a2, a3});
  GraphCompletion gc = build_completion(mu);
  const auto& th = gc.theta.values();
  for (int k = 0; k + 1 < gc.theta.points(); ++k)
    CHECK(th(0, k + 1) >= th(0, k) - 1e-15);
  CHECK(gc.theta(0.0)(0) == doctest::Approx(0.0));
  CHECK(gc.theta(1.0)(0) == doctest::Approx(1.0));
  CHECK((gc.phi(1.0) - mu.distribution(1.0)).norm() == doctest::Approx(0.0));
}

TEST_CASE("push_forward identity when mu = 0") {
  ProblemSpec spec = scalar_jump_spec(0.0, 1.0);
  VectorMeasure mu = VectorMeasure::zero(1.0, 1);
  DecisionPoint eta{vec1(0.5), PwConstant(), Impulse(mu)};
  // Constant trajectory.
  Trajectory y = reference_solve(spec, eta, 1e-10);
  OriginalTimeSolution sol = push_forward(y, mu, {0.0, 0.25, 0.9});
  for (int i = 0; i < sol.x.cols(); ++i)
    CHECK(sol.x(0, i) == doctest::Approx(0.5));
  CHECK(sol.arcs.empty());
}

TEST_CASE("push_forward jump bookkeeping for dx = dmu") {
  ProblemSpec spec = scalar_jump_spec(0.0, 1.0);
  VectorMeasure mu = unit_atom(0.5);
  DecisionPoint eta{vec1(0.0), PwConstant(), Impulse(mu)};
  Trajectory y = reference_solve(spec, eta, 1e-10);
  OriginalTimeSolution sol = push_forward(y, mu, {0.0, 0.4, 0.5, 1.0});
  // x(0.4) = 0, x(0.5-) = 0, x(0.5) = 1, x(1) = 1.
  REQUIRE(sol.t.size() == 5);  // atom contributes both sides
  CHECK(sol.x(0, 1) == doctest::Approx(0.0));          // t = 0.4
  CHECK(sol.x(0, 2) == doctest::Approx(0.0).epsilon(1e-9));  // t = 0.5-
  CHECK(sol.x(0, 3) == doctest::Approx(1.0));          // t = 0.5
  CHECK(sol.x(0, 4) == doctest::Approx(1.0));
  // Jump equals arc increment.
  REQUIRE(sol.arcs.size() == 1);
  const auto& arc = sol.arcs[0];
  double jump = arc.x(0, arc.x.cols() - 1) - arc.x(0, 0);
  CHECK(jump == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("push_forward multiplicative atom: x(0.5) = c e^m") {
  // dx = x dmu, atom mass 1 at 0.5, x(0.5-) = 1 -> x(0.5) = e.
  ProblemSpec spec = scalar_jump_spec(0.0, 1.0);
  spec.dynamics.jump.kind = JumpField::Kind::diag_affine;
  spec.dynamics.jump.D = Matrix::Constant(1, 1, 1.0);  // g(x) = x
  spec.dynamics.jump.E = Matrix::Zero(1, 1);
  VectorMeasure mu = unit_atom(0.5);
  DecisionPoint eta{vec1(1.0), PwConstant(), Impulse(mu)};
  Trajectory y = reference_solve(spec, eta, 1e-11);
  OriginalTimeSolution sol = push_forward(y, mu, {0.5});
  // Columns: (0.5-, 0.5).
  CHECK(sol.x(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.x(0, 1) == doctest::Approx(std::exp(1.0)).epsilon(1e-8));
}

TEST_CASE("push_forward rejects a mismatched measure") {
  ProblemSpec spec = scalar_jump_spec(0.0, 1.0);
  VectorMeasure mu = unit_atom(0.5);
  DecisionPoint eta{vec1(0.0), PwConstant(), Impulse(mu)};
  Trajectory y = reference_solve(spec, eta, 1e-9);
  VectorMeasure other = unit_atom(0.25);
  CHECK_THROWS_AS(push_forward(y, other, {0.0, 1.0}), ConsistencyError);
}
