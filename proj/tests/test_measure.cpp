#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imoc/graph_completion.hpp"
#include "imoc/metrics.hpp"

using namespace imoc;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

VectorMeasure unit_atom_half(double mass = 1.0) {
  Atom a;
  a.t = 0.5;
  a.value = vec1(mass);
  a.profile = AtomProfile::constant(a.value);
  return VectorMeasure::atomic(1.0, 1, {a});
}

}  // namespace

TEST_CASE("distribution function of a unit atom") {
  VectorMeasure mu = unit_atom_half();
  CHECK(mu.distribution(0.4)(0) == doctest::Approx(0.0));
  CHECK(mu.distribution(0.5)(0) == doctest::Approx(1.0));
  CHECK(mu.distribution(0.5, true)(0) == doctest::Approx(0.0));
  CHECK(mu.distribution(1.0)(0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(mu.distribution(1.5), DomainError);

  VectorMeasure zero = VectorMeasure::zero(1.0, 1);
  CHECK(zero.distribution(0.7)(0) == doctest::Approx(0.0));

  // Knot measure with knots (0,1) and values (0,2): linear interpolation.
  Matrix vals(1, 2);
  vals << 0.0, 2.0;
  PiecewiseLinearMeasure pn(1.0, {0.0, 1.0}, vals);
  CHECK(pn.distribution(0.25)(0) == doctest::Approx(0.5));
}

TEST_CASE("total variation is the l1 coordinate sum") {
  Atom a1, a2;
  a1.t = 0.3;
  a1.value = vec1(1.0);
  a1.profile = AtomProfile::constant(a1.value);
  a2.t = 0.6;
  a2.value = vec1(2.0);
  a2.profile = AtomProfile::constant(a2.value);
  VectorMeasure mu = VectorMeasure::atomic(1.0, 1, {a1, a2});
  CHECK(mu.total_variation() == doctest::Approx(3.0));
  CHECK(mu.variation(0.5) == doctest::Approx(1.0));
  CHECK(mu.variation(0.29) == doctest::Approx(0.0));

  CHECK(VectorMeasure::zero(1.0, 1).total_variation() == doctest::Approx(0.0));

  // q = 2: atom (1,2) plus ac part reaching (0.5, 0.5) -> 4 total.
  Atom b;
  b.t = 0.5;
  b.value = vec2(1.0, 2.0);
  b.profile = AtomProfile::constant(b.value);
  Matrix ac(2, 2);
  ac << 0.0, 0.5, 0.0, 0.5;
  VectorMeasure mu2(1.0, PwLinear({0.0, 1.0}, ac), {b});
  CHECK(mu2.total_variation() == doctest::Approx(4.0));
}

TEST_CASE("validate_profile checks conditions (i) and (ii)") {
  // Constant profile satisfies both.
  CHECK(validate_profile(AtomProfile::constant(vec1(1.0)), vec1(1.0), 1.0)
            .empty());

  // psi = 2 for atom value 1 violates (ii) (and (i)).
  auto v = validate_profile(AtomProfile::constant(vec1(2.0)), vec1(1.0), 1.0);
  CHECK(!v.empty());

  // Two-piece profile (2 on [0,1/2], 0 on [1/2,1]) integrates to 1 but
  // carries the wrong l1 mass per piece.
  AtomProfile two;
  two.breakpoints = {0.0, 0.5, 1.0};
  two.values.resize(1, 2);
  two.values << 2.0, 0.0;
  auto v2 = validate_profile(two, vec1(1.0), 1.0);
  REQUIRE(!v2.empty());
  CHECK(v2[0].message.find("condition (i)") != std::string::npos);
}

TEST_CASE("approximate of the zero measure is zero") {
  VectorMeasure mu = VectorMeasure::zero(1.0, 1);
  PiecewiseLinearMeasure pn = approximate(mu, build_completion(mu), 8);
  CHECK(pn.values().cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(pn.total_variation() == doctest::Approx(0.0));
}

TEST_CASE("approximate of the unit atom merges plateau knots") {
  VectorMeasure mu = unit_atom_half();
  GraphCompletion gc = build_completion(mu);
  PiecewiseLinearMeasure pn = approximate(mu, gc, 4);
  // theta samples (0, 0.5, 0.5, 0.5, 1) merge to knots (0, 0.5, 1); the
  // merged knot carries phi at the plateau midpoint.
  REQUIRE(pn.knots().size() == 3);
  CHECK(pn.knots()[1] == doctest::Approx(0.5));
  CHECK(pn.distribution(0.5)(0) == doctest::Approx(0.5));
  CHECK(pn.total_variation() == doctest::Approx(1.0));
}

TEST_CASE("approximate converges in d3 on the single-atom measure") {
  VectorMeasure mu = unit_atom_half();
  GraphCompletion gc = build_completion(mu);
  Impulse om(mu);
  double prev = std::numeric_limits<double>::infinity();
  double last = 0.0;
  for (int k = 2; k <= 10; ++k) {
    Impulse approx(approximate(mu, gc, 1 << k));
    last = d3(approx, om);
    CHECK(last <= prev + 1e-12);
    prev = last;
  }
  CHECK(last < 1e-2);
}

TEST_CASE("total variation of approximants converges monotonically") {
  VectorMeasure mu = unit_atom_half();
  GraphCompletion gc = build_completion(mu);
  double target = mu.total_variation();
  double prev_gap = std::numeric_limits<double>::infinity();
  double gap = prev_gap;
  for (int k = 2; k <= 10; ++k) {
    PiecewiseLinearMeasure pn = approximate(mu, gc, 1 << k);
    gap = std::abs(pn.total_variation() - target);
    CHECK(gap <= prev_gap + 1e-12);
    prev_gap = gap;
  }
  CHECK(gap < 1e-3);
}

TEST_CASE("distribution L1 gap of approximants falls below 1e-3") {
  VectorMeasure mu = unit_atom_half();
  GraphCompletion gc = build_completion(mu);
  PwLinear f = mu.distribution_function();
  double prev = std::numeric_limits<double>::infinity();
  double gap = prev;
  for (int k = 2; k <= 10; ++k) {
    PiecewiseLinearMeasure pn = approximate(mu, gc, 1 << k);
    gap = integral_norm_diff(pn.distribution_function(), f);
    CHECK(gap <= prev + 1e-12);
    prev = gap;
  }
  CHECK(gap < 1e-3);
}

TEST_CASE("density trend holds on the two-atom measure") {
  Atom a1{0.25, vec1(0.5), AtomProfile::constant(vec1(0.5))};
  Atom a2{0.75, vec1(0.5), AtomProfile::constant(vec1(0.5))};
  VectorMeasure mu = VectorMeasure::atomic(1.0, 1, {a1, a2});
  GraphCompletion gc = build_completion(mu);
  Impulse om(mu);
  double prev = std::numeric_limits<double>::infinity();
  double last = 0.0;
  for (int k = 2; k <= 10; ++k) {
    last = d3(Impulse(approximate(mu, gc, 1 << k)), om);
    CHECK(last <= prev + 1e-12);
    prev = last;
  }
  CHECK(last < 1e-2);
}

TEST_CASE("approximate handles an atom at t = 0") {
  Atom a0{0.0, vec1(1.0), AtomProfile::constant(vec1(1.0))};
  VectorMeasure mu = VectorMeasure::atomic(1.0, 1, {a0});
  GraphCompletion gc = build_completion(mu);
  for (int n : {4, 64}) {
    PiecewiseLinearMeasure pn = approximate(mu, gc, n);
    CHECK(pn.values().col(0).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(pn.total_variation() == doctest::Approx(1.0));
    for (size_t k = 0; k + 1 < pn.knots().size(); ++k)
      CHECK(pn.knots()[k + 1] >= pn.knots()[k]);
  }
  // The mass concentrates near 0 as N grows.
  PiecewiseLinearMeasure fine = approximate(mu, gc, 1 << 9);
  CHECK(fine.variation(0.01) > 0.9);
}

TEST_CASE("atom-free measures are reproduced at matching knots") {
  // Uniform density: F(t) = 0.7 t on [0,1].
  Matrix vals(1, 2);
  vals << 0.0, 0.7;
  VectorMeasure mu = VectorMeasure::absolutely_continuous(1.0, {0.0, 1.0}, vals);
  GraphCompletion gc = build_completion(mu);
  for (int n : {4, 16}) {
    PiecewiseLinearMeasure pn = approximate(mu, gc, n);
    for (double t : pn.knots())
      CHECK((pn.distribution(t) - mu.distribution(t)).norm() ==
            doctest::Approx(0.0));
    // Affine distribution: exact everywhere, d3 = 0.
    CHECK(d3(Impulse(pn), Impulse(mu)) == doctest::Approx(0.0));
  }
}

TEST_CASE("distribution function is monotone and right-continuous") {
  Atom a;
  a.t = 0.25;
  a.value = vec2(0.5, 1.0);
  a.profile = AtomProfile::constant(a.value);
  Matrix ac(2, 3);
  ac << 0.0, 0.2, 0.6, 0.0, 0.1, 0.1;
  VectorMeasure mu(1.0, PwLinear({0.0, 0.4, 1.0}, ac), {a});
  PwLinear f = mu.distribution_function();
  for (int k = 0; k + 1 < f.points(); ++k) {
    Vector inc = f.values().col(k + 1) - f.values().col(k);
    CHECK(inc.minCoeff() >= -1e-12);
  }
  CHECK((f(0.25) - mu.distribution(0.25)).norm() == doctest::Approx(0.0));
  CHECK((f.left_limit(0.25) - mu.distribution(0.25, true)).norm() ==
        doctest::Approx(0.0));
  // Jump size equals the atom value.
  CHECK((f(0.25) - f.left_limit(0.25) - a.value).norm() ==
        doctest::Approx(0.0));
}

TEST_CASE("measure constructor rejects malformed input") {
  CHECK_THROWS_AS(VectorMeasure::atomic(1.0, 1,
                                        {Atom{1.5, vec1(1.0),
                                              AtomProfile::constant(vec1(1.0))}}),
                  DomainError);
  Atom neg{0.5, vec1(-1.0), AtomProfile::constant(vec1(-1.0))};
  CHECK_THROWS_AS(VectorMeasure::atomic(1.0, 1, {neg}), DomainError);
  Matrix dec(1, 2);
  dec << 0.0, -0.5;
  CHECK_THROWS_AS(
      VectorMeasure::absolutely_continuous(1.0, {0.0, 1.0}, dec),
      DomainError);
}
