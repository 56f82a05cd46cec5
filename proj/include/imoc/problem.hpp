#pragma once

#include "imoc/types.hpp"

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace imoc {

/// Closed convex set with closed-form Euclidean projection (box or ball).
class ConvexSet {
 public:
  struct Box {
    Vector lower, upper;
  };
  struct Ball {
    Vector center;
    double radius = 0.0;
  };

  ConvexSet() = default;
  static ConvexSet box(Vector lower, Vector upper);
  static ConvexSet ball(Vector center, double radius);
  /// Zero-dimensional set (m = 0 problems carry no control set).
  static ConvexSet empty();

  int dim() const;
  Vector project(const Vector& p) const;
  bool contains(const Vector& p, double tol = 1e-10) const;
  /// A point guaranteed to lie in the set.
  Vector center() const;
  /// Uniform-ish sample from the set.
  Vector sample(std::mt19937_64& rng) const;
  /// Points whose norm bounds the set's norm: box corners (capped at 64,
  /// randomized beyond that) or ball boundary reach.
  double max_norm() const;

  bool is_box() const { return std::holds_alternative<Box>(rep_); }
  const Box* as_box() const { return std::get_if<Box>(&rep_); }
  const Ball* as_ball() const { return std::get_if<Ball>(&rep_); }

 private:
  std::variant<std::monostate, Box, Ball> rep_;
};

/// Jump field g : R^n -> R^{n x q}; either a constant matrix or the
/// diagonal-affine family g_j(x)_i = D(i,j) x_i + E(i,j).
struct JumpField {
  enum class Kind { constant, diag_affine } kind = Kind::constant;
  Matrix G;  // constant: n x q
  Matrix D, E;  // diag_affine: n x q each

  Matrix eval(const Vector& x) const;
  /// d(g(x) w)/dx for a fixed weight w in R^q.
  Matrix apply_jacobian(const Vector& x, const Vector& w) const;
};

/// Drift + control-matrix dynamics, f(x,u) = f_a(x) + F_b(x) u with
/// f_a = A x + c and F_b = B constant, so f is exactly linear in u.
struct Dynamics {
  Matrix A;  // n x n
  Vector c;  // n
  Matrix B;  // n x m (m may be 0)
  JumpField jump;

  Vector drift(const Vector& x) const { return A * x + c; }
  const Matrix& drift_jacobian() const { return A; }
  Vector eval(const Vector& x, const Vector& u) const;
};

/// Endpoint cost f0(x0, x1) = w0 |x0 - t0|^2 + w1 |x1 - t1|^2 + <a0,x0> + <a1,x1>.
struct Cost {
  double w0 = 0.0, w1 = 1.0;
  Vector target0, target1;
  Vector a0, a1;

  double value(const Vector& x0, const Vector& x1) const;
  /// Gradient split as (d/dx0, d/dx1).
  std::pair<Vector, Vector> gradient(const Vector& x0, const Vector& x1) const;
  Cost scaled(double factor) const;
};

struct ProblemSpec {
  int state_dim = 0;    // n
  int control_dim = 0;  // m (may be 0)
  int measure_dim = 0;  // q
  double horizon = 1.0; // T
  Dynamics dynamics;
  Cost cost;
  ConvexSet initial_set;  // C, in R^n
  ConvexSet control_set;  // Ubar, in R^m
  double beta_max = 1.0;
  double omega = 0.5;
  double state_bound = 1.0;  // L
};

/// Lipschitz and linear-growth constants of the fields. b and r belong to a
/// completion and are filled in per decision point.
struct RegularityConstants {
  double k_prime = 1.0;   // K'
  double k_dprime = 1.0;  // K''
  double k1 = 1.0;
  double b = 0.0;
  double r = 0.0;

  double beta() const { return k1 * (b + r); }
  RegularityConstants with_completion(double lip_theta, double lip_phi) const {
    RegularityConstants out = *this;
    out.b = lip_theta;
    out.r = lip_phi;
    return out;
  }
};

struct Violation {
  std::string key;
  std::string message;
};

Vector eval_dynamics(const ProblemSpec& spec, const Vector& x, const Vector& u);

/// Sampled difference-quotient estimates of K', K'', K1 over the box
/// |x| <= L+1 and u in the control set, inflated by 1.5 and clamped at 1.
RegularityConstants estimate_constants(const ProblemSpec& spec,
                                       int sample_count, std::uint64_t seed);

/// Analytic constants for the builtin families (no sampling, no inflation).
RegularityConstants analytic_constants(const ProblemSpec& spec);

std::vector<Violation> validate(const ProblemSpec& spec);

}  // namespace imoc
