#pragma once

#include "imoc/types.hpp"

namespace imoc {

/// Piecewise-linear R^d-valued function on [front, back].
///
/// Breakpoints are nondecreasing; a repeated breakpoint encodes a jump
/// discontinuity (left column, then right column). Evaluation is
/// right-continuous, with a separate left-limit accessor. Distribution
/// functions of measures with atoms, graph completions and 𝒫_N knot
/// interpolants all live in this one representation.
class PwLinear {
 public:
  PwLinear() = default;
  PwLinear(std::vector<double> xs, Matrix ys);

  static PwLinear constant(double x0, double x1, const Vector& v);
  /// Single affine segment from (x0, y0) to (x1, y1).
  static PwLinear segment(double x0, const Vector& y0, double x1,
                          const Vector& y1);

  int dim() const { return static_cast<int>(ys_.rows()); }
  int points() const { return static_cast<int>(xs_.size()); }
  int cells() const { return points() - 1; }
  double lo() const { return xs_.front(); }
  double hi() const { return xs_.back(); }
  const std::vector<double>& breakpoints() const { return xs_; }
  const Matrix& values() const { return ys_; }

  Vector operator()(double x) const;   // right-continuous
  Vector left_limit(double x) const;

  /// Derivative on cell k, zero for width-0 (jump) cells.
  Vector cell_slope(int k) const;
  double cell_width(int k) const { return xs_[k + 1] - xs_[k]; }

  /// Appends a row holding the running l1 length sum of the existing rows
  /// (the variation row for coordinatewise nondecreasing data).
  PwLinear with_sum_row() const;

  bool same_breakpoints(const PwLinear& other, double tol = 1e-12) const;

 private:
  std::vector<double> xs_;
  Matrix ys_;  // dim x points
};

/// Piecewise-constant R^d-valued function on [front, back]; value col k
/// holds on [xs[k], xs[k+1]), right-continuous, last cell closed.
class PwConstant {
 public:
  PwConstant() = default;
  PwConstant(std::vector<double> xs, Matrix vals);

  static PwConstant constant(double x0, double x1, const Vector& v);
  /// Uniform grid on [0,1] with the given cell values.
  static PwConstant on_uniform_grid(const Matrix& cell_values);

  int dim() const { return static_cast<int>(vals_.rows()); }
  int cells() const { return static_cast<int>(vals_.cols()); }
  double lo() const { return xs_.front(); }
  double hi() const { return xs_.back(); }
  const std::vector<double>& breakpoints() const { return xs_; }
  const Matrix& cell_values() const { return vals_; }

  Vector operator()(double x) const;

 private:
  std::vector<double> xs_;  // cells+1 entries
  Matrix vals_;             // dim x cells
};

/// Closed form of ∫_0^h |p + t q| dt (Euclidean norm of an affine path).
double integral_norm_affine(const Vector& p, const Vector& q, double h);

/// Union of the breakpoints of f and g (duplicates kept once per side).
std::vector<double> merged_breakpoints(const std::vector<double>& a,
                                       const std::vector<double>& b);

/// Exact ∫ |f - g| over the common domain (Euclidean norm integrand).
double integral_norm_diff(const PwLinear& f, const PwLinear& g);

/// Exact max |f - g| over the domain; attained at a merged breakpoint
/// (one-sided values included).
double max_norm_diff(const PwLinear& f, const PwLinear& g);

/// Exact ∫ |f' - g'| (derivatives are piecewise constant; jump cells
/// contribute nothing since they have zero width).
double integral_norm_deriv_diff(const PwLinear& f, const PwLinear& g);

/// Exact ∫ |a - b|^2 for piecewise-constant functions.
double integral_sq_diff(const PwConstant& a, const PwConstant& b);

}  // namespace imoc
