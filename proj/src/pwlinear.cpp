#include "imoc/pwlinear.hpp"

#include <algorithm>
#include <cmath>

namespace imoc {

namespace {

// Index of the cell whose right-continuous value applies at x.
// For a repeated breakpoint the rightmost matching index wins.
int locate(const std::vector<double>& xs, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  int k = static_cast<int>(it - xs.begin()) - 1;
  return std::clamp(k, 0, static_cast<int>(xs.size()) - 2);
}

}  // namespace

PwLinear::PwLinear(std::vector<double> xs, Matrix ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() < 2) throw DomainError("PwLinear needs at least 2 points");
  if (static_cast<int>(xs_.size()) != ys_.cols())
    throw DomainError("PwLinear breakpoint/value count mismatch");
  for (size_t i = 1; i < xs_.size(); ++i)
    if (xs_[i] < xs_[i - 1] - 1e-15)
      throw DomainError("PwLinear breakpoints must be nondecreasing");
}

PwLinear PwLinear::constant(double x0, double x1, const Vector& v) {
  Matrix ys(v.size(), 2);
  ys.col(0) = v;
  ys.col(1) = v;
  return PwLinear({x0, x1}, std::move(ys));
}

PwLinear PwLinear::segment(double x0, const Vector& y0, double x1,
                           const Vector& y1) {
  Matrix ys(y0.size(), 2);
  ys.col(0) = y0;
  ys.col(1) = y1;
  return PwLinear({x0, x1}, std::move(ys));
}

Vector PwLinear::operator()(double x) const {
  if (x < lo() - 1e-12 || x > hi() + 1e-12)
    throw DomainError("PwLinear evaluation outside domain");
  x = std::clamp(x, lo(), hi());
  int k = locate(xs_, x);
  double w = xs_[k + 1] - xs_[k];
  if (w <= 0.0) return ys_.col(k + 1);
  double a = (x - xs_[k]) / w;
  return (1.0 - a) * ys_.col(k) + a * ys_.col(k + 1);
}

Vector PwLinear::left_limit(double x) const {
  if (x < lo() - 1e-12 || x > hi() + 1e-12)
    throw DomainError("PwLinear evaluation outside domain");
  x = std::clamp(x, lo(), hi());
  // Leftmost breakpoint equal to x gives the limit from below.
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
  int k = static_cast<int>(it - xs_.begin());
  if (k < points() && xs_[k] == x) return ys_.col(k);
  return (*this)(x);
}

Vector PwLinear::cell_slope(int k) const {
  double w = xs_[k + 1] - xs_[k];
  if (w <= 0.0) return Vector::Zero(dim());
  return (ys_.col(k + 1) - ys_.col(k)) / w;
}

PwLinear PwLinear::with_sum_row() const {
  Matrix out(dim() + 1, points());
  out.topRows(dim()) = ys_;
  out(dim(), 0) = 0.0;
  for (int k = 1; k < points(); ++k)
    out(dim(), k) =
        out(dim(), k - 1) + (ys_.col(k) - ys_.col(k - 1)).cwiseAbs().sum();
  return PwLinear(xs_, std::move(out));
}

bool PwLinear::same_breakpoints(const PwLinear& other, double tol) const {
  if (points() != other.points()) return false;
  for (int i = 0; i < points(); ++i)
    if (std::abs(xs_[i] - other.xs_[i]) > tol) return false;
  return true;
}

PwConstant::PwConstant(std::vector<double> xs, Matrix vals)
    : xs_(std::move(xs)), vals_(std::move(vals)) {
  if (xs_.size() < 2) throw DomainError("PwConstant needs at least 1 cell");
  if (static_cast<int>(xs_.size()) != vals_.cols() + 1)
    throw DomainError("PwConstant breakpoint/value count mismatch");
  for (size_t i = 1; i < xs_.size(); ++i)
    if (xs_[i] <= xs_[i - 1])
      throw DomainError("PwConstant breakpoints must be increasing");
}

PwConstant PwConstant::constant(double x0, double x1, const Vector& v) {
  Matrix vals(v.size(), 1);
  vals.col(0) = v;
  return PwConstant({x0, x1}, std::move(vals));
}

PwConstant PwConstant::on_uniform_grid(const Matrix& cell_values) {
  int n = static_cast<int>(cell_values.cols());
  std::vector<double> xs(n + 1);
  for (int k = 0; k <= n; ++k) xs[k] = static_cast<double>(k) / n;
  return PwConstant(std::move(xs), cell_values);
}

Vector PwConstant::operator()(double x) const {
  if (x < lo() - 1e-12 || x > hi() + 1e-12)
    throw DomainError("PwConstant evaluation outside domain");
  x = std::clamp(x, lo(), hi());
  int k = locate(xs_, x);
  return vals_.col(k);
}

double integral_norm_affine(const Vector& p, const Vector& q, double h) {
  if (h <= 0.0) return 0.0;
  const double a = q.squaredNorm();
  const double c = p.squaredNorm();
  if (a <= 1e-300) return h * std::sqrt(c);
  const double b = 2.0 * p.dot(q);
  const double sa = std::sqrt(a);
  const double u0 = b / (2.0 * a);
  const double u1 = h + u0;
  // Cauchy-Schwarz keeps the discriminant nonnegative; clamp the rounding.
  const double kk = std::max(0.0, c - b * b / (4.0 * a));
  auto prim = [&](double u) {
    double root = std::sqrt(a * u * u + kk);
    if (kk <= 1e-300) return 0.5 * sa * u * std::abs(u);
    return 0.5 * u * root + kk / (2.0 * sa) * std::asinh(sa * u / std::sqrt(kk));
  };
  return prim(u1) - prim(u0);
}

std::vector<double> merged_breakpoints(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

namespace {

void check_common_domain(const PwLinear& f, const PwLinear& g) {
  if (f.dim() != g.dim())
    throw DomainError("PwLinear dimension mismatch");
  if (!nearly_equal(f.lo(), g.lo(), 1e-9) || !nearly_equal(f.hi(), g.hi(), 1e-9))
    throw DomainError("PwLinear domain mismatch");
}

}  // namespace

double integral_norm_diff(const PwLinear& f, const PwLinear& g) {
  check_common_domain(f, g);
  auto xs = merged_breakpoints(f.breakpoints(), g.breakpoints());
  double total = 0.0;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    double w = xs[i + 1] - xs[i];
    if (w <= 0.0) continue;
    // Both functions are affine strictly inside the cell; anchor just
    // right of the left endpoint to pick the correct branch at jumps.
    Vector p0 = f(xs[i] + 0.0) - g(xs[i] + 0.0);
    Vector p1 = f.left_limit(xs[i + 1]) - g.left_limit(xs[i + 1]);
    total += integral_norm_affine(p0, (p1 - p0) / w, w);
  }
  return total;
}

double max_norm_diff(const PwLinear& f, const PwLinear& g) {
  check_common_domain(f, g);
  auto xs = merged_breakpoints(f.breakpoints(), g.breakpoints());
  double best = 0.0;
  for (double x : xs) {
    best = std::max(best, (f(x) - g(x)).norm());
    best = std::max(best, (f.left_limit(x) - g.left_limit(x)).norm());
  }
  return best;
}

double integral_norm_deriv_diff(const PwLinear& f, const PwLinear& g) {
  check_common_domain(f, g);
  auto xs = merged_breakpoints(f.breakpoints(), g.breakpoints());
  double total = 0.0;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    double w = xs[i + 1] - xs[i];
    if (w <= 0.0) continue;
    Vector df = (f.left_limit(xs[i + 1]) - f(xs[i])) / w;
    Vector dg = (g.left_limit(xs[i + 1]) - g(xs[i])) / w;
    total += w * (df - dg).norm();
  }
  return total;
}

double integral_sq_diff(const PwConstant& a, const PwConstant& b) {
  if (a.dim() != b.dim()) throw DomainError("PwConstant dimension mismatch");
  if (!nearly_equal(a.lo(), b.lo(), 1e-9) || !nearly_equal(a.hi(), b.hi(), 1e-9))
    throw DomainError("PwConstant domain mismatch");
  auto xs = merged_breakpoints(a.breakpoints(), b.breakpoints());
  double total = 0.0;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    double w = xs[i + 1] - xs[i];
    if (w <= 0.0) continue;
    double mid = 0.5 * (xs[i] + xs[i + 1]);
    total += w * (a(mid) - b(mid)).squaredNorm();
  }
  return total;
}

}  // namespace imoc
