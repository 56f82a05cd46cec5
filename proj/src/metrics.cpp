#include "imoc/metrics.hpp"

#include <cmath>

namespace imoc {

Impulse::Impulse(VectorMeasure mu) : rep_(std::move(mu)) {
  const auto& m = std::get<VectorMeasure>(rep_);
  gc_ = build_completion(m);
  pair_dist_ = m.distribution_function().with_sum_row();
  finish();
}

Impulse::Impulse(PiecewiseLinearMeasure pn) : rep_(std::move(pn)) {
  const auto& m = std::get<PiecewiseLinearMeasure>(rep_);
  gc_ = m.completion();
  pair_dist_ = m.distribution_function().with_sum_row();
  finish();
}

void Impulse::finish() {
  pair_total_ = pair_dist_.values().col(pair_dist_.points() - 1);
  phi_ext_ = gc_.phi.with_sum_row();
}

double Impulse::horizon() const { return gc_.horizon; }
int Impulse::dim() const { return gc_.measure_dim(); }

double d1(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DomainError("d1 dimension mismatch");
  return (a - b).norm();
}

double d2(const PwConstant& u1, const PwConstant& u2) {
  if (u1.dim() == 0 && u2.dim() == 0) return 0.0;
  return integral_sq_diff(u1, u2);
}

namespace {

void check_compatible(const Impulse& a, const Impulse& b) {
  if (a.dim() != b.dim()) throw DomainError("impulse dimension mismatch");
  if (!nearly_equal(a.horizon(), b.horizon(), 1e-9))
    throw DomainError("impulse horizon mismatch");
}

}  // namespace

double d4(const Impulse& a, const Impulse& b, const MetricOptions& opts) {
  check_compatible(a, b);
  double total_term = (a.pair_total() - b.pair_total()).norm();
  double dist_term = integral_norm_diff(a.pair_distribution(),
                                        b.pair_distribution());
  double sup_term = opts.extended_phi
                        ? max_norm_diff(a.phi_extended(), b.phi_extended())
                        : max_norm_diff(a.completion().phi, b.completion().phi);
  return total_term + dist_term + sup_term;
}

double d5(const Impulse& a, const Impulse& b) {
  check_compatible(a, b);
  return integral_norm_deriv_diff(a.completion().theta, b.completion().theta) +
         integral_norm_deriv_diff(a.completion().phi, b.completion().phi);
}

double d3(const Impulse& a, const Impulse& b, const MetricOptions& opts) {
  return d4(a, b, opts) + d5(a, b);
}

double d_full(const DecisionPoint& a, const DecisionPoint& b,
              const MetricOptions& opts) {
  return d1(a.xi0, b.xi0) + d2(a.control, b.control) +
         d3(a.impulse, b.impulse, opts);
}

double dbar(const DecisionPoint& a, const DecisionPoint& b,
            const MetricOptions& opts) {
  return d1(a.xi0, b.xi0) + d2(a.control, b.control) +
         d4(a.impulse, b.impulse, opts);
}

namespace {

double directed_hausdorff(const Matrix& a, const Matrix& b) {
  double worst_sq = 0.0;
  for (int i = 0; i < a.cols(); ++i) {
    double best_sq = std::numeric_limits<double>::infinity();
    for (int j = 0; j < b.cols(); ++j) {
      double d = (a.col(i) - b.col(j)).squaredNorm();
      if (d < best_sq) {
        best_sq = d;
        if (best_sq <= worst_sq) break;  // cannot raise the max
      }
    }
    if (best_sq > worst_sq) worst_sq = best_sq;
  }
  return std::sqrt(worst_sq);
}

}  // namespace

double hausdorff(const Matrix& a, const Matrix& b) {
  if (a.cols() == 0 || b.cols() == 0)
    throw DomainError("hausdorff needs nonempty point sets");
  if (a.rows() != b.rows()) throw DomainError("hausdorff dimension mismatch");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace imoc
