#pragma once

#include "imoc/graph_completion.hpp"

#include <variant>

namespace imoc {

/// An impulsive control Omega together with its cached graph completion and
/// the distribution geometry the metrics need. Immutable after construction.
class Impulse {
 public:
  explicit Impulse(VectorMeasure mu);
  explicit Impulse(PiecewiseLinearMeasure pn);

  double horizon() const;
  int dim() const;
  const GraphCompletion& completion() const { return gc_; }
  /// Distribution function of the pair (mu, |mu|), a (q+1)-row function.
  const PwLinear& pair_distribution() const { return pair_dist_; }
  /// (mu, |mu|)([0,T]).
  const Vector& pair_total() const { return pair_total_; }
  /// Completion phi extended by its running variation row.
  const PwLinear& phi_extended() const { return phi_ext_; }

  const VectorMeasure* as_measure() const {
    return std::get_if<VectorMeasure>(&rep_);
  }
  const PiecewiseLinearMeasure* as_pn() const {
    return std::get_if<PiecewiseLinearMeasure>(&rep_);
  }

 private:
  void finish();
  std::variant<VectorMeasure, PiecewiseLinearMeasure> rep_;
  GraphCompletion gc_;
  PwLinear pair_dist_;
  Vector pair_total_;
  PwLinear phi_ext_;
};

/// eta = (xi0, u, Omega): a point of the decision space B.
struct DecisionPoint {
  Vector xi0;
  PwConstant control;  // on [0,1], values in Ubar
  Impulse impulse;
};

double d1(const Vector& a, const Vector& b);
/// Squared-L2 control distance, exact via merged breakpoints. Kept as
/// printed (no square root), so it is asserted convergent, not triangular.
double d2(const PwConstant& u1, const PwConstant& u2);

struct MetricOptions {
  /// Use (phi, V) in d4's sup term; the plain-phi variant is the A/B flag.
  bool extended_phi = true;
};

double d4(const Impulse& a, const Impulse& b, const MetricOptions& opts = {});
double d5(const Impulse& a, const Impulse& b);
double d3(const Impulse& a, const Impulse& b, const MetricOptions& opts = {});

double d_full(const DecisionPoint& a, const DecisionPoint& b,
              const MetricOptions& opts = {});
double dbar(const DecisionPoint& a, const DecisionPoint& b,
            const MetricOptions& opts = {});

/// Hausdorff distance between finite point sets (columns are points).
double hausdorff(const Matrix& a, const Matrix& b);

}  // namespace imoc
