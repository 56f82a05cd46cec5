#pragma once

#include "imoc/completion.hpp"
#include "imoc/problem.hpp"

#include <memory>

namespace imoc {

/// Piecewise-constant atom profile psi : [0,1] -> K prescribing how a jump
/// unfolds inside its auxiliary arc.
struct AtomProfile {
  std::vector<double> breakpoints;  // 0 = s_0 < ... < s_M = 1
  Matrix values;                    // q x M, columns in K

  static AtomProfile constant(const Vector& value);
  int pieces() const { return static_cast<int>(values.cols()); }
  Vector at(double sigma) const;
  /// Exact integral over [0,1] (piecewise-constant quadrature).
  Vector integral() const;
};

/// Conditions (i) and (ii): every piece carries l1 mass equal to the atom's
/// variation, and the profile integrates to the atom value.
std::vector<Violation> validate_profile(const AtomProfile& profile,
                                        const Vector& atom_value,
                                        double atom_variation,
                                        double tol = 1e-10);

struct Atom {
  double t = 0.0;
  Vector value;         // mu({t}) in K \ {0}
  AtomProfile profile;  // psi_t
};

/// Vector Borel measure on [0,T] with range in K = R_+^q: an absolutely
/// continuous part given by its piecewise-linear distribution function plus
/// finitely many atoms with attached profiles.
class VectorMeasure {
 public:
  VectorMeasure() = default;
  VectorMeasure(double horizon, PwLinear ac_distribution,
                std::vector<Atom> atoms);

  static VectorMeasure zero(double horizon, int q);
  /// Absolutely continuous measure from distribution knots (t_k, b_k).
  static VectorMeasure absolutely_continuous(double horizon,
                                             std::vector<double> knots,
                                             Matrix values);
  /// Purely atomic measure with constant profiles.
  static VectorMeasure atomic(double horizon, int q, std::vector<Atom> atoms);

  double horizon() const { return horizon_; }
  int dim() const { return ac_.dim(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const PwLinear& ac_distribution() const { return ac_; }

  /// F(t; mu) = mu([0,t]); right-continuous, F(0-) = 0.
  Vector distribution(double t, bool left_limit = false) const;
  /// |mu|([0,t]) under the l1-across-coordinates convention.
  double variation(double t, bool left_limit = false) const;
  double total_variation() const { return variation(horizon_); }

  /// Full distribution as a piecewise-linear function with jump
  /// breakpoints at the atoms.
  PwLinear distribution_function() const;

 private:
  double horizon_ = 0.0;
  PwLinear ac_;  // q x knots, value 0 at t=0, nondecreasing
  std::vector<Atom> atoms_;
};

/// Atom-free member of the finite-dimensional family: knots
/// 0 = t_0 <= ... <= t_N = T (zero-width cells are the concentration
/// limit) with cumulative values b_k in K. Its graph completion is the
/// uniform-grid interpolant of the knots unless one was attached by the
/// construction that produced it.
class PiecewiseLinearMeasure {
 public:
  PiecewiseLinearMeasure() = default;
  PiecewiseLinearMeasure(double horizon, std::vector<double> knots,
                         Matrix values,
                         std::shared_ptr<const GraphCompletion> attached = {});

  double horizon() const { return horizon_; }
  int dim() const { return static_cast<int>(values_.rows()); }
  int cells() const { return static_cast<int>(knots_.size()) - 1; }
  const std::vector<double>& knots() const { return knots_; }
  const Matrix& values() const { return values_; }
  std::shared_ptr<const GraphCompletion> attached_completion() const {
    return attached_;
  }

  Vector distribution(double t, bool left_limit = false) const;
  double variation(double t, bool left_limit = false) const;
  double total_variation() const { return variation(horizon_); }
  PwLinear distribution_function() const;

  /// The uniform-grid completion through the knots (N cells of width 1/N
  /// in s); plateaus appear wherever a cell has zero width.
  GraphCompletion own_completion() const;
  /// Attached completion if present, else own_completion().
  GraphCompletion completion() const;

 private:
  double horizon_ = 0.0;
  std::vector<double> knots_;
  Matrix values_;  // q x (cells+1)
  std::shared_ptr<const GraphCompletion> attached_;
};

/// Samples the graph completion of mu on the uniform N-grid: the result's
/// distribution knots are the distinct theta samples (a repeated run keeps
/// the phi value at the run's s-midpoint) and the sampled interpolant pair
/// is attached as the result's completion.
PiecewiseLinearMeasure approximate(const VectorMeasure& mu,
                                   const GraphCompletion& gc, int n_cells);

}  // namespace imoc
