#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace imoc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Argument outside the domain of a measure/time map.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A dynamics/cost field produced a non-finite value.
struct InvalidField : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A trajectory and a measure disagree about the completion they share.
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Forward integration blew up; carries the offending step.
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, int step)
      : std::runtime_error(what), step(step) {}
  int step;
};

/// The reference integrator could not certify the requested tolerance.
struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform mesh on [0,1] with N a power of two.
struct Grid {
  int n = 0;

  explicit Grid(int n_cells) : n(n_cells) {
    if (n < 2 || (n & (n - 1)) != 0)
      throw DomainError("grid size must be a power of two >= 2, got " +
                        std::to_string(n_cells));
  }
  double h() const { return 1.0 / n; }
  double node(int k) const { return static_cast<double>(k) / n; }
};

inline bool nearly_equal(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace imoc
