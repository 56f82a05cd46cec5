#pragma once

#include "imoc/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace imoc {

/// Acceptance thresholds the study command enforces; every value is pinned
/// in the config (or these defaults), never calibrated after the fact.
struct StudyChecks {
  double final_objective_gap = 1e-6;      // vs known optimal value
  double interlevel_slack = 1e-9;         // d(eta_N, eta_2N) nonincreasing slack
  double gamma_at_minimizer = 1e-3;       // |gamma^{C,N}| at converged solves
  double slope_lo = -1.3, slope_hi = -0.7;  // log-log window for e_N
  double hausdorff_final = 1e-2;
  double ks_scale_rel_tol = 0.2;          // K_S proportionality under cost x10
  bool enabled = true;
};

struct RunConfig {
  ProblemSpec problem;
  std::vector<int> level_exps;
  SolveOptions solve;
  double simulate_tol = 1e-8;
  std::optional<DecisionPoint> reference_eta;  // drives error/graph reports
  std::optional<KnownSolution> known_solution;
  StudyChecks checks;
  std::string out_dir = "out";
};

/// Parses and semantically validates a config document. Parse failures
/// throw ConfigError with a location; semantic violations are returned.
RunConfig load_config(const std::filesystem::path& path,
                      std::vector<Violation>& violations);

/// Parses a decision-point document {xi0, control?, impulse}.
DecisionPoint load_eta(const std::filesystem::path& path,
                       const ProblemSpec& spec);

/// Writes a decision point back in the same document format.
void save_eta(const std::filesystem::path& path, const DecisionPoint& eta);

}  // namespace imoc
