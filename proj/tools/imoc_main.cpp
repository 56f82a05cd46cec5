#include "imoc/config.hpp"
#include "imoc/csv.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace imoc {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int cmd_validate(const std::string& config_path) {
  std::vector<Violation> violations;
  RunConfig cfg;
  try {
    cfg = load_config(config_path, violations);
  } catch (const ConfigError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  for (const auto& v : violations)
    std::cout << v.key << ": " << v.message << "\n";
  if (violations.empty()) std::cout << "ok\n";
  return violations.empty() ? 0 : 1;
}

int cmd_simulate(const std::string& config_path, const std::string& eta_path,
                 int n_cells, bool reference, double tol_override,
                 const std::string& out_override) {
  std::vector<Violation> violations;
  RunConfig cfg = load_config(config_path, violations);
  if (!violations.empty()) {
    for (const auto& v : violations)
      std::cerr << v.key << ": " << v.message << "\n";
    return 1;
  }
  DecisionPoint eta = eta_path.empty()
                          ? cfg.reference_eta.value()
                          : load_eta(eta_path, cfg.problem);
  fs::path out =
      out_override.empty() ? fs::path(cfg.out_dir) : fs::path(out_override);
  fs::create_directories(out);
  double tol = tol_override > 0.0 ? tol_override : cfg.simulate_tol;

  if (reference) {
    Trajectory y = reference_solve(cfg.problem, eta, tol);
    write_trajectory_csv(out / "trajectory_repar.csv", y,
                         "kind=reference certificate=" +
                             format_double(y.certificate.value_or(0.0)));
    const auto* vm = eta.impulse.as_measure();
    if (vm) {
      std::vector<double> grid;
      for (int i = 0; i <= 2000; ++i)
        grid.push_back(cfg.problem.horizon * i / 2000.0);
      write_original_time_csv(out / "trajectory_orig.csv",
                              push_forward(y, *vm, grid));
    }
  } else {
    DecisionPoint etaN = discretize(cfg.problem, eta, n_cells);
    Trajectory y = euler_solve(cfg.problem, etaN, n_cells);
    write_trajectory_csv(out / "trajectory_repar.csv", y, "kind=euler");
    // Euler output maps to original time through its own knots.
    Matrix lam = discrete_graph(y);
    CsvWriter w(out / "trajectory_orig.csv");
    std::vector<std::string> cols = {"t"};
    for (int i = 1; i <= cfg.problem.state_dim; ++i)
      cols.push_back("x_" + std::to_string(i));
    w.header(cols);
    for (int k = 0; k < lam.cols(); ++k) {
      std::vector<double> row;
      for (int i = 0; i < lam.rows(); ++i) row.push_back(lam(i, k));
      w.row(row);
    }
  }
  write_completion_csv(out / "completion.csv", eta.impulse.completion());
  std::cout << "wrote " << (out / "trajectory_repar.csv").string() << "\n";
  return 0;
}

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

int cmd_study(const std::string& config_path, const std::string& out_override,
              const std::string& levels_override, std::uint64_t seed_override,
              bool has_seed) {
  std::vector<Violation> violations;
  RunConfig cfg = load_config(config_path, violations);
  if (!violations.empty()) {
    for (const auto& v : violations)
      std::cerr << v.key << ": " << v.message << "\n";
    return 1;
  }
  if (!levels_override.empty()) {
    auto dots = levels_override.find("..");
    if (dots == std::string::npos) {
      std::cerr << "--levels expects K1..K2\n";
      return 2;
    }
    int k1 = std::stoi(levels_override.substr(0, dots));
    int k2 = std::stoi(levels_override.substr(dots + 2));
    cfg.level_exps.clear();
    for (int k = k1; k <= k2; ++k) cfg.level_exps.push_back(k);
  }
  if (has_seed) cfg.solve.seed = seed_override;
  if (cfg.level_exps.size() < 2) {
    std::cerr << "study.levels: need at least two levels\n";
    return 1;
  }
  fs::path out =
      out_override.empty() ? fs::path(cfg.out_dir) : fs::path(out_override);
  fs::create_directories(out);

  StudyReport rep = study(cfg.problem, cfg.level_exps, cfg.solve,
                          cfg.known_solution);
  {
    CsvWriter w(out / "levels.csv");
    w.header({"N", "objective", "gamma", "feasibility", "iterations"});
    for (const auto& lv : rep.levels)
      w.row({double(lv.N), lv.result.objective, lv.result.gamma,
             lv.result.feasibility, double(lv.result.iterations)});
  }
  for (const auto& lv : rep.levels) {
    DecisionPoint pt = lv.result.eta.to_point(cfg.problem);
    Trajectory y = euler_solve(cfg.problem, pt, lv.N);
    write_trajectory_csv(out / ("trajectory_N" + std::to_string(lv.N) + ".csv"),
                         y, "kind=euler");
  }

  std::vector<Check> checks;
  auto add_check = [&](const std::string& name, bool pass, double value,
                       double threshold) {
    checks.push_back({name, pass, value, threshold});
  };

  if (cfg.known_solution) {
    double gap = rep.levels.back().gap_to_known;
    add_check("final_objective_gap", gap < cfg.checks.final_objective_gap, gap,
              cfg.checks.final_objective_gap);
  }
  {
    bool mono = true;
    double worst = 0.0;
    for (size_t i = 0; i + 2 < rep.levels.size(); ++i) {
      double step = rep.levels[i + 1].d_to_next - rep.levels[i].d_to_next;
      worst = std::max(worst, step);
      if (step > cfg.checks.interlevel_slack) mono = false;
    }
    add_check("interlevel_distance_nonincreasing", mono, worst,
              cfg.checks.interlevel_slack);
  }
  {
    bool ok = true;
    double worst = 0.0;
    for (const auto& lv : rep.levels) {
      worst = std::max(worst, std::abs(lv.result.gamma));
      if (lv.result.converged &&
          std::abs(lv.result.gamma) > cfg.checks.gamma_at_minimizer)
        ok = false;
      if (lv.result.gamma > 1e-8) ok = false;
    }
    add_check("gamma_at_minimizers", ok, worst, cfg.checks.gamma_at_minimizer);
  }

  if (cfg.reference_eta) {
    // The decay fit needs at least four levels; extend short lists upward.
    std::vector<int> err_exps = cfg.level_exps;
    while (err_exps.size() < 4) err_exps.push_back(err_exps.back() + 1);
    ErrorBoundReport er = error_bound_report(cfg.problem, *cfg.reference_eta,
                                             err_exps);
    {
      CsvWriter w(out / "errors.csv");
      w.header({"N", "e_N", "c_N"});
      for (size_t i = 0; i < er.n_values.size(); ++i)
        w.row({double(er.n_values[i]), er.e[i], er.c[i]});
    }
    add_check("slope_e_window",
              er.exact || (er.slope_e >= cfg.checks.slope_lo &&
                           er.slope_e <= cfg.checks.slope_hi),
              er.slope_e, cfg.checks.slope_lo);
    // K_S proportionality under a x10 cost scaling.
    ProblemSpec scaled = cfg.problem;
    scaled.cost = cfg.problem.cost.scaled(10.0);
    ErrorBoundReport er10 =
        error_bound_report(scaled, *cfg.reference_eta, err_exps);
    double rel = std::abs(er10.k_s - 10.0 * er.k_s) /
                 std::max(1e-300, 10.0 * er.k_s);
    add_check("ks_scales_with_cost", rel <= cfg.checks.ks_scale_rel_tol, rel,
              cfg.checks.ks_scale_rel_tol);

    GraphConvergenceReport gr = graph_convergence_report(
        cfg.problem, *cfg.reference_eta, cfg.level_exps);
    {
      CsvWriter w(out / "hausdorff.csv");
      w.header({"N", "dist_H"});
      for (size_t i = 0; i < gr.n_values.size(); ++i)
        w.row({double(gr.n_values[i]), gr.dist[i]});
    }
    bool dec = true;
    for (size_t i = 0; i + 1 < gr.dist.size(); ++i)
      if (gr.dist[i + 1] >= gr.dist[i]) dec = false;
    add_check("hausdorff_decreasing", dec, gr.dist.back(),
              cfg.checks.hausdorff_final);
    add_check("hausdorff_final", gr.dist.back() < cfg.checks.hausdorff_final,
              gr.dist.back(), cfg.checks.hausdorff_final);
  }

  bool all_pass = true;
  for (const auto& c : checks) all_pass = all_pass && c.pass;
  json summary;
  summary["schema_version"] = 1;
  summary["seed"] = rep.seed;
  summary["gamma_subproblem_tolerance"] = rep.gamma_tolerance_declared;
  summary["checks"] = json::array();
  for (const auto& c : checks)
    summary["checks"].push_back({{"name", c.name},
                                 {"pass", c.pass},
                                 {"value", c.value},
                                 {"threshold", c.threshold}});
  summary["all_pass"] = all_pass;
  {
    std::ofstream s(out / "summary.json", std::ios::binary);
    s << summary.dump(2) << "\n";
  }
  for (const auto& c : checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
              << " value=" << format_double(c.value) << "\n";
  return (cfg.checks.enabled && !all_pass) ? 1 : 0;
}

}  // namespace
}  // namespace imoc

int main(int argc, char** argv) {
  CLI::App app{"impulsive optimal control toolkit"};
  app.require_subcommand(1);

  std::string config_path, eta_path, out_dir, levels;
  int n_cells = 64;
  bool reference = false;
  double tol = -1.0;
  std::uint64_t seed = 0;
  bool has_seed = false;

  auto* validate = app.add_subcommand("validate", "check a problem config");
  validate->add_option("--config", config_path, "config document")->required();

  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  simulate->add_option("--config", config_path, "config document")->required();
  simulate->add_option("--eta", eta_path, "decision point document");
  simulate->add_option("--n", n_cells, "Euler level (power of two)");
  simulate->add_flag("--reference", reference, "certified reference solve");
  simulate->add_option("--tol", tol, "reference tolerance");
  simulate->add_option("--out", out_dir, "output directory");

  auto* study = app.add_subcommand("study", "multi-level solve and reports");
  study->add_option("--config", config_path, "config document")->required();
  study->add_option("--out", out_dir, "output directory");
  study->add_option("--levels", levels, "K1..K2 exponent range");
  auto* seed_opt = study->add_option("--seed", seed, "study seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  has_seed = seed_opt->count() > 0;

  try {
    if (app.got_subcommand(validate)) return imoc::cmd_validate(config_path);
    if (app.got_subcommand(simulate))
      return imoc::cmd_simulate(config_path, eta_path, n_cells, reference, tol,
                                out_dir);
    if (app.got_subcommand(study))
      return imoc::cmd_study(config_path, out_dir, levels, seed, has_seed);
  } catch (const imoc::ConfigError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
