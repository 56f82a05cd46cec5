#include "imoc/config.hpp"

#include <json.hpp>

#include <fstream>

namespace imoc {

using nlohmann::json;

namespace {

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Vector to_vector(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError(key + " must be an array");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Matrix to_matrix(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty())
    throw ConfigError(key + " must be a nonempty array of rows");
  size_t rows = j.size(), cols = j[0].size();
  Matrix m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw ConfigError(key + " rows have ragged sizes");
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

ConvexSet parse_set(const json& j, const std::string& key) {
  std::string kind = j.value("kind", "");
  if (kind == "box")
    return ConvexSet::box(to_vector(j.at("lower"), key + ".lower"),
                          to_vector(j.at("upper"), key + ".upper"));
  if (kind == "ball")
    return ConvexSet::ball(to_vector(j.at("center"), key + ".center"),
                           j.at("radius").get<double>());
  throw ConfigError(key + ".kind must be \"box\" or \"ball\"");
}

ProblemSpec parse_problem(const json& j) {
  ProblemSpec spec;
  const json& dims = j.at("dims");
  spec.state_dim = dims.at("state").get<int>();
  spec.control_dim = dims.value("control", 0);
  spec.measure_dim = dims.at("measure").get<int>();
  spec.horizon = j.at("horizon").get<double>();

  std::string family = j.at("family").get<std::string>();
  if (family != "linear")
    throw ConfigError("family must be \"linear\" (got \"" + family + "\")");
  const json& fp = j.at("family_params");
  spec.dynamics.A = fp.contains("A")
                        ? to_matrix(fp.at("A"), "family_params.A")
                        : Matrix::Zero(spec.state_dim, spec.state_dim);
  spec.dynamics.c = fp.contains("c") ? to_vector(fp.at("c"), "family_params.c")
                                     : Vector::Zero(spec.state_dim);
  spec.dynamics.B = fp.contains("B")
                        ? to_matrix(fp.at("B"), "family_params.B")
                        : Matrix::Zero(spec.state_dim, spec.control_dim);
  const json& jump = fp.at("jump");
  std::string jk = jump.value("kind", "constant");
  if (jk == "constant") {
    spec.dynamics.jump.kind = JumpField::Kind::constant;
    spec.dynamics.jump.G = to_matrix(jump.at("G"), "jump.G");
  } else if (jk == "diag_affine") {
    spec.dynamics.jump.kind = JumpField::Kind::diag_affine;
    spec.dynamics.jump.D = to_matrix(jump.at("D"), "jump.D");
    spec.dynamics.jump.E = to_matrix(jump.at("E"), "jump.E");
  } else {
    throw ConfigError("jump.kind must be \"constant\" or \"diag_affine\"");
  }

  const json& cost = j.at("cost");
  std::string ck = cost.value("kind", "quadratic_endpoint");
  if (ck != "quadratic_endpoint")
    throw ConfigError("cost.kind must be \"quadratic_endpoint\"");
  spec.cost.w1 = cost.value("weight", 1.0);
  spec.cost.target1 = cost.contains("target")
                          ? to_vector(cost.at("target"), "cost.target")
                          : Vector::Zero(spec.state_dim);
  spec.cost.w0 = cost.value("weight0", 0.0);
  spec.cost.target0 = cost.contains("target0")
                          ? to_vector(cost.at("target0"), "cost.target0")
                          : Vector::Zero(spec.state_dim);

  spec.initial_set = parse_set(j.at("initial_set"), "initial_set");
  if (spec.control_dim > 0)
    spec.control_set = parse_set(j.at("control_set"), "control_set");
  else
    spec.control_set = ConvexSet::empty();
  spec.beta_max = j.at("beta_max").get<double>();
  spec.omega = j.at("omega").get<double>();
  spec.state_bound = j.at("state_bound").get<double>();
  return spec;
}

VectorMeasure parse_measure(const json& j, const ProblemSpec& spec) {
  const int q = spec.measure_dim;
  PwLinear ac = PwLinear::constant(0.0, spec.horizon, Vector::Zero(q));
  if (j.contains("ac_knots") && !j.at("ac_knots").empty()) {
    const json& kk = j.at("ac_knots");
    std::vector<double> ts;
    Matrix vals(q, kk.size());
    for (size_t i = 0; i < kk.size(); ++i) {
      ts.push_back(kk[i].at(0).get<double>());
      vals.col(i) = to_vector(kk[i].at(1), "ac_knots value");
    }
    ac = PwLinear(std::move(ts), std::move(vals));
  }
  std::vector<Atom> atoms;
  for (const auto& ja : j.value("atoms", json::array())) {
    Atom a;
    a.t = ja.at("t").get<double>();
    a.value = to_vector(ja.at("value"), "atom value");
    if (ja.contains("profile_breakpoints")) {
      for (const auto& b : ja.at("profile_breakpoints"))
        a.profile.breakpoints.push_back(b.get<double>());
      a.profile.values = to_matrix(ja.at("profile_values"), "profile_values")
                             .transpose();  // rows q x pieces given as pieces x q
    } else {
      a.profile = AtomProfile::constant(a.value);
    }
    atoms.push_back(std::move(a));
  }
  return VectorMeasure(spec.horizon, std::move(ac), std::move(atoms));
}

DecisionPoint parse_eta(const json& j, const ProblemSpec& spec) {
  Vector xi0 = to_vector(j.at("xi0"), "eta.xi0");
  PwConstant ctrl;
  if (spec.control_dim > 0) {
    if (!j.contains("control"))
      throw ConfigError("eta.control required when control dimension > 0");
    const json& jc = j.at("control");
    std::vector<double> bps;
    for (const auto& b : jc.at("breakpoints")) bps.push_back(b.get<double>());
    Matrix vals =
        to_matrix(jc.at("values"), "eta.control.values").transpose();
    ctrl = PwConstant(std::move(bps), std::move(vals));
    for (int k = 0; k < ctrl.cells(); ++k)
      if (!spec.control_set.contains(ctrl.cell_values().col(k), 1e-9))
        throw ConfigError("eta.control.values[" + std::to_string(k) +
                          "] lies outside the control set");
  }
  return DecisionPoint{std::move(xi0), std::move(ctrl),
                       Impulse(parse_measure(j.at("impulse"), spec))};
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path,
                      std::vector<Violation>& violations) {
  json j = load_json(path);
  RunConfig cfg;
  try {
    cfg.problem = parse_problem(j.at("problem"));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": problem: " + e.what());
  }
  violations = validate(cfg.problem);

  if (j.contains("study")) {
    const json& js = j.at("study");
    for (const auto& k : js.value("levels", json::array()))
      cfg.level_exps.push_back(k.get<int>());
    cfg.solve.seed = js.value("seed", std::uint64_t{1});
    cfg.solve.grad_tol = js.value("grad_tol", cfg.solve.grad_tol);
    cfg.solve.constraint_tol =
        js.value("constraint_tol", cfg.solve.constraint_tol);
    cfg.solve.gamma_restarts =
        js.value("gamma_restarts", cfg.solve.gamma_restarts);
    if (cfg.level_exps.size() < 2)
      violations.push_back({"study.levels", "need at least two levels"});
    for (size_t i = 1; i < cfg.level_exps.size(); ++i)
      if (cfg.level_exps[i] <= cfg.level_exps[i - 1])
        violations.push_back({"study.levels", "levels must be ascending"});
  }
  cfg.simulate_tol = j.value("simulate_tol", 1e-8);
  if (cfg.simulate_tol <= 0.0)
    violations.push_back({"simulate_tol", "tolerances must be positive"});

  if (j.contains("reference_eta")) {
    try {
      cfg.reference_eta = parse_eta(j.at("reference_eta"), cfg.problem);
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ": reference_eta: " + e.what());
    }
  }
  if (j.contains("known_solution")) {
    const json& jk = j.at("known_solution");
    try {
      KnownSolution ks{parse_eta(jk.at("eta"), cfg.problem),
                       jk.at("optimal_value").get<double>()};
      cfg.known_solution = std::move(ks);
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ": known_solution: " + e.what());
    }
  }
  if (j.contains("checks")) {
    const json& jc = j.at("checks");
    cfg.checks.final_objective_gap =
        jc.value("final_objective_gap", cfg.checks.final_objective_gap);
    cfg.checks.gamma_at_minimizer =
        jc.value("gamma_at_minimizer", cfg.checks.gamma_at_minimizer);
    cfg.checks.slope_lo = jc.value("slope_lo", cfg.checks.slope_lo);
    cfg.checks.slope_hi = jc.value("slope_hi", cfg.checks.slope_hi);
    cfg.checks.hausdorff_final =
        jc.value("hausdorff_final", cfg.checks.hausdorff_final);
    cfg.checks.enabled = jc.value("enabled", true);
  }
  cfg.out_dir = j.value("out_dir", std::string("out"));
  return cfg;
}

DecisionPoint load_eta(const std::filesystem::path& path,
                       const ProblemSpec& spec) {
  json j = load_json(path);
  try {
    return parse_eta(j, spec);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void save_eta(const std::filesystem::path& path, const DecisionPoint& eta) {
  json j;
  j["xi0"] = std::vector<double>(eta.xi0.data(), eta.xi0.data() + eta.xi0.size());
  if (eta.control.dim() > 0) {
    j["control"]["breakpoints"] = eta.control.breakpoints();
    json rows = json::array();
    for (int k = 0; k < eta.control.cells(); ++k) {
      json row = json::array();
      for (int r = 0; r < eta.control.dim(); ++r)
        row.push_back(eta.control.cell_values()(r, k));
      rows.push_back(std::move(row));
    }
    j["control"]["values"] = std::move(rows);
  }
  json imp;
  const VectorMeasure* vm = eta.impulse.as_measure();
  VectorMeasure converted = [&] {
    if (vm) return *vm;
    // Knot measures round-trip through their distribution knots.
    const PiecewiseLinearMeasure& pn = *eta.impulse.as_pn();
    return VectorMeasure::absolutely_continuous(
        pn.horizon(), pn.knots(), pn.values());
  }();
  json knots = json::array();
  const PwLinear& ac = converted.ac_distribution();
  for (int k = 0; k < ac.points(); ++k) {
    json b = json::array();
    for (int r = 0; r < ac.dim(); ++r) b.push_back(ac.values()(r, k));
    knots.push_back(json::array({ac.breakpoints()[k], std::move(b)}));
  }
  imp["ac_knots"] = std::move(knots);
  json atoms = json::array();
  for (const auto& a : converted.atoms()) {
    json ja;
    ja["t"] = a.t;
    ja["value"] =
        std::vector<double>(a.value.data(), a.value.data() + a.value.size());
    ja["profile_breakpoints"] = a.profile.breakpoints;
    json rows = json::array();
    for (int p = 0; p < a.profile.pieces(); ++p) {
      json row = json::array();
      for (int r = 0; r < a.profile.values.rows(); ++r)
        row.push_back(a.profile.values(r, p));
      rows.push_back(std::move(row));
    }
    ja["profile_values"] = std::move(rows);
    atoms.push_back(std::move(ja));
  }
  imp["atoms"] = std::move(atoms);
  j["impulse"] = std::move(imp);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace imoc
