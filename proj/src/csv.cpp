#include "imoc/csv.hpp"

#include <cstdio>

namespace imoc {

CsvWriter::CsvWriter(const std::filesystem::path& path) {
  f_ = std::fopen(path.string().c_str(), "wb");
  if (!f_) throw ConfigError("cannot open " + path.string() + " for writing");
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(f_);
}

void CsvWriter::comment(const std::string& line) {
  std::fprintf(f_, "# %s\n", line.c_str());
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (size_t i = 0; i < columns.size(); ++i)
    std::fprintf(f_, "%s%s", i ? "," : "", columns[i].c_str());
  std::fprintf(f_, "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
  for (size_t i = 0; i < values.size(); ++i)
    std::fprintf(f_, "%s%s", i ? "," : "", format_double(values[i]).c_str());
  std::fprintf(f_, "\n");
}

void CsvWriter::blank() { std::fprintf(f_, "\n"); }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj, const std::string& meta) {
  CsvWriter w(path);
  if (!meta.empty()) w.comment(meta);
  std::vector<std::string> cols = {"s"};
  for (int i = 1; i <= traj.state_dim(); ++i)
    cols.push_back("y_" + std::to_string(i));
  w.header(cols);
  for (int k = 0; k < traj.nodes(); ++k) {
    std::vector<double> row = {traj.s[k]};
    for (int i = 0; i < traj.state_dim(); ++i) row.push_back(traj.values(i, k));
    w.row(row);
  }
}

void write_original_time_csv(const std::filesystem::path& path,
                             const OriginalTimeSolution& sol) {
  CsvWriter w(path);
  int n = static_cast<int>(sol.x.rows());
  std::vector<std::string> cols = {"t"};
  for (int i = 1; i <= n; ++i) cols.push_back("x_" + std::to_string(i));
  w.header(cols);
  for (size_t k = 0; k < sol.t.size(); ++k) {
    std::vector<double> row = {sol.t[k]};
    for (int i = 0; i < n; ++i) row.push_back(sol.x(i, k));
    w.row(row);
  }
  for (const auto& arc : sol.arcs) {
    w.blank();
    w.comment("atom arc " + std::to_string(arc.atom_index) + " at t = " +
              format_double(arc.t));
    std::vector<std::string> acols = {"tau"};
    for (int i = 1; i <= n; ++i) acols.push_back("x_" + std::to_string(i));
    w.header(acols);
    for (size_t k = 0; k < arc.tau.size(); ++k) {
      std::vector<double> row = {arc.tau[k]};
      for (int i = 0; i < n; ++i) row.push_back(arc.x(i, k));
      w.row(row);
    }
  }
}

void write_completion_csv(const std::filesystem::path& path,
                          const GraphCompletion& gc) {
  CsvWriter w(path);
  std::vector<std::string> cols = {"s", "theta"};
  for (int i = 1; i <= gc.measure_dim(); ++i)
    cols.push_back("phi_" + std::to_string(i));
  w.header(cols);
  for (int k = 0; k < gc.theta.points(); ++k) {
    std::vector<double> row = {gc.theta.breakpoints()[k],
                               gc.theta.values()(0, k)};
    for (int i = 0; i < gc.measure_dim(); ++i)
      row.push_back(gc.phi.values()(i, k));
    w.row(row);
  }
}

}  // namespace imoc
