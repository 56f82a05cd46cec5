#pragma once

#include "imoc/graph_completion.hpp"
#include "imoc/sim.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace imoc {

/// Minimal deterministic CSV writer: fixed %.17g formatting so repeated
/// runs are byte-identical.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void comment(const std::string& line);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void blank();

 private:
  FILE* f_ = nullptr;
};

std::string format_double(double v);

/// (s, y_1..y_n) of a trajectory at its nodes.
void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj,
                          const std::string& meta = "");

/// (t, x_1..x_n) plus one section per atom arc.
void write_original_time_csv(const std::filesystem::path& path,
                             const OriginalTimeSolution& sol);

/// (s, theta, phi_1..phi_q).
void write_completion_csv(const std::filesystem::path& path,
                          const GraphCompletion& gc);

}  // namespace imoc
