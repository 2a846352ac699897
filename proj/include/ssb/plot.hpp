#pragma once

#include <string>
#include <vector>

namespace ssb {

// Deterministic SVG emission from result CSVs. Kinds:
//   trajectory  - op_modulus vs t line plot from a trajectory CSV
//   collapse    - log-log t vs eps*N scatter with a least-squares line,
//                 from collapse_times.csv (gamma = 0.5 rows)
//   limit-scan  - op_modulus heat map over (N, B) from equilibrium_scan.csv
// Empty series produce an axes-only plot.
void emit_plot(const std::vector<std::string>& input_files,
               const std::string& kind, const std::string& output_svg);

// Minimal CSV reader for the plot inputs (header + numeric rows).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

}  // namespace ssb
