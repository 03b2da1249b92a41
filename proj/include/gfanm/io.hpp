#pragma once

// Text formats shared by the CLI and the tests.
//
// Matrix tables: one matrix row per line, columns interleaved as
// "re_0 im_0 re_1 im_1 ...", preceded by a "# rows R cols C" header line.
// Signals are n×1 matrix tables (two columns). Values are written with 17
// significant digits so tables round-trip exactly.
//
// Result tables are comma-separated with one header row; numbers carry 12
// significant digits.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfanm/cfdecomp.hpp"
#include "gfanm/experiments.hpp"

namespace gfanm::io {

using json = nlohmann::json;

std::string format_number(double value);  // 12 significant digits

void write_matrix_table(std::ostream& out, const CMatrix& m);
CMatrix read_matrix_table(std::istream& in);
void save_matrix(const std::filesystem::path& path, const CMatrix& m);
CMatrix load_matrix(const std::filesystem::path& path);
CVector load_signal(const std::filesystem::path& path);

/// Filter description: {"poles": [...]}, {"preset": "g1"|"g2"}, {"delay": n}
/// or {"a_file": ..., "b_file": ...} for a custom raw pair, plus an optional
/// "epsilon". Relative file names resolve against `base_dir`.
struct FilterDesign {
  std::vector<PoleSpec> poles;
  std::filesystem::path a_file;
  std::filesystem::path b_file;
  double epsilon = 1e-3;

  GFilter build() const;
};

FilterDesign parse_filter_design(const json& j, const std::filesystem::path& base_dir = {});
FilterDesign load_filter_design(const std::filesystem::path& path);
/// Design record with the derived quantities (size, transient length, residual).
json filter_design_json(const FilterDesign& design, const GFilter& f);

std::vector<PoleSpec> parse_poles(const json& j);
json poles_json(const std::vector<PoleSpec>& poles);

json spectrum_json(const LineSpectrum& s);
json solution_json(const SdpSolution& s);
SolverOptions parse_solver_options(const json& j, SolverOptions base = {});

/// Scenario file {"scenarios": [...]}; with `reduced`, each scenario's
/// optional "reduced" block overrides its grids and trial count.
std::vector<ScenarioConfig> parse_scenarios(const json& j, bool reduced);
std::vector<ScenarioConfig> load_scenarios(const std::filesystem::path& path, bool reduced);
json scenario_json(const ScenarioConfig& cfg);

void write_recovery_table(std::ostream& out, const std::vector<ScenarioResult>& results);
void write_error_table(std::ostream& out, const std::vector<ScenarioResult>& results);
void write_error_stats_table(std::ostream& out, const std::vector<ScenarioResult>& results);
void write_comparison_table(std::ostream& out, const std::vector<ScenarioResult>& results);
void write_trials_table(std::ostream& out, const std::vector<ScenarioResult>& results);

/// Writes recovery.csv, errors.csv, error_stats.csv, comparison.csv,
/// trials.csv and metadata.json into `dir`.
void write_experiment_outputs(const std::filesystem::path& dir,
                              const std::vector<ScenarioResult>& results);

}  // namespace gfanm::io
