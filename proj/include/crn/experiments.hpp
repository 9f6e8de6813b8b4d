#pragma once

// Monte Carlo harness: realizations × active-PU counts × solvers × β, with
// every random draw seeded from (master seed, realization, n_active) so the
// output does not depend on thread count or scheduling.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crn/bp_config.hpp"
#include "crn/model.hpp"
#include "crn/scenario.hpp"

namespace crn {

enum class ExperimentKind { sweep_active_a, beta_sweep_a, sweep_active_b, beta_sweep_b, custom };
enum class SolverKind { bp_full, bp_field, greedy, oracle };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);
std::string to_string(SolverKind s);
SolverKind solver_from_string(const std::string& s);
bool is_bp(SolverKind s);

struct ExperimentConfig {
  std::string name = "custom";
  ExperimentKind kind = ExperimentKind::custom;
  Model model = Model::A;
  ScenarioParams scenario;
  std::vector<SolverKind> solvers{SolverKind::bp_full, SolverKind::greedy};
  std::vector<double> betas{10.0};
  std::vector<std::size_t> active_counts{5, 10, 15, 20, 25, 30, 35, 40, 45};
  std::size_t realizations = 10;
  std::uint64_t master_seed = 1;
  double priority = 1.0;  // c_i for every SU
  BpConfig bp;
  std::size_t threads = 1;
  bool timing = false;  // adds a wall_ms column; such CSVs are not reproducible
  std::string csv_path;
  std::string summary_path;

  void validate() const;
};

/// Relative "scenario_file" entries are resolved against `base_dir`.
ExperimentConfig experiment_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json experiment_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment(const std::filesystem::path& path);
/// Loads <config dir>/<name>.json (fig4, fig5, fig6, fig7).
ExperimentConfig load_preset(const std::string& name);
std::filesystem::path config_dir();

struct ResultRow {
  std::string experiment;
  Model model = Model::A;
  SolverKind solver = SolverKind::greedy;
  double beta = 0.0;  // NaN for solvers without β
  std::size_t n_active = 0;
  std::size_t realization = 0;
  std::uint64_t seed = 0;
  std::size_t connected = 0;
  CostBreakdown cost;
  std::size_t iterations = 0;
  bool converged = true;
  std::string error;
  std::optional<double> wall_ms;

  /// Field-wise; NaN fields compare equal to NaN.
  bool operator==(const ResultRow& other) const;
};

using ResultTable = std::vector<ResultRow>;

struct SolveOutcome {
  Assignment assignment;
  CostBreakdown cost;
  std::size_t iterations = 0;
  bool converged = true;
};

/// One solver on one instance; `bp` (with β already set) is ignored by greedy
/// and oracle.
SolveOutcome run_solver(SolverKind solver, const ProblemInstance& inst, Model model, const BpConfig& bp);

ResultTable run_experiment(const ExperimentConfig& cfg);
ResultTable run_sweep_active(const ExperimentConfig& cfg);
/// Requires a single active-PU count.
ResultTable run_beta_sweep(const ExperimentConfig& cfg);

std::string results_to_csv(const ResultTable& table);
ResultTable results_from_csv(const std::string& text);
void serialize_results(const ResultTable& table, const std::filesystem::path& path);
ResultTable load_results(const std::filesystem::path& path);

struct Stat {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct SummaryRow {
  SolverKind solver = SolverKind::greedy;
  double beta = 0.0;
  std::size_t n_active = 0;
  std::size_t runs = 0;    // rows without error
  std::size_t errors = 0;
  Stat connected;
  Stat cost;
  Stat utility;
  Stat interference;
  double converged_fraction = 0.0;
};

/// One row per (solver, β, n_active) in table order.
std::vector<SummaryRow> summarize(const ResultTable& table);
std::string summary_to_csv(const std::vector<SummaryRow>& summary);

}  // namespace crn
