// crn: scenario generation, single-instance solving, exact oracle, figure
// experiments and scenario calibration.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "crn/bp_config.hpp"
#include "crn/experiments.hpp"
#include "crn/factor_graph.hpp"
#include "crn/greedy.hpp"
#include "crn/instance_io.hpp"
#include "crn/oracle.hpp"
#include "crn/scenario.hpp"
#include "crn/seeds.hpp"

using nlohmann::json;

namespace {

json cost_json(const crn::CostBreakdown& c) {
  return {{"total", c.total}, {"utility", c.utility_term}, {"interference", c.interference_term}};
}

void emit(const json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    crn::write_json_file(doc, path);
  }
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

// BP flags shared by `solve`; only flags the user actually set override the
// config file (or the defaults).
struct BpFlags {
  std::string config_file;
  std::optional<double> beta, damping, tol;
  std::optional<std::size_t> max_iter, d_max;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> schedule, pu_coupling, rounding_gate;
  bool no_diagonal = false, exact_one = false, unconstrained = false, negate_q = false;

  void attach(CLI::App* app) {
    app->add_option("--bp-config", config_file, "JSON file with BP settings");
    app->add_option("--beta", beta, "inverse temperature");
    app->add_option("--damping", damping, "damping factor in [0,1)");
    app->add_option("--tol", tol, "convergence tolerance");
    app->add_option("--max-iter", max_iter, "maximum sweeps");
    app->add_option("--d-max", d_max, "largest PU degree handled by the Model-A enumeration");
    app->add_option("--seed", seed, "seed for the random-sequential schedule");
    app->add_option("--schedule", schedule, "synchronous | random_sequential");
    app->add_option("--pu-coupling", pu_coupling, "product | pairwise | exact");
    app->add_option("--rounding-gate", rounding_gate, "link | activity");
    app->add_flag("--no-diagonal", no_diagonal, "keep G(i,b)^2/theta out of the effective priority");
    app->add_flag("--exact-one", exact_one, "channel factor demands exactly one user");
    app->add_flag("--unconstrained-activity", unconstrained, "drop at-most-one inside the activity sum");
    app->add_flag("--negate-q", negate_q, "negated q-field sign convention");
  }

  crn::BpConfig build() const {
    crn::BpConfig cfg;
    if (!config_file.empty()) cfg = crn::bp_config_from_json(crn::read_json_file(config_file), cfg);
    if (beta) cfg.beta = *beta;
    if (damping) cfg.damping = *damping;
    if (tol) cfg.tol = *tol;
    if (max_iter) cfg.max_iter = *max_iter;
    if (d_max) cfg.d_max = *d_max;
    if (seed) cfg.seed = *seed;
    if (schedule) cfg.schedule = crn::schedule_from_string(*schedule);
    if (pu_coupling) cfg.pu_coupling = crn::pu_coupling_from_string(*pu_coupling);
    if (rounding_gate) cfg.rounding_gate = crn::rounding_gate_from_string(*rounding_gate);
    if (no_diagonal) cfg.include_diagonal = false;
    if (exact_one) cfg.channel_constraint = crn::ChannelConstraint::exact_one;
    if (unconstrained) cfg.activity_sum = crn::ActivitySum::unconstrained;
    if (negate_q) cfg.negate_q = true;
    cfg.validate();
    return cfg;
  }
};

crn::ScenarioParams scenario_or_default(const std::string& path) {
  if (!path.empty()) return crn::scenario_from_json(crn::read_json_file(path));
  const auto preset = crn::config_dir() / "scenario.json";
  if (std::filesystem::exists(preset)) return crn::scenario_from_json(crn::read_json_file(preset));
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel assignment for cognitive radio networks by belief propagation"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "sample a network and derive a problem instance");
  std::string gen_scenario, gen_out, gen_network_out;
  std::uint64_t gen_seed = 1;
  std::size_t gen_active = 5;
  std::optional<std::size_t> gen_n_su, gen_n_pu;
  double gen_priority = 1.0;
  gen->add_option("--scenario", gen_scenario, "scenario JSON (default: calibrated config/scenario.json)");
  gen->add_option("--seed", gen_seed, "master seed; network and active set seeds are derived from it");
  gen->add_option("--n-active", gen_active, "number of active PUs");
  gen->add_option("--n-su", gen_n_su, "override number of SUs");
  gen->add_option("--n-pu", gen_n_pu, "override number of PUs");
  gen->add_option("--priority", gen_priority, "priority c for every SU");
  gen->add_option("-o,--out", gen_out, "instance file (default: stdout)");
  gen->add_option("--network-out", gen_network_out, "also write the network realization");

  // solve
  auto* solve = app.add_subcommand("solve", "solve one instance with one solver");
  std::string solve_instance, solve_out, solve_solver = "bp-full", solve_model = "A";
  bool solve_trace = false;
  BpFlags bp_flags;
  solve->add_option("instance", solve_instance, "instance file")->required();
  solve->add_option("--model", solve_model, "A | B");
  solve->add_option("--solver", solve_solver, "bp-full | bp-field | greedy | oracle");
  solve->add_flag("--trace", solve_trace, "include the greedy decision trace");
  solve->add_option("-o,--out", solve_out, "result file (default: stdout)");
  bp_flags.attach(solve);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact optimum (and optionally Boltzmann marginals)");
  std::string oracle_instance, oracle_model = "A", oracle_out;
  std::optional<double> oracle_beta;
  oracle->add_option("instance", oracle_instance, "instance file")->required();
  oracle->add_option("--model", oracle_model, "A | B");
  oracle->add_option("--marginals", oracle_beta, "also report exact marginals at this beta");
  oracle->add_option("-o,--out", oracle_out, "result file (default: stdout)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a figure preset or an experiment config");
  std::string exp_preset, exp_config, exp_csv, exp_summary;
  std::optional<std::uint64_t> exp_seed;
  std::optional<std::size_t> exp_realizations, exp_threads;
  bool exp_timing = false;
  auto* preset_opt = exp->add_option("--preset", exp_preset, "fig4 | fig5 | fig6 | fig7");
  exp->add_option("--config", exp_config, "experiment JSON")->excludes(preset_opt);
  exp->add_option("--seed", exp_seed, "override the master seed");
  exp->add_option("--realizations", exp_realizations, "override the number of realizations");
  exp->add_option("--threads", exp_threads, "worker threads (results do not depend on this)");
  exp->add_option("--csv", exp_csv, "results CSV (default: stdout)");
  exp->add_option("--summary", exp_summary, "summary CSV with means and standard errors");
  exp->add_flag("--timing", exp_timing, "add a wall_ms column");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "choose tx power, cutoff and access threshold");
  std::string cal_base, cal_out;
  crn::CalibrationTargets targets;
  cal->add_option("--scenario", cal_base, "base scenario JSON");
  cal->add_option("--access-degree", targets.access_degree, "target mean accessible channels per SU");
  cal->add_option("--interference-degree", targets.interference_degree, "target mean SUs per PU above cutoff");
  cal->add_option("--cutoff-ratio", targets.cutoff_ratio, "cutoff as a fraction of theta");
  cal->add_option("--networks", targets.networks, "networks sampled");
  cal->add_option("--seed", targets.seed, "calibration seed");
  cal->add_option("-o,--out", cal_out, "write the calibrated scenario JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto params = scenario_or_default(gen_scenario);
      if (gen_n_su) params.n_su = *gen_n_su;
      if (gen_n_pu) params.n_pu = *gen_n_pu;
      params.seed = crn::derive_seed(gen_seed, {0});
      const auto net = crn::generate_network(params);
      const auto pattern = crn::sample_active_set(params.n_pu, gen_active, crn::derive_seed(gen_seed, {0, gen_active}));
      const auto inst = crn::derive_instance(net, pattern, params, std::vector<double>(params.n_su, gen_priority));
      if (!gen_network_out.empty()) crn::write_json_file(crn::network_to_json(net), gen_network_out);
      emit(crn::instance_to_json(inst), gen_out);
    } else if (*solve) {
      const auto inst = crn::load_instance(solve_instance);
      const auto model = crn::model_from_string(solve_model);
      const auto solver = crn::solver_from_string(solve_solver);
      const auto bp = bp_flags.build();
      const auto out = crn::run_solver(solver, inst, model, bp);
      json doc{{"solver", solve_solver},
               {"model", solve_model},
               {"connected", out.assignment.connected()},
               {"feasible", crn::is_feasible(out.assignment, inst, model)},
               {"cost", cost_json(out.cost)},
               {"assignment", crn::assignment_to_json(out.assignment)}};
      if (crn::is_bp(solver)) {
        doc["iterations"] = out.iterations;
        doc["converged"] = out.converged;
        doc["bp"] = crn::bp_config_to_json(bp);
      }
      if (solve_trace && solver == crn::SolverKind::greedy) doc["trace"] = crn::trace_to_json(crn::greedy(inst, model));
      emit(doc, solve_out);
    } else if (*oracle) {
      const auto inst = crn::load_instance(oracle_instance);
      const auto model = crn::model_from_string(oracle_model);
      const auto best = crn::solve_exact(inst, model);
      json doc{{"model", oracle_model},
               {"connected", best.assignment.connected()},
               {"cost", cost_json(best.cost)},
               {"nodes", best.nodes},
               {"assignment", crn::assignment_to_json(best.assignment)}};
      if (oracle_beta) {
        const auto table = crn::boltzmann_marginals(inst, model, *oracle_beta);
        json links = json::array();
        for (std::size_t i = 0; i < inst.n_su(); ++i)
          for (std::size_t a = 0; a < inst.n_free(); ++a)
            if (inst.accessible(i, a)) links.push_back({i, a, table.link_marginals(i, a)});
        doc["boltzmann"] = {{"beta", table.beta},
                            {"log_z", table.log_z},
                            {"configurations", table.configurations},
                            {"su_marginals", table.su_marginals},
                            {"link_marginals", links}};
      }
      emit(doc, oracle_out);
    } else if (*exp) {
      if (exp_preset.empty() && exp_config.empty()) throw std::invalid_argument("experiment: give --preset or --config");
      auto cfg = exp_preset.empty() ? crn::load_experiment(exp_config) : crn::load_preset(exp_preset);
      if (exp_seed) cfg.master_seed = *exp_seed;
      if (exp_realizations) cfg.realizations = *exp_realizations;
      if (exp_threads) cfg.threads = *exp_threads;
      if (exp_timing) cfg.timing = true;
      if (!exp_csv.empty()) cfg.csv_path = exp_csv;
      if (!exp_summary.empty()) cfg.summary_path = exp_summary;
      const auto table = crn::run_experiment(cfg);
      if (cfg.csv_path.empty()) {
        std::cout << crn::results_to_csv(table);
      } else {
        crn::serialize_results(table, cfg.csv_path);
      }
      const auto summary = crn::summary_to_csv(crn::summarize(table));
      if (cfg.summary_path.empty()) {
        std::cerr << summary;
      } else {
        write_text(summary, cfg.summary_path);
      }
    } else if (*cal) {
      auto base = cal_base.empty() ? crn::ScenarioParams{} : crn::scenario_from_json(crn::read_json_file(cal_base));
      const auto result = crn::calibrate(base, targets);
      std::cerr << "mean access degree " << result.mean_access_degree << ", mean interference degree "
                << result.mean_interference_degree << ", max interference degree " << result.max_interference_degree
                << '\n';
      emit(crn::scenario_to_json(result.params), cal_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
