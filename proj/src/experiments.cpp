#include "crn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "crn/bp_field.hpp"
#include "crn/bp_full.hpp"
#include "crn/factor_graph.hpp"
#include "crn/greedy.hpp"
#include "crn/instance_io.hpp"
#include "crn/oracle.hpp"
#include "crn/seeds.hpp"

namespace crn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kHeader =
    "experiment,model,solver,beta,n_active,realization,seed,connected,cost_total,utility_term,"
    "interference_term,iterations,converged,error";

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::sweep_active_a: return "sweep-active-A";
    case ExperimentKind::beta_sweep_a: return "beta-sweep-A";
    case ExperimentKind::sweep_active_b: return "sweep-active-B";
    case ExperimentKind::beta_sweep_b: return "beta-sweep-B";
    case ExperimentKind::custom: return "custom";
  }
  return "custom";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::sweep_active_a, ExperimentKind::beta_sweep_a, ExperimentKind::sweep_active_b,
                 ExperimentKind::beta_sweep_b, ExperimentKind::custom})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown experiment kind: " + s);
}

std::string to_string(SolverKind s) {
  switch (s) {
    case SolverKind::bp_full: return "bp-full";
    case SolverKind::bp_field: return "bp-field";
    case SolverKind::greedy: return "greedy";
    case SolverKind::oracle: return "oracle";
  }
  return "greedy";
}

SolverKind solver_from_string(const std::string& s) {
  for (auto k : {SolverKind::bp_full, SolverKind::bp_field, SolverKind::greedy, SolverKind::oracle})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown solver: " + s);
}

bool is_bp(SolverKind s) { return s == SolverKind::bp_full || s == SolverKind::bp_field; }

void ExperimentConfig::validate() const {
  scenario.validate();
  bp.validate();
  if (solvers.empty()) throw std::invalid_argument("experiment: solver list is empty");
  if (betas.empty()) throw std::invalid_argument("experiment: beta grid is empty");
  if (active_counts.empty()) throw std::invalid_argument("experiment: active-PU grid is empty");
  if (realizations < 1) throw std::invalid_argument("experiment: realizations must be >= 1");
  if (threads < 1) throw std::invalid_argument("experiment: threads must be >= 1");
  for (double b : betas)
    if (!(b > 0.0)) throw std::invalid_argument("experiment: beta values must be > 0");
  for (auto k : active_counts)
    if (k > scenario.n_pu) throw std::invalid_argument("experiment: active count exceeds n_pu");
  const bool model_a = kind == ExperimentKind::sweep_active_a || kind == ExperimentKind::beta_sweep_a;
  const bool model_b = kind == ExperimentKind::sweep_active_b || kind == ExperimentKind::beta_sweep_b;
  if ((model_a && model != Model::A) || (model_b && model != Model::B))
    throw std::invalid_argument("experiment: kind " + to_string(kind) + " does not match model " + to_string(model));
  const bool beta_sweep = kind == ExperimentKind::beta_sweep_a || kind == ExperimentKind::beta_sweep_b;
  if (beta_sweep && active_counts.size() != 1)
    throw std::invalid_argument("experiment: a beta sweep needs exactly one active-PU count");
}

ExperimentConfig experiment_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  cfg.name = doc.value("experiment", cfg.name);
  cfg.kind = experiment_kind_from_string(doc.value("kind", to_string(cfg.kind)));
  switch (cfg.kind) {
    case ExperimentKind::sweep_active_a:
    case ExperimentKind::beta_sweep_a: cfg.model = Model::A; break;
    case ExperimentKind::sweep_active_b:
    case ExperimentKind::beta_sweep_b: cfg.model = Model::B; break;
    case ExperimentKind::custom: break;
  }
  if (doc.contains("model")) cfg.model = model_from_string(doc.at("model").get<std::string>());

  if (doc.contains("scenario_file")) {
    std::filesystem::path p = doc.at("scenario_file").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    cfg.scenario = scenario_from_json(read_json_file(p));
  }
  if (doc.contains("scenario")) cfg.scenario = scenario_from_json(doc.at("scenario"), cfg.scenario);

  if (doc.contains("solvers")) {
    cfg.solvers.clear();
    for (const auto& s : doc.at("solvers")) cfg.solvers.push_back(solver_from_string(s.get<std::string>()));
  }
  if (doc.contains("betas")) cfg.betas = doc.at("betas").get<std::vector<double>>();
  if (doc.contains("active_counts")) cfg.active_counts = doc.at("active_counts").get<std::vector<std::size_t>>();
  if (doc.contains("n_active")) cfg.active_counts = {doc.at("n_active").get<std::size_t>()};
  cfg.realizations = doc.value("realizations", cfg.realizations);
  cfg.master_seed = doc.value("master_seed", cfg.master_seed);
  cfg.priority = doc.value("priority", cfg.priority);
  if (doc.contains("bp")) cfg.bp = bp_config_from_json(doc.at("bp"), cfg.bp);
  cfg.threads = doc.value("threads", cfg.threads);
  cfg.timing = doc.value("timing", cfg.timing);
  if (doc.contains("outputs")) {
    const auto& out = doc.at("outputs");
    cfg.csv_path = out.value("csv", cfg.csv_path);
    cfg.summary_path = out.value("summary", cfg.summary_path);
  }
  cfg.validate();
  return cfg;
}

nlohmann::json experiment_to_json(const ExperimentConfig& cfg) {
  nlohmann::json solvers = nlohmann::json::array();
  for (auto s : cfg.solvers) solvers.push_back(to_string(s));
  return {{"experiment", cfg.name},
          {"kind", to_string(cfg.kind)},
          {"model", to_string(cfg.model)},
          {"scenario", scenario_to_json(cfg.scenario)},
          {"solvers", solvers},
          {"betas", cfg.betas},
          {"active_counts", cfg.active_counts},
          {"realizations", cfg.realizations},
          {"master_seed", cfg.master_seed},
          {"priority", cfg.priority},
          {"bp", bp_config_to_json(cfg.bp)},
          {"threads", cfg.threads},
          {"timing", cfg.timing},
          {"outputs", {{"csv", cfg.csv_path}, {"summary", cfg.summary_path}}}};
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return experiment_from_json(read_json_file(path), path.parent_path());
}

std::filesystem::path config_dir() {
  if (const char* env = std::getenv("CRN_CONFIG_DIR"); env && *env) return env;
  return CRN_CONFIG_DIR;
}

ExperimentConfig load_preset(const std::string& name) {
  const auto path = config_dir() / (name + ".json");
  if (!std::filesystem::exists(path)) throw std::invalid_argument("unknown preset: " + name);
  return load_experiment(path);
}

namespace {

bool same(double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; }

}  // namespace

bool ResultRow::operator==(const ResultRow& o) const {
  const bool same_wall = wall_ms.has_value() == o.wall_ms.has_value() && (!wall_ms || same(*wall_ms, *o.wall_ms));
  return experiment == o.experiment && model == o.model && solver == o.solver && same(beta, o.beta) &&
         n_active == o.n_active && realization == o.realization && seed == o.seed && connected == o.connected &&
         same(cost.total, o.cost.total) && same(cost.utility_term, o.cost.utility_term) &&
         same(cost.interference_term, o.cost.interference_term) && iterations == o.iterations &&
         converged == o.converged && error == o.error && same_wall;
}

SolveOutcome run_solver(SolverKind solver, const ProblemInstance& inst, Model model, const BpConfig& bp) {
  SolveOutcome out;
  switch (solver) {
    case SolverKind::bp_full:
    case SolverKind::bp_field: {
      const FactorGraph fg(inst);
      BpResult r;
      if (solver == SolverKind::bp_full) {
        r = iterate(fg, inst, model, bp);
      } else {
        if (model != Model::B) throw std::invalid_argument("bp-field supports Model B only");
        r = iterate_field(fg, inst, bp);
      }
      out.assignment = std::move(r.assignment);
      out.cost = r.cost;
      out.iterations = r.iterations;
      out.converged = r.converged;
      break;
    }
    case SolverKind::greedy: {
      auto t = greedy(inst, model);
      out.assignment = std::move(t.assignment);
      out.cost = t.cost;
      break;
    }
    case SolverKind::oracle: {
      auto o = solve_exact(inst, model);
      out.assignment = std::move(o.assignment);
      out.cost = o.cost;
      break;
    }
  }
  return out;
}

namespace {

std::uint64_t network_seed(const ExperimentConfig& cfg, std::size_t r) { return derive_seed(cfg.master_seed, {r}); }

std::uint64_t pattern_seed(const ExperimentConfig& cfg, std::size_t r, std::size_t n_active) {
  return derive_seed(cfg.master_seed, {r, n_active});
}

std::string sanitize(std::string s) {
  for (auto& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  return s;
}

std::vector<ResultRow> run_realization(const ExperimentConfig& cfg, std::size_t r) {
  ScenarioParams params = cfg.scenario;
  params.seed = network_seed(cfg, r);
  const auto net = generate_network(params);
  const std::vector<double> priority(params.n_su, cfg.priority);

  std::vector<ResultRow> rows;
  for (auto n_active : cfg.active_counts) {
    const auto pattern = sample_active_set(params.n_pu, n_active, pattern_seed(cfg, r, n_active));
    const auto inst = derive_instance(net, pattern, params, priority);
    for (auto solver : cfg.solvers) {
      const std::vector<double> betas = is_bp(solver) ? cfg.betas : std::vector<double>{kNaN};
      for (double beta : betas) {
        ResultRow row;
        row.experiment = cfg.name;
        row.model = cfg.model;
        row.solver = solver;
        row.beta = beta;
        row.n_active = n_active;
        row.realization = r;
        row.seed = params.seed;
        BpConfig bp = cfg.bp;
        if (is_bp(solver)) bp.beta = beta;
        bp.seed = derive_seed(cfg.master_seed, {r, n_active, 0xb9});
        const auto t0 = std::chrono::steady_clock::now();
        try {
          auto out = run_solver(solver, inst, cfg.model, bp);
          row.connected = out.assignment.connected();
          row.cost = out.cost;
          row.iterations = out.iterations;
          row.converged = out.converged;
        } catch (const std::exception& e) {
          row.cost = {kNaN, kNaN, kNaN};
          row.converged = false;
          row.error = sanitize(e.what());
        }
        if (cfg.timing)
          row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<ResultRow>> per_realization(cfg.realizations);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t r = next++; r < cfg.realizations; r = next++) {
      try {
        per_realization[r] = run_realization(cfg, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.threads, cfg.realizations);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ResultTable table;
  for (auto& rows : per_realization)
    for (auto& row : rows) table.push_back(std::move(row));

  auto solver_rank = [&](SolverKind s) {
    return static_cast<std::size_t>(std::find(cfg.solvers.begin(), cfg.solvers.end(), s) - cfg.solvers.begin());
  };
  auto beta_key = [](double b) { return std::isnan(b) ? -1.0 : b; };
  std::stable_sort(table.begin(), table.end(), [&](const ResultRow& x, const ResultRow& y) {
    const auto kx = std::make_tuple(solver_rank(x.solver), beta_key(x.beta), x.n_active, x.realization);
    const auto ky = std::make_tuple(solver_rank(y.solver), beta_key(y.beta), y.n_active, y.realization);
    return kx < ky;
  });
  return table;
}

ResultTable run_sweep_active(const ExperimentConfig& cfg) { return run_experiment(cfg); }

ResultTable run_beta_sweep(const ExperimentConfig& cfg) {
  if (cfg.active_counts.size() != 1) throw std::invalid_argument("beta sweep needs exactly one active-PU count");
  return run_experiment(cfg);
}

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) { return s.empty() ? kNaN : std::stod(s); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string results_to_csv(const ResultTable& table) {
  const bool timing = std::any_of(table.begin(), table.end(), [](const ResultRow& r) { return r.wall_ms.has_value(); });
  std::ostringstream out;
  out << kHeader << (timing ? ",wall_ms" : "") << '\n';
  for (const auto& r : table) {
    out << r.experiment << ',' << to_string(r.model) << ',' << to_string(r.solver) << ',' << fmt_double(r.beta) << ','
        << r.n_active << ',' << r.realization << ',' << r.seed << ',' << r.connected << ','
        << fmt_double(r.cost.total) << ',' << fmt_double(r.cost.utility_term) << ','
        << fmt_double(r.cost.interference_term) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
        << r.error;
    if (timing) out << ',' << (r.wall_ms ? fmt_double(*r.wall_ms) : "");
    out << '\n';
  }
  return out.str();
}

ResultTable results_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("results CSV: missing header");
  const bool timing = line == std::string(kHeader) + ",wall_ms";
  if (!timing && line != kHeader) throw std::runtime_error("results CSV: unexpected header");
  const std::size_t n_fields = timing ? 15 : 14;

  ResultTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != n_fields) throw std::runtime_error("results CSV: wrong field count in: " + line);
    ResultRow r;
    r.experiment = f[0];
    r.model = model_from_string(f[1]);
    r.solver = solver_from_string(f[2]);
    r.beta = parse_double(f[3]);
    r.n_active = std::stoul(f[4]);
    r.realization = std::stoul(f[5]);
    r.seed = std::stoull(f[6]);
    r.connected = std::stoul(f[7]);
    r.cost = {parse_double(f[9]), parse_double(f[10]), parse_double(f[8])};
    r.iterations = std::stoul(f[11]);
    r.converged = f[12] == "1";
    r.error = f[13];
    if (timing && !f[14].empty()) r.wall_ms = parse_double(f[14]);
    table.push_back(std::move(r));
  }
  return table;
}

void serialize_results(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << results_to_csv(table);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ResultTable load_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return results_from_csv(buf.str());
}

namespace {

struct Accumulator {
  double n = 0.0, sum = 0.0, sum_sq = 0.0;

  void add(double x) {
    n += 1.0;
    sum += x;
    sum_sq += x * x;
  }

  Stat stat() const {
    if (n == 0.0) return {kNaN, kNaN};
    const double mean = sum / n;
    if (n < 2.0) return {mean, 0.0};
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n)};
  }
};

}  // namespace

std::vector<SummaryRow> summarize(const ResultTable& table) {
  struct Group {
    SummaryRow row;
    Accumulator connected, cost, utility, interference;
    std::size_t converged = 0;
  };
  std::vector<Group> groups;
  std::map<std::tuple<int, double, std::size_t>, std::size_t> index;

  for (const auto& r : table) {
    const auto key = std::make_tuple(static_cast<int>(r.solver), std::isnan(r.beta) ? -1.0 : r.beta, r.n_active);
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) {
      Group g;
      g.row.solver = r.solver;
      g.row.beta = r.beta;
      g.row.n_active = r.n_active;
      groups.push_back(g);
    }
    auto& g = groups[it->second];
    if (!r.error.empty()) {
      ++g.row.errors;
      continue;
    }
    ++g.row.runs;
    g.connected.add(static_cast<double>(r.connected));
    g.cost.add(r.cost.total);
    g.utility.add(r.cost.utility_term);
    g.interference.add(r.cost.interference_term);
    if (r.converged) ++g.converged;
  }

  std::vector<SummaryRow> out;
  for (auto& g : groups) {
    g.row.connected = g.connected.stat();
    g.row.cost = g.cost.stat();
    g.row.utility = g.utility.stat();
    g.row.interference = g.interference.stat();
    g.row.converged_fraction = g.row.runs ? static_cast<double>(g.converged) / static_cast<double>(g.row.runs) : kNaN;
    out.push_back(g.row);
  }
  return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& summary) {
  std::ostringstream out;
  out << "solver,beta,n_active,runs,errors,connected_mean,connected_stderr,cost_mean,cost_stderr,utility_mean,"
         "utility_stderr,interference_mean,interference_stderr,converged_fraction\n";
  for (const auto& s : summary) {
    out << to_string(s.solver) << ',' << fmt_double(s.beta) << ',' << s.n_active << ',' << s.runs << ',' << s.errors
        << ',' << fmt_double(s.connected.mean) << ',' << fmt_double(s.connected.stderr_) << ','
        << fmt_double(s.cost.mean) << ',' << fmt_double(s.cost.stderr_) << ',' << fmt_double(s.utility.mean) << ','
        << fmt_double(s.utility.stderr_) << ',' << fmt_double(s.interference.mean) << ','
        << fmt_double(s.interference.stderr_) << ',' << fmt_double(s.converged_fraction) << '\n';
  }
  return out.str();
}

}  // namespace crn
