#include "crn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "crn/seeds.hpp"

namespace crn {

using nlohmann::json;

void ScenarioParams::validate() const {
  if (n_su == 0 || n_pu == 0) throw std::invalid_argument("scenario: n_su and n_pu must be positive");
  if (!(alpha >= 2.0)) throw std::invalid_argument("scenario: alpha must be >= 2");
  if (!(cutoff >= 0.0)) throw std::invalid_argument("scenario: cutoff must be >= 0");
  if (!(access_threshold > 0.0)) throw std::invalid_argument("scenario: access_threshold must be > 0");
  if (!(theta > 0.0)) throw std::invalid_argument("scenario: theta must be > 0");
  if (!(tx_power > 0.0)) throw std::invalid_argument("scenario: tx_power must be > 0");
  if (!(min_distance > 0.0)) throw std::invalid_argument("scenario: min_distance must be > 0");
}

json scenario_to_json(const ScenarioParams& p) {
  return json{{"n_su", p.n_su},
              {"n_pu", p.n_pu},
              {"alpha", p.alpha},
              {"cutoff", p.cutoff},
              {"access_threshold", p.access_threshold},
              {"theta", p.theta},
              {"tx_power", p.tx_power},
              {"min_distance", p.min_distance},
              {"seed", p.seed}};
}

ScenarioParams scenario_from_json(const json& doc, ScenarioParams p) {
  auto read = [&doc](const char* key, auto& field) {
    if (doc.contains(key)) field = doc.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  read("n_su", p.n_su);
  read("n_pu", p.n_pu);
  read("alpha", p.alpha);
  read("cutoff", p.cutoff);
  read("access_threshold", p.access_threshold);
  read("theta", p.theta);
  read("tx_power", p.tx_power);
  read("min_distance", p.min_distance);
  read("seed", p.seed);
  p.validate();
  return p;
}

std::size_t ActivePattern::n_active() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), std::uint8_t{1}));
}

double received_power(double gain, double distance, const ScenarioParams& p) {
  const double r = std::max(distance, p.min_distance);
  const double power = p.tx_power * gain * std::pow(r, -p.alpha);
  return power >= p.cutoff ? power : 0.0;
}

double received_power(const NetworkRealization& net, std::size_t i, std::size_t a) {
  const auto& su = net.su_positions.at(i);
  const auto& bs = net.bs_positions.at(a);
  return received_power(net.fading(i, a), std::hypot(su.x - bs.x, su.y - bs.y), net.params);
}

NetworkRealization generate_network(const ScenarioParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> fade(1.0);

  NetworkRealization net;
  net.params = params;
  net.bs_positions.resize(params.n_pu);
  for (auto& p : net.bs_positions) p = {unit(rng), unit(rng)};
  net.su_positions.resize(params.n_su);
  for (auto& p : net.su_positions) p = {unit(rng), unit(rng)};

  net.fading = Matrix<double>(params.n_su, params.n_pu);
  for (auto& g : net.fading.data()) g = fade(rng);

  net.power = Matrix<double>(params.n_su, params.n_pu);
  for (std::size_t i = 0; i < params.n_su; ++i)
    for (std::size_t a = 0; a < params.n_pu; ++a) net.power(i, a) = received_power(net, i, a);
  return net;
}

ActivePattern sample_active_set(std::size_t n_pu, std::size_t k_active, std::uint64_t seed) {
  if (k_active > n_pu) throw std::invalid_argument("sample_active_set: k_active exceeds n_pu");
  std::vector<std::size_t> ids(n_pu);
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first k slots form a uniform k-subset.
  for (std::size_t t = 0; t < k_active; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, n_pu - 1);
    std::swap(ids[t], ids[pick(rng)]);
  }
  ActivePattern pattern;
  pattern.active.assign(n_pu, 0);
  for (std::size_t t = 0; t < k_active; ++t) pattern.active[ids[t]] = 1;
  return pattern;
}

ProblemInstance derive_instance(const NetworkRealization& net, const ActivePattern& pattern,
                                const ScenarioParams& params, std::optional<std::vector<double>> priority) {
  if (pattern.n_pu() != net.bs_positions.size())
    throw std::invalid_argument("derive_instance: pattern length differs from base-station count");
  const std::size_t n_su = net.su_positions.size();

  std::vector<std::size_t> free_ids, active_ids;
  for (std::size_t a = 0; a < pattern.n_pu(); ++a) (pattern.active[a] ? active_ids : free_ids).push_back(a);

  Matrix<std::uint8_t> access(n_su, free_ids.size(), 0);
  Matrix<double> interference(n_su, active_ids.size(), 0.0);
  for (std::size_t i = 0; i < n_su; ++i) {
    for (std::size_t f = 0; f < free_ids.size(); ++f)
      access(i, f) = net.power(i, free_ids[f]) >= params.access_threshold ? 1 : 0;
    for (std::size_t b = 0; b < active_ids.size(); ++b) interference(i, b) = net.power(i, active_ids[b]);
  }

  json meta;
  meta["generator"] = scenario_to_json(net.params);
  meta["seed"] = net.params.seed;
  meta["free_pu_ids"] = free_ids;
  meta["active_pu_ids"] = active_ids;

  return ProblemInstance(std::move(access), std::move(interference),
                         priority ? std::move(*priority) : std::vector<double>(n_su, 1.0),
                         std::vector<double>(active_ids.size(), params.theta), std::move(meta));
}

json network_to_json(const NetworkRealization& net) {
  auto points = [](const std::vector<Point>& pts) {
    json out = json::array();
    for (const auto& p : pts) out.push_back({p.x, p.y});
    return out;
  };
  auto matrix = [](const Matrix<double>& m) {
    json out = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      out.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return out;
  };
  return json{{"params", scenario_to_json(net.params)},
              {"bs_positions", points(net.bs_positions)},
              {"su_positions", points(net.su_positions)},
              {"fading", matrix(net.fading)},
              {"power", matrix(net.power)}};
}

CalibrationResult calibrate(const ScenarioParams& base, const CalibrationTargets& targets) {
  base.validate();
  if (targets.networks == 0) throw std::invalid_argument("calibrate: need at least one network");
  if (!(targets.access_degree > 0.0 && targets.access_degree < static_cast<double>(base.n_pu)))
    throw std::invalid_argument("calibrate: access degree target must lie in (0, n_pu)");
  if (!(targets.interference_degree > 0.0 && targets.interference_degree < static_cast<double>(base.n_su)))
    throw std::invalid_argument("calibrate: interference degree target must lie in (0, n_su)");
  if (!(targets.cutoff_ratio > 0.0)) throw std::invalid_argument("calibrate: cutoff_ratio must be > 0");

  // Normalised gains g·r^{-α} (unit power, no cutoff).
  ScenarioParams raw = base;
  raw.tx_power = 1.0;
  raw.cutoff = 0.0;
  std::vector<double> gains;
  gains.reserve(targets.networks * base.n_su * base.n_pu);
  for (std::size_t k = 0; k < targets.networks; ++k) {
    raw.seed = derive_seed(targets.seed, {0, k});
    const auto net = generate_network(raw);
    gains.insert(gains.end(), net.power.data().begin(), net.power.data().end());
  }
  std::sort(gains.begin(), gains.end(), std::greater<>());
  auto upper_quantile = [&gains](double fraction) {
    const auto idx = static_cast<std::size_t>(fraction * static_cast<double>(gains.size()));
    return gains[std::min(idx, gains.size() - 1)];
  };
  const double access_gain = upper_quantile(targets.access_degree / static_cast<double>(base.n_pu));
  const double interference_gain = upper_quantile(targets.interference_degree / static_cast<double>(base.n_su));

  CalibrationResult out;
  out.params = base;
  out.params.cutoff = targets.cutoff_ratio * base.theta;
  out.params.tx_power = out.params.cutoff / interference_gain;
  out.params.access_threshold = out.params.tx_power * access_gain;
  out.params.validate();

  double access_sum = 0.0, interference_sum = 0.0, interference_max = 0.0;
  ScenarioParams check = out.params;
  for (std::size_t k = 0; k < targets.networks; ++k) {
    check.seed = derive_seed(targets.seed, {1, k});
    const auto net = generate_network(check);
    for (std::size_t i = 0; i < check.n_su; ++i)
      for (std::size_t a = 0; a < check.n_pu; ++a)
        if (net.power(i, a) >= check.access_threshold) access_sum += 1.0;
    for (std::size_t a = 0; a < check.n_pu; ++a) {
      double deg = 0.0;
      for (std::size_t i = 0; i < check.n_su; ++i)
        if (net.power(i, a) > 0.0) deg += 1.0;
      interference_sum += deg;
      interference_max = std::max(interference_max, deg);
    }
  }
  const auto nets = static_cast<double>(targets.networks);
  out.mean_access_degree = access_sum / (nets * static_cast<double>(check.n_su));
  out.mean_interference_degree = interference_sum / (nets * static_cast<double>(check.n_pu));
  out.max_interference_degree = interference_max;
  return out;
}

}  // namespace crn
