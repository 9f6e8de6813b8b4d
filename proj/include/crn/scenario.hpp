#pragma once

// Random geometric CRN: base stations (one per PU channel) and SUs uniform in
// the unit square, received power tx·g·r^{-α} with exponential unit-mean
// fading g, and a cutoff below which power is treated as zero. Noise power
// is normalised to 1, so the SNR test is power >= access_threshold.

#include <cstdint>
#include <optional>
#include <vector>

#include "crn/model.hpp"

namespace crn {

struct ScenarioParams {
  std::size_t n_su = 100;
  std::size_t n_pu = 50;
  double alpha = 3.5;
  double cutoff = 0.0;
  double access_threshold = 1.0;
  double theta = 1.0;
  double tx_power = 1.0;
  double min_distance = 1e-3;
  std::uint64_t seed = 1;

  void validate() const;
};

nlohmann::json scenario_to_json(const ScenarioParams& p);
/// Missing keys keep the values of `base`.
ScenarioParams scenario_from_json(const nlohmann::json& doc, ScenarioParams base = {});

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct NetworkRealization {
  ScenarioParams params;
  std::vector<Point> bs_positions;
  std::vector<Point> su_positions;
  Matrix<double> fading;  // n_su x n_pu
  Matrix<double> power;   // n_su x n_pu, after cutoff
};

struct ActivePattern {
  std::vector<std::uint8_t> active;  // per PU

  std::size_t n_pu() const { return active.size(); }
  std::size_t n_active() const;
  std::size_t n_idle() const { return n_pu() - n_active(); }
};

/// tx·g·max(r, min_distance)^{-α}, or 0 when that is below the cutoff.
double received_power(double gain, double distance, const ScenarioParams& p);
double received_power(const NetworkRealization& net, std::size_t i, std::size_t a);

NetworkRealization generate_network(const ScenarioParams& params);

ActivePattern sample_active_set(std::size_t n_pu, std::size_t k_active, std::uint64_t seed);

/// Splits PUs into free channels (idle) and active PUs. The original PU ids
/// are kept in metadata["free_pu_ids"] / metadata["active_pu_ids"].
ProblemInstance derive_instance(const NetworkRealization& net, const ActivePattern& pattern,
                                const ScenarioParams& params,
                                std::optional<std::vector<double>> priority = std::nullopt);

nlohmann::json network_to_json(const NetworkRealization& net);

struct CalibrationTargets {
  double access_degree = 5.0;         // mean accessible BSs per SU, all PUs idle
  double interference_degree = 10.0;  // mean SUs above cutoff per BS
  double cutoff_ratio = 0.1;          // cutoff / theta
  std::size_t networks = 200;
  std::uint64_t seed = 7;
};

struct CalibrationResult {
  ScenarioParams params;
  double mean_access_degree = 0.0;
  double mean_interference_degree = 0.0;
  double max_interference_degree = 0.0;
};

/// Picks tx_power, cutoff and access_threshold from empirical quantiles of the
/// normalised gain g·r^{-α}, then re-measures the degrees on fresh networks.
CalibrationResult calibrate(const ScenarioParams& base, const CalibrationTargets& targets);

}  // namespace crn
