#include "crn/bp_config.hpp"

#include <stdexcept>

namespace crn {

using nlohmann::json;

void BpConfig::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("bp: beta must be > 0");
  if (!(damping >= 0.0 && damping < 1.0)) throw std::invalid_argument("bp: damping must lie in [0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("bp: tol must be > 0");
  if (d_max < 1) throw std::invalid_argument("bp: d_max must be >= 1");
}

std::string to_string(Schedule s) { return s == Schedule::synchronous ? "synchronous" : "random-sequential"; }

Schedule schedule_from_string(const std::string& s) {
  if (s == "synchronous" || s == "sync") return Schedule::synchronous;
  if (s == "random-sequential" || s == "random") return Schedule::random_sequential;
  throw std::invalid_argument("unknown schedule '" + s + "'");
}

std::string to_string(PuCoupling c) {
  switch (c) {
    case PuCoupling::product: return "product";
    case PuCoupling::pairwise: return "pairwise";
    case PuCoupling::exact: return "exact";
  }
  return "product";
}

PuCoupling pu_coupling_from_string(const std::string& s) {
  if (s == "product") return PuCoupling::product;
  if (s == "pairwise") return PuCoupling::pairwise;
  if (s == "exact") return PuCoupling::exact;
  throw std::invalid_argument("unknown pu_coupling '" + s + "'");
}

std::string to_string(RoundingGate g) { return g == RoundingGate::link ? "link" : "activity"; }

RoundingGate rounding_gate_from_string(const std::string& s) {
  if (s == "link") return RoundingGate::link;
  if (s == "activity") return RoundingGate::activity;
  throw std::invalid_argument("unknown rounding gate '" + s + "'");
}

json bp_config_to_json(const BpConfig& cfg) {
  return json{{"beta", cfg.beta},
              {"damping", cfg.damping},
              {"max_iter", cfg.max_iter},
              {"tol", cfg.tol},
              {"schedule", to_string(cfg.schedule)},
              {"d_max", cfg.d_max},
              {"include_diagonal", cfg.include_diagonal},
              {"seed", cfg.seed},
              {"exact_one", cfg.channel_constraint == ChannelConstraint::exact_one},
              {"unconstrained_activity", cfg.activity_sum == ActivitySum::unconstrained},
              {"pu_coupling", to_string(cfg.pu_coupling)},
              {"negate_q", cfg.negate_q},
              {"rounding_gate", to_string(cfg.rounding_gate)}};
}

BpConfig bp_config_from_json(const json& doc, BpConfig cfg) {
  auto read = [&doc](const char* key, auto& field) {
    if (doc.contains(key)) field = doc.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  read("beta", cfg.beta);
  read("damping", cfg.damping);
  read("max_iter", cfg.max_iter);
  read("tol", cfg.tol);
  read("d_max", cfg.d_max);
  read("include_diagonal", cfg.include_diagonal);
  read("seed", cfg.seed);
  read("negate_q", cfg.negate_q);
  if (doc.contains("schedule")) cfg.schedule = schedule_from_string(doc.at("schedule").get<std::string>());
  if (doc.contains("exact_one"))
    cfg.channel_constraint =
        doc.at("exact_one").get<bool>() ? ChannelConstraint::exact_one : ChannelConstraint::at_most_one;
  if (doc.contains("unconstrained_activity"))
    cfg.activity_sum =
        doc.at("unconstrained_activity").get<bool>() ? ActivitySum::unconstrained : ActivitySum::at_most_one;
  if (doc.contains("pu_coupling")) cfg.pu_coupling = pu_coupling_from_string(doc.at("pu_coupling").get<std::string>());
  if (doc.contains("rounding_gate"))
    cfg.rounding_gate = rounding_gate_from_string(doc.at("rounding_gate").get<std::string>());
  cfg.validate();
  return cfg;
}

}  // namespace crn
