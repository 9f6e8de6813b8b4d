#include "crn/greedy.hpp"

#include <algorithm>

namespace crn {

std::string to_string(GreedyVerdict v) {
  switch (v) {
    case GreedyVerdict::accepted: return "accepted";
    case GreedyVerdict::su_taken: return "su_taken";
    case GreedyVerdict::channel_taken: return "channel_taken";
    case GreedyVerdict::budget_exceeded: return "budget_exceeded";
    case GreedyVerdict::nonpositive_weight: return "nonpositive_weight";
  }
  return "unknown";
}

namespace {

struct Candidate {
  std::size_t su;
  std::size_t channel;
  double weight;
};

GreedyTrace run_greedy(const ProblemInstance& inst, Model model) {
  std::vector<Candidate> links;
  for (const auto& l : inst.access_links()) {
    const double w = model == Model::A ? inst.priority(l.su) : inst.priority(l.su) - inst.self_interference(l.su);
    links.push_back({l.su, l.channel, w});
  }
  // access_links() is already (i, a)-ordered, so a stable sort keeps that tie order.
  std::stable_sort(links.begin(), links.end(),
                   [](const Candidate& x, const Candidate& y) { return x.weight > y.weight; });

  GreedyTrace trace;
  trace.assignment = Assignment(inst);
  std::vector<std::uint8_t> su_used(inst.n_su(), 0), channel_used(inst.n_free(), 0);
  std::vector<double> load(inst.n_active(), 0.0);

  for (const auto& c : links) {
    GreedyVerdict verdict = GreedyVerdict::accepted;
    if (su_used[c.su]) {
      verdict = GreedyVerdict::su_taken;
    } else if (channel_used[c.channel]) {
      verdict = GreedyVerdict::channel_taken;
    } else if (model == Model::B && !(c.weight > 0.0)) {
      verdict = GreedyVerdict::nonpositive_weight;
    } else if (model == Model::A) {
      for (std::size_t b = 0; b < inst.n_active(); ++b)
        if (!within_budget(load[b] + inst.interference(c.su, b), inst.threshold(b))) {
          verdict = GreedyVerdict::budget_exceeded;
          break;
        }
    }
    if (verdict == GreedyVerdict::accepted) {
      su_used[c.su] = 1;
      channel_used[c.channel] = 1;
      for (std::size_t b = 0; b < inst.n_active(); ++b) load[b] += inst.interference(c.su, b);
      trace.assignment.set(inst, c.su, c.channel, true);
    }
    trace.steps.push_back({c.su, c.channel, c.weight, verdict});
  }
  trace.cost = evaluate(trace.assignment, inst, model);
  return trace;
}

}  // namespace

GreedyTrace greedy_model_a(const ProblemInstance& inst) { return run_greedy(inst, Model::A); }

GreedyTrace greedy_model_b(const ProblemInstance& inst) { return run_greedy(inst, Model::B); }

Assignment replay(const GreedyTrace& trace, const ProblemInstance& inst) {
  Assignment out(inst);
  for (const auto& s : trace.steps)
    if (s.verdict == GreedyVerdict::accepted) out.set(inst, s.su, s.channel, true);
  return out;
}

nlohmann::json trace_to_json(const GreedyTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : trace.steps)
    steps.push_back({{"su", s.su}, {"channel", s.channel}, {"weight", s.weight}, {"verdict", to_string(s.verdict)}});
  return {{"steps", std::move(steps)},
          {"cost", {{"total", trace.cost.total},
                    {"utility", trace.cost.utility_term},
                    {"interference", trace.cost.interference_term}}}};
}

}  // namespace crn
