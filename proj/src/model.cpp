#include "crn/model.hpp"

#include <cassert>
#include <cmath>

#include "crn/errors.hpp"

namespace crn {

std::string to_string(Model m) { return m == Model::A ? "A" : "B"; }

Model model_from_string(const std::string& s) {
  if (s == "A" || s == "a") return Model::A;
  if (s == "B" || s == "b") return Model::B;
  throw std::invalid_argument("unknown model '" + s + "' (expected A or B)");
}

ProblemInstance::ProblemInstance(Matrix<std::uint8_t> access, Matrix<double> interference,
                                 std::vector<double> priority, std::vector<double> theta,
                                 nlohmann::json metadata)
    : access_(std::move(access)),
      interference_(std::move(interference)),
      priority_(std::move(priority)),
      theta_(std::move(theta)),
      metadata_(std::move(metadata)) {
  if (interference_.rows() != access_.rows() || priority_.size() != access_.rows())
    throw DimensionMismatch("instance: SU count differs between access, interference and priority");
  if (theta_.size() != interference_.cols())
    throw DimensionMismatch("instance: threshold count differs from active-PU count");
  for (auto v : access_.data())
    if (v > 1) throw std::invalid_argument("instance: access entries must be 0 or 1");
  for (double g : interference_.data())
    if (!(g >= 0.0) || !std::isfinite(g))
      throw std::invalid_argument("instance: interference entries must be finite and >= 0");
  for (double c : priority_)
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("instance: priorities must be > 0");
  for (double t : theta_)
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("instance: thresholds must be > 0");
  if (!metadata_.is_object()) metadata_ = nlohmann::json::object();
}

ProblemInstance ProblemInstance::from_sparse(std::size_t n_su, std::size_t n_free, std::size_t n_active,
                                             std::span<const AccessLink> access,
                                             std::span<const InterferenceLink> interference,
                                             std::vector<double> priority, std::vector<double> theta,
                                             nlohmann::json metadata) {
  Matrix<std::uint8_t> acc(n_su, n_free, 0);
  for (const auto& l : access) {
    if (l.su >= n_su || l.channel >= n_free) throw DimensionMismatch("instance: access link out of range");
    acc(l.su, l.channel) = 1;
  }
  Matrix<double> g(n_su, n_active, 0.0);
  for (const auto& l : interference) {
    if (l.su >= n_su || l.pu >= n_active) throw DimensionMismatch("instance: interference link out of range");
    g(l.su, l.pu) = l.gain;
  }
  return ProblemInstance(std::move(acc), std::move(g), std::move(priority), std::move(theta),
                         std::move(metadata));
}

std::vector<AccessLink> ProblemInstance::access_links() const {
  std::vector<AccessLink> out;
  for (std::size_t i = 0; i < n_su(); ++i)
    for (std::size_t a = 0; a < n_free(); ++a)
      if (accessible(i, a)) out.push_back({i, a});
  return out;
}

std::vector<InterferenceLink> ProblemInstance::interference_links() const {
  std::vector<InterferenceLink> out;
  for (std::size_t i = 0; i < n_su(); ++i)
    for (std::size_t b = 0; b < n_active(); ++b)
      if (interference(i, b) > 0.0) out.push_back({i, b, interference(i, b)});
  return out;
}

double ProblemInstance::self_interference(std::size_t i) const {
  double acc = 0.0;
  for (std::size_t b = 0; b < n_active(); ++b) {
    const double g = interference(i, b);
    acc += g * g / theta_[b];
  }
  return acc;
}

double ProblemInstance::effective_priority(std::size_t i, Model model, bool absorb_diagonal) const {
  if (model == Model::A || !absorb_diagonal) return priority_[i];
  return priority_[i] - self_interference(i);
}

ProblemInstance ProblemInstance::with_priorities(std::vector<double> priority) const {
  return ProblemInstance(access_, interference_, std::move(priority), theta_, metadata_);
}

bool ProblemInstance::operator==(const ProblemInstance& other) const {
  return access_ == other.access_ && interference_ == other.interference_ &&
         priority_ == other.priority_ && theta_ == other.theta_ && metadata_ == other.metadata_;
}

Assignment::Assignment(const ProblemInstance& inst)
    : sigma_(inst.n_su(), inst.n_free(), 0), s_(inst.n_su(), 0) {}

Assignment Assignment::from_sigma(const ProblemInstance& inst, Matrix<std::uint8_t> sigma) {
  auto s = activity_from_assignment(sigma, inst);
  return Assignment(std::move(sigma), std::move(s));
}

void Assignment::set(const ProblemInstance& inst, std::size_t i, std::size_t a, bool on) {
  if (i >= n_su() || a >= n_free()) throw DimensionMismatch("assignment: link index out of range");
  sigma_(i, a) = on ? 1 : 0;
  std::uint8_t active = 0;
  for (std::size_t b = 0; b < n_free(); ++b)
    if (sigma_(i, b) && inst.accessible(i, b)) active = 1;
  s_[i] = active;
}

std::size_t Assignment::connected() const {
  std::size_t n = 0;
  for (auto v : s_) n += v;
  return n;
}

std::vector<AccessLink> Assignment::links() const {
  std::vector<AccessLink> out;
  for (std::size_t i = 0; i < n_su(); ++i)
    for (std::size_t a = 0; a < n_free(); ++a)
      if (link(i, a)) out.push_back({i, a});
  return out;
}

std::vector<std::uint8_t> activity_from_assignment(const Matrix<std::uint8_t>& sigma,
                                                   const ProblemInstance& inst) {
  if (sigma.rows() != inst.n_su() || sigma.cols() != inst.n_free())
    throw DimensionMismatch("sigma must be n_su x n_free");
  std::vector<std::uint8_t> s(inst.n_su(), 0);
  for (std::size_t i = 0; i < inst.n_su(); ++i)
    for (std::size_t a = 0; a < inst.n_free(); ++a)
      if (sigma(i, a) && inst.accessible(i, a)) {
        s[i] = 1;
        break;
      }
  return s;
}

namespace {

void check_dims(const Assignment& assign, const ProblemInstance& inst) {
  if (assign.n_su() != inst.n_su() || assign.n_free() != inst.n_free())
    throw DimensionMismatch("assignment does not match instance dimensions");
}

}  // namespace

bool is_matching(const Assignment& assign, const ProblemInstance& inst) {
  check_dims(assign, inst);
  std::vector<int> col(inst.n_free(), 0);
  for (std::size_t i = 0; i < inst.n_su(); ++i) {
    int row = 0;
    for (std::size_t a = 0; a < inst.n_free(); ++a) {
      if (assign.link(i, a) && inst.accessible(i, a)) {
        ++row;
        ++col[a];
      }
    }
    if (row > 1) return false;
  }
  for (int c : col)
    if (c > 1) return false;
  return true;
}

double interference_load(std::span<const std::uint8_t> s, const ProblemInstance& inst, std::size_t b) {
  if (b >= inst.n_active()) throw std::out_of_range("interference_load: active PU index out of range");
  if (s.size() != inst.n_su()) throw DimensionMismatch("activity vector length differs from n_su");
  double load = 0.0;
  for (std::size_t i = 0; i < inst.n_su(); ++i)
    if (s[i]) load += inst.interference(i, b);
  return load;
}

bool is_feasible_model_a(const Assignment& assign, const ProblemInstance& inst) {
  if (!is_matching(assign, inst)) return false;
  for (std::size_t b = 0; b < inst.n_active(); ++b)
    if (!within_budget(interference_load(assign.activity(), inst, b), inst.threshold(b))) return false;
  return true;
}

double cost_model_a(const Assignment& assign, const ProblemInstance& inst) {
  check_dims(assign, inst);
  double cost = 0.0;
  for (std::size_t i = 0; i < inst.n_su(); ++i)
    if (assign.active(i)) cost -= inst.priority(i);
  return cost;
}

double interference_term_squared(std::span<const std::uint8_t> s, const ProblemInstance& inst) {
  double acc = 0.0;
  for (std::size_t b = 0; b < inst.n_active(); ++b) {
    const double load = interference_load(s, inst, b);
    acc += load * load / inst.threshold(b);
  }
  return acc;
}

double interference_term_expanded(std::span<const std::uint8_t> s, const ProblemInstance& inst) {
  if (s.size() != inst.n_su()) throw DimensionMismatch("activity vector length differs from n_su");
  double acc = 0.0;
  for (std::size_t b = 0; b < inst.n_active(); ++b) {
    double pairs = 0.0;
    for (std::size_t i = 0; i < inst.n_su(); ++i) {
      if (!s[i]) continue;
      for (std::size_t j = 0; j < inst.n_su(); ++j)
        if (s[j]) pairs += inst.interference(i, b) * inst.interference(j, b);
    }
    acc += pairs / inst.threshold(b);
  }
  return acc;
}

CostBreakdown cost_model_b(const Assignment& assign, const ProblemInstance& inst) {
  CostBreakdown out;
  out.utility_term = cost_model_a(assign, inst);
  out.interference_term = interference_term_squared(assign.activity(), inst);
#ifndef NDEBUG
  {
    const double expanded = interference_term_expanded(assign.activity(), inst);
    assert(std::abs(expanded - out.interference_term) <=
           1e-12 * std::max(1.0, std::abs(out.interference_term)));
  }
#endif
  out.total = out.utility_term + out.interference_term;
  return out;
}

CostBreakdown evaluate(const Assignment& assign, const ProblemInstance& inst, Model model) {
  CostBreakdown out = cost_model_b(assign, inst);
  if (model == Model::A) out.total = out.utility_term;
  return out;
}

bool is_feasible(const Assignment& assign, const ProblemInstance& inst, Model model) {
  return model == Model::A ? is_feasible_model_a(assign, inst) : is_matching(assign, inst);
}

}  // namespace crn
