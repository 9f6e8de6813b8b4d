#pragma once

// Problem representation for interference-constrained SU scheduling.
//
// Free channels (idle PUs) and active PUs live in separate index spaces:
// accessibility couples SUs to free channels, interference couples SUs to
// active PUs. The split from a raw PU list is done by scenario::derive_instance.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace crn {

enum class Model { A, B };

std::string to_string(Model m);
Model model_from_string(const std::string& s);

template <typename T>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

struct AccessLink {
  std::size_t su;
  std::size_t channel;
};

struct InterferenceLink {
  std::size_t su;
  std::size_t pu;
  double gain;
};

/// Immutable optimisation input. Validated on construction.
class ProblemInstance {
public:
  ProblemInstance(Matrix<std::uint8_t> access, Matrix<double> interference,
                  std::vector<double> priority, std::vector<double> theta,
                  nlohmann::json metadata = nlohmann::json::object());

  static ProblemInstance from_sparse(std::size_t n_su, std::size_t n_free, std::size_t n_active,
                                     std::span<const AccessLink> access,
                                     std::span<const InterferenceLink> interference,
                                     std::vector<double> priority, std::vector<double> theta,
                                     nlohmann::json metadata = nlohmann::json::object());

  std::size_t n_su() const { return access_.rows(); }
  std::size_t n_free() const { return access_.cols(); }
  std::size_t n_active() const { return interference_.cols(); }

  bool accessible(std::size_t i, std::size_t a) const { return access_(i, a) != 0; }
  double interference(std::size_t i, std::size_t b) const { return interference_(i, b); }
  double priority(std::size_t i) const { return priority_[i]; }
  double threshold(std::size_t b) const { return theta_[b]; }

  const Matrix<std::uint8_t>& access() const { return access_; }
  const Matrix<double>& interference() const { return interference_; }
  std::span<const double> priorities() const { return priority_; }
  std::span<const double> thresholds() const { return theta_; }
  const nlohmann::json& metadata() const { return metadata_; }

  std::vector<AccessLink> access_links() const;
  std::vector<InterferenceLink> interference_links() const;

  /// Σ_b G(i,b)² / θ_b, the per-SU diagonal of the quadratic interference cost.
  double self_interference(std::size_t i) const;

  /// Priority entering the e^{β s c} factor: Model B subtracts the diagonal
  /// self-interference when `absorb_diagonal` is set.
  double effective_priority(std::size_t i, Model model, bool absorb_diagonal = true) const;

  ProblemInstance with_priorities(std::vector<double> priority) const;

  bool operator==(const ProblemInstance& other) const;

private:
  Matrix<std::uint8_t> access_;
  Matrix<double> interference_;
  std::vector<double> priority_;
  std::vector<double> theta_;
  nlohmann::json metadata_;
};

/// Binary link variables σ(i,a) plus the activity vector s, kept consistent
/// with s_i = Θ(Σ_a σ(i,a) I(i,a)).
class Assignment {
public:
  Assignment() = default;
  explicit Assignment(const ProblemInstance& inst);
  static Assignment from_sigma(const ProblemInstance& inst, Matrix<std::uint8_t> sigma);

  void set(const ProblemInstance& inst, std::size_t i, std::size_t a, bool on);

  bool link(std::size_t i, std::size_t a) const { return sigma_(i, a) != 0; }
  bool active(std::size_t i) const { return s_[i] != 0; }
  const Matrix<std::uint8_t>& sigma() const { return sigma_; }
  std::span<const std::uint8_t> activity() const { return s_; }
  std::size_t n_su() const { return sigma_.rows(); }
  std::size_t n_free() const { return sigma_.cols(); }

  std::size_t connected() const;
  std::vector<AccessLink> links() const;

  bool operator==(const Assignment&) const = default;

private:
  Assignment(Matrix<std::uint8_t> sigma, std::vector<std::uint8_t> s)
      : sigma_(std::move(sigma)), s_(std::move(s)) {}

  Matrix<std::uint8_t> sigma_;
  std::vector<std::uint8_t> s_;
};

struct CostBreakdown {
  double utility_term = 0.0;
  double interference_term = 0.0;
  double total = 0.0;
};

std::vector<std::uint8_t> activity_from_assignment(const Matrix<std::uint8_t>& sigma,
                                                   const ProblemInstance& inst);

bool is_matching(const Assignment& assign, const ProblemInstance& inst);

double interference_load(std::span<const std::uint8_t> s, const ProblemInstance& inst, std::size_t b);

/// Shared comparison for hard budgets so every solver agrees on boundary cases.
inline bool within_budget(double load, double theta) { return load <= theta + 1e-12; }

bool is_feasible_model_a(const Assignment& assign, const ProblemInstance& inst);

double cost_model_a(const Assignment& assign, const ProblemInstance& inst);

CostBreakdown cost_model_b(const Assignment& assign, const ProblemInstance& inst);

/// Σ_b (1/θ_b)(Σ_i G(i,b) s_i)².
double interference_term_squared(std::span<const std::uint8_t> s, const ProblemInstance& inst);
/// Σ_b (1/θ_b) Σ_{i,j} G(i,b) G(j,b) s_i s_j.
double interference_term_expanded(std::span<const std::uint8_t> s, const ProblemInstance& inst);

/// Cost of `assign` under `model`. For Model A total == utility_term; the
/// interference term is still reported for diagnostics.
CostBreakdown evaluate(const Assignment& assign, const ProblemInstance& inst, Model model);

bool is_feasible(const Assignment& assign, const ProblemInstance& inst, Model model);

}  // namespace crn
