#pragma once

#include <cstddef>
#include <vector>

#include "hisim/trace.hpp"

namespace hisim {

/// Fixed cost charged per offloaded sample; 0 <= beta < 1.
class CostParams {
 public:
  explicit CostParams(double beta);
  double beta() const noexcept { return beta_; }

 private:
  double beta_;
};

/// Local inference is accepted iff confidence >= theta; 0 <= theta < 1.
class ThresholdPolicy {
 public:
  explicit ThresholdPolicy(double theta);
  double theta() const noexcept { return theta_; }

 private:
  double theta_;
};

inline constexpr double kFilterThreshold = 0.5;

enum class Decision { offload, accept };
enum class FilterDecision { offload, discard };

/// Total cost of an aggregate written as `beta_coefficient * beta + constant`,
/// evaluated with a single rounding so equal expressions compare equal.
double linear_cost(std::size_t beta_coefficient, std::size_t constant, double beta) noexcept;

/// Exact sign of (a_coef*beta + a_const) - (b_coef*beta + b_const).
int compare_linear_cost(std::size_t a_coef, std::size_t a_const, std::size_t b_coef,
                        std::size_t b_const, double beta) noexcept;

struct HiOutcome {
  std::size_t sample_count = 0;
  std::size_t offloaded_count = 0;
  std::size_t local_errors = 0;   // accepted and the local label is wrong
  std::size_t remote_errors = 0;  // offloaded and the remote label is wrong
  double beta = 0.0;

  std::size_t cost_constant() const noexcept { return local_errors + remote_errors; }
  std::size_t cost_beta_coefficient() const noexcept { return offloaded_count; }
  double total_cost() const noexcept;
  double accuracy() const noexcept;
};

struct FilterOutcome {
  std::size_t sample_count = 0;
  std::size_t relevant_count = 0;
  std::size_t offloaded_count = 0;
  std::size_t true_positives = 0;   // relevant and offloaded
  std::size_t false_positives = 0;  // irrelevant but offloaded
  std::size_t false_negatives = 0;  // relevant but discarded
  double beta = 0.0;

  std::size_t cost_beta_coefficient() const noexcept { return true_positives; }
  std::size_t cost_constant() const noexcept { return false_positives; }
  double total_cost() const noexcept;
  // Recall over relevant samples. Vacuously 1.0 when there are none.
  double accuracy() const noexcept;
  bool zero_relevant() const noexcept { return relevant_count == 0; }
};

Decision decide(const InferenceSample& sample, ThresholdPolicy policy) noexcept;

// beta + eta when offloaded, gamma when accepted.
double sample_cost(const InferenceSample& sample, ThresholdPolicy policy, CostParams costs) noexcept;

HiOutcome evaluate_policy(const Trace& trace, ThresholdPolicy policy, CostParams costs);

/// Aggregate with every sample offloaded, including those with confidence 1.
HiOutcome evaluate_full_offload(const Trace& trace, CostParams costs);

struct ThresholdCandidate {
  double theta = 0.0;
  HiOutcome outcome;
};

/// Every threshold that induces a distinct accept/offload partition, in
/// increasing order: 0, each distinct confidence, midpoints between
/// consecutive distinct confidences, and a point above the maximum
/// confidence when it is below 1.
std::vector<ThresholdCandidate> threshold_candidates(const Trace& trace, CostParams costs);

struct ThresholdSearchResult {
  ThresholdPolicy policy{0.0};
  double total_cost = 0.0;
  HiOutcome outcome;
};

/// Brute-force minimum-cost threshold; ties go to the smallest theta.
ThresholdSearchResult optimal_threshold(const Trace& trace, CostParams costs);

/// (C_full - C_hi) / C_full * 100.
double cost_reduction_percent(double full_cost, double hi_cost);
double cost_reduction_vs_full_offload(const HiOutcome& outcome, std::size_t trace_size,
                                      std::size_t full_offload_errors, double beta);

FilterDecision filter_decide(const BinarySample& sample) noexcept;
FilterOutcome evaluate_filter(const Trace& trace, CostParams costs);
FilterOutcome evaluate_filter_full_offload(const Trace& trace, CostParams costs);

}  // namespace hisim
