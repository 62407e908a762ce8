#include "hisim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hisim/error.hpp"
#include "hisim/numfmt.hpp"

namespace hisim {

CostParams::CostParams(double beta) : beta_(beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw ConfigError("beta must lie in [0, 1), got " + format_double(beta));
  }
}

ThresholdPolicy::ThresholdPolicy(double theta) : theta_(theta) {
  if (!(theta >= 0.0 && theta < 1.0)) {
    throw ConfigError("theta must lie in [0, 1), got " + format_double(theta));
  }
}

double linear_cost(std::size_t beta_coefficient, std::size_t constant, double beta) noexcept {
  return std::fma(static_cast<double>(beta_coefficient), beta, static_cast<double>(constant));
}

int compare_linear_cost(std::size_t a_coef, std::size_t a_const, std::size_t b_coef,
                        std::size_t b_const, double beta) noexcept {
  // Integer differences are exact; fma rounds once, so the sign is exact.
  double dc = static_cast<double>(a_coef) - static_cast<double>(b_coef);
  double dk = static_cast<double>(a_const) - static_cast<double>(b_const);
  double diff = std::fma(dc, beta, dk);
  return (diff > 0.0) - (diff < 0.0);
}

double HiOutcome::total_cost() const noexcept {
  return linear_cost(cost_beta_coefficient(), cost_constant(), beta);
}

double HiOutcome::accuracy() const noexcept {
  if (sample_count == 0) return 0.0;
  return 1.0 - static_cast<double>(cost_constant()) / static_cast<double>(sample_count);
}

double FilterOutcome::total_cost() const noexcept {
  return linear_cost(cost_beta_coefficient(), cost_constant(), beta);
}

double FilterOutcome::accuracy() const noexcept {
  if (relevant_count == 0) return 1.0;
  return static_cast<double>(true_positives) / static_cast<double>(relevant_count);
}

Decision decide(const InferenceSample& sample, ThresholdPolicy policy) noexcept {
  return sample.confidence < policy.theta() ? Decision::offload : Decision::accept;
}

double sample_cost(const InferenceSample& sample, ThresholdPolicy policy, CostParams costs) noexcept {
  if (decide(sample, policy) == Decision::offload) {
    return costs.beta() + (sample.remote_correct() ? 0.0 : 1.0);
  }
  return sample.local_correct() ? 0.0 : 1.0;
}

namespace {

std::span<const InferenceSample> nonempty_multiclass(const Trace& trace) {
  auto samples = trace.multiclass_samples();
  if (samples.empty()) {
    throw InputError("trace is empty");
  }
  return samples;
}

}  // namespace

HiOutcome evaluate_policy(const Trace& trace, ThresholdPolicy policy, CostParams costs) {
  auto samples = nonempty_multiclass(trace);
  HiOutcome out;
  out.sample_count = samples.size();
  out.beta = costs.beta();
  for (const auto& s : samples) {
    if (decide(s, policy) == Decision::offload) {
      ++out.offloaded_count;
      out.remote_errors += s.remote_correct() ? 0 : 1;
    } else {
      out.local_errors += s.local_correct() ? 0 : 1;
    }
  }
  return out;
}

HiOutcome evaluate_full_offload(const Trace& trace, CostParams costs) {
  auto samples = nonempty_multiclass(trace);
  HiOutcome out;
  out.sample_count = samples.size();
  out.offloaded_count = samples.size();
  out.beta = costs.beta();
  out.remote_errors = static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const auto& s) { return !s.remote_correct(); }));
  return out;
}

std::vector<ThresholdCandidate> threshold_candidates(const Trace& trace, CostParams costs) {
  auto samples = nonempty_multiclass(trace);

  std::vector<const InferenceSample*> sorted;
  sorted.reserve(samples.size());
  for (const auto& s : samples) sorted.push_back(&s);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->confidence < b->confidence; });

  std::size_t total_local_errors = 0;
  for (const auto& s : samples) total_local_errors += s.local_correct() ? 0 : 1;

  // Running state for "offload everything strictly below the current group".
  HiOutcome current;
  current.sample_count = samples.size();
  current.beta = costs.beta();
  current.local_errors = total_local_errors;

  std::vector<ThresholdCandidate> candidates;
  candidates.reserve(2 * samples.size() + 2);
  auto push = [&](double theta) {
    if (!candidates.empty() && !(theta > candidates.back().theta)) return;
    if (!(theta < 1.0)) return;
    candidates.push_back({theta, current});
  };

  push(0.0);
  std::size_t i = 0;
  while (i < sorted.size()) {
    double value = sorted[i]->confidence;
    push(value);
    std::size_t j = i;
    for (; j < sorted.size() && sorted[j]->confidence == value; ++j) {
      const auto& s = *sorted[j];
      ++current.offloaded_count;
      current.local_errors -= s.local_correct() ? 0 : 1;
      current.remote_errors += s.remote_correct() ? 0 : 1;
    }
    double upper = j < sorted.size() ? sorted[j]->confidence : 1.0;
    double mid = value + (upper - value) / 2.0;
    if (mid > value && mid < upper) push(mid);
    i = j;
  }
  return candidates;
}

ThresholdSearchResult optimal_threshold(const Trace& trace, CostParams costs) {
  auto candidates = threshold_candidates(trace, costs);
  const ThresholdCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (compare_linear_cost(c.outcome.cost_beta_coefficient(), c.outcome.cost_constant(),
                            best->outcome.cost_beta_coefficient(), best->outcome.cost_constant(),
                            costs.beta()) < 0) {
      best = &c;
    }
  }
  return {ThresholdPolicy(best->theta), best->outcome.total_cost(), best->outcome};
}

double cost_reduction_percent(double full_cost, double hi_cost) {
  if (full_cost == 0.0) {
    throw InputError("full-offload cost is zero; reduction undefined");
  }
  return (full_cost - hi_cost) / full_cost * 100.0;
}

double cost_reduction_vs_full_offload(const HiOutcome& outcome, std::size_t trace_size,
                                      std::size_t full_offload_errors, double beta) {
  if (outcome.sample_count != trace_size) {
    throw InputError("outcome was computed on a trace of different size");
  }
  double full = linear_cost(trace_size, full_offload_errors, beta);
  double hi = linear_cost(outcome.cost_beta_coefficient(), outcome.cost_constant(), beta);
  return cost_reduction_percent(full, hi);
}

FilterDecision filter_decide(const BinarySample& sample) noexcept {
  return sample.confidence >= kFilterThreshold ? FilterDecision::offload : FilterDecision::discard;
}

namespace {

template <typename Pred>
FilterOutcome aggregate_filter(const Trace& trace, CostParams costs, Pred offloads) {
  auto samples = trace.binary_samples();
  if (samples.empty()) {
    throw InputError("trace is empty");
  }
  FilterOutcome out;
  out.sample_count = samples.size();
  out.beta = costs.beta();
  for (const auto& s : samples) {
    bool off = offloads(s);
    out.relevant_count += s.is_relevant ? 1 : 0;
    out.offloaded_count += off ? 1 : 0;
    if (off && s.is_relevant) ++out.true_positives;
    if (off && !s.is_relevant) ++out.false_positives;
    if (!off && s.is_relevant) ++out.false_negatives;
  }
  return out;
}

}  // namespace

FilterOutcome evaluate_filter(const Trace& trace, CostParams costs) {
  return aggregate_filter(trace, costs,
                          [](const BinarySample& s) { return filter_decide(s) == FilterDecision::offload; });
}

FilterOutcome evaluate_filter_full_offload(const Trace& trace, CostParams costs) {
  return aggregate_filter(trace, costs, [](const BinarySample&) { return true; });
}

}  // namespace hisim
