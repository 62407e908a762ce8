#include "hisim/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <string>

#include "hisim/error.hpp"
#include "hisim/numfmt.hpp"

namespace hisim {

double SimulationReport::accuracy() const noexcept {
  if (sample_count == 0) return 0.0;
  return 1.0 - static_cast<double>(errors_total) / static_cast<double>(sample_count);
}

double SimulationReport::total_cost() const noexcept {
  return linear_cost(cost_beta_coefficient, cost_constant, beta);
}

namespace {

std::span<const InferenceSample> checked_samples(const Trace& trace) {
  auto samples = trace.multiclass_samples();
  if (samples.empty()) {
    throw InputError("trace is empty");
  }
  return samples;
}

// Indices of samples ordered by id.
std::vector<std::size_t> id_order(std::span<const InferenceSample> samples) {
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return samples[a].id < samples[b].id; });
  return order;
}

// Report for an explicit assignment: the first `n_offloaded` entries of
// `order` go to the server, the rest stay on the device.
SimulationReport assignment_report(std::string name, std::span<const InferenceSample> samples,
                                   std::span<const std::size_t> order, std::size_t n_offloaded,
                                   CostParams costs, double makespan) {
  SimulationReport r;
  r.policy_name = std::move(name);
  r.beta = costs.beta();
  r.sample_count = samples.size();
  r.offloaded_count = n_offloaded;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& s = samples[order[i]];
    bool wrong = i < n_offloaded ? !s.remote_correct() : !s.local_correct();
    r.errors_total += wrong ? 1 : 0;
  }
  r.cost_beta_coefficient = r.offloaded_count;
  r.cost_constant = r.errors_total;
  r.makespan_ms = makespan;
  r.throughput_jps = throughput_jps(r.sample_count, makespan);
  return r;
}

SimulationReport from_outcome(std::string name, const HiOutcome& outcome, double makespan) {
  SimulationReport r;
  r.policy_name = std::move(name);
  r.beta = outcome.beta;
  r.sample_count = outcome.sample_count;
  r.offloaded_count = outcome.offloaded_count;
  r.errors_total = outcome.cost_constant();
  r.cost_beta_coefficient = outcome.cost_beta_coefficient();
  r.cost_constant = outcome.cost_constant();
  r.makespan_ms = makespan;
  r.throughput_jps = throughput_jps(r.sample_count, makespan);
  return r;
}

}  // namespace

SimulationReport hi_report(const Trace& trace, ThresholdPolicy policy, CostParams costs,
                           const TimingParams& timing) {
  timing.validate();
  auto outcome = evaluate_policy(trace, policy, costs);
  auto r = from_outcome(policy_names::hi, outcome,
                        makespan_ms(outcome.sample_count, outcome.offloaded_count, timing, MakespanMode::hi_serial));
  r.theta = policy.theta();
  return r;
}

SimulationReport no_offload(const Trace& trace, CostParams costs, const TimingParams& timing) {
  timing.validate();
  auto outcome = evaluate_policy(trace, ThresholdPolicy(0.0), costs);
  auto r = from_outcome(policy_names::no_offload, outcome,
                        makespan_ms(outcome.sample_count, 0, timing, MakespanMode::hi_serial));
  r.theta = 0.0;
  return r;
}

SimulationReport full_offload(const Trace& trace, CostParams costs, const TimingParams& timing) {
  timing.validate();
  auto outcome = evaluate_full_offload(trace, costs);
  // The device does no local inference, so only the server side counts.
  return from_outcome(policy_names::full_offload, outcome,
                      makespan_ms(outcome.sample_count, outcome.sample_count, timing,
                                  MakespanMode::pure_partition_parallel));
}

std::size_t omd_offload_count(std::size_t n_total, const TimingParams& timing) {
  timing.validate();
  std::size_t best = 0;
  double best_makespan = makespan_ms(n_total, 0, timing, MakespanMode::pure_partition_parallel);
  for (std::size_t n = 1; n <= n_total; ++n) {
    double m = makespan_ms(n_total, n, timing, MakespanMode::pure_partition_parallel);
    if (m < best_makespan) {
      best = n;
      best_makespan = m;
    }
  }
  return best;
}

SimulationReport omd(const Trace& trace, CostParams costs, const TimingParams& timing,
                     std::optional<std::uint64_t> shuffle_seed) {
  auto samples = checked_samples(trace);
  auto n_off = omd_offload_count(samples.size(), timing);
  auto order = id_order(samples);
  if (shuffle_seed) {
    std::mt19937_64 rng(*shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  return assignment_report(policy_names::omd, samples, order, n_off, costs,
                           makespan_ms(samples.size(), n_off, timing, MakespanMode::pure_partition_parallel));
}

OmaBudgetFit oma_offload_count(std::size_t n_total, const TimingParams& timing, double budget_ms) {
  timing.validate();
  if (!(budget_ms >= 0.0)) {
    throw ConfigError("OMA time budget must be non-negative");
  }
  OmaBudgetFit fit;
  auto n = static_cast<std::size_t>(
      std::min(std::floor(budget_ms / timing.t_offload_ms), static_cast<double>(n_total)));
  auto server = [&](std::size_t k) { return static_cast<double>(k) * timing.t_offload_ms; };
  while (n < n_total && server(n + 1) <= budget_ms) ++n;
  while (n > 0 && server(n) > budget_ms) --n;
  fit.offloaded = n;
  fit.feasible = makespan_ms(n_total, n, timing, MakespanMode::pure_partition_parallel) <= budget_ms;
  fit.min_makespan_ms =
      makespan_ms(n_total, omd_offload_count(n_total, timing), timing, MakespanMode::pure_partition_parallel);
  return fit;
}

SimulationReport oma(const Trace& trace, CostParams costs, const TimingParams& timing, double budget_ms,
                     OmaVariant variant) {
  auto samples = checked_samples(trace);
  auto fit = oma_offload_count(samples.size(), timing, budget_ms);
  auto order = id_order(samples);
  std::string name;
  if (variant.kind == OmaVariant::Kind::random) {
    name = policy_names::oma_random;
    std::mt19937_64 rng(variant.seed);
    std::shuffle(order.begin(), order.end(), rng);
  } else {
    // Simple samples (local inference already correct) go to the server first.
    name = policy_names::oma_worst_case;
    std::stable_partition(order.begin(), order.end(), [&](auto i) { return samples[i].local_correct(); });
  }
  auto r = assignment_report(std::move(name), samples, order, fit.offloaded, costs,
                             makespan_ms(samples.size(), fit.offloaded, timing, MakespanMode::pure_partition_parallel));
  r.budget_feasible = fit.feasible;
  return r;
}

std::vector<LayerProfile> parse_layer_profile(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  bool header = false;
  std::vector<LayerProfile> layers;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(" \t") == std::string::npos) continue;
    if (!header) {
      if (raw != "layer,device_ms,server_ms,output_mb") {
        throw ParseError("expected header 'layer,device_ms,server_ms,output_mb'", line);
      }
      header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (auto comma = raw.find(','); comma != std::string::npos; comma = raw.find(',', start)) {
      fields.push_back(raw.substr(start, comma - start));
      start = comma + 1;
    }
    fields.push_back(raw.substr(start));
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields", line);
    }
    LayerProfile p;
    try {
      auto index = parse_integer(fields[0]);
      if (index < 1) throw InputError("layer index must be >= 1");
      p.layer_index = static_cast<std::size_t>(index);
      p.device_ms = parse_double(fields[1]);
      p.server_ms = parse_double(fields[2]);
      p.output_mb = parse_double(fields[3]);
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(e.what(), line);
    }
    if (p.device_ms < 0.0 || p.server_ms < 0.0 || p.output_mb < 0.0) {
      throw ParseError("layer times and sizes must be non-negative", line);
    }
    if (p.layer_index != layers.size() + 1) {
      throw ParseError("layers must be numbered 1..L in order", line);
    }
    layers.push_back(p);
  }
  if (layers.empty()) {
    throw InputError("layer profile has no layers");
  }
  return layers;
}

std::vector<LayerProfile> load_layer_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open layer profile " + path.string());
  }
  return parse_layer_profile(in);
}

PartitionPlan dnn_partition_plan(std::span<const LayerProfile> layers, double input_mb, const BandwidthStats& bw,
                                 double remote_only_ms) {
  if (layers.empty()) {
    throw InputError("layer profile has no layers");
  }
  if (!(remote_only_ms >= 0.0)) {
    throw ConfigError("remote-only latency must be non-negative");
  }
  const std::size_t n_layers = layers.size();
  // suffix_server[k] = server time of layers k+1..L (0-based: layers[k..]).
  std::vector<double> suffix_server(n_layers + 1, 0.0);
  for (std::size_t k = n_layers; k-- > 0;) suffix_server[k] = suffix_server[k + 1] + layers[k].server_ms;

  PartitionPlan plan;
  plan.raw_offload_interval = comm_interval(input_mb, bw) + suffix_server[0];
  plan.candidates.push_back({0, {remote_only_ms, remote_only_ms}});

  double device = 0.0;
  for (std::size_t k = 1; k <= n_layers; ++k) {
    device += layers[k - 1].device_ms;
    TimeInterval comm = k < n_layers ? comm_interval(layers[k - 1].output_mb, bw) : TimeInterval{};
    plan.candidates.push_back({k, comm + (device + suffix_server[k])});
  }

  const auto* best = &plan.candidates.front();
  for (const auto& c : plan.candidates) {
    if (c.latency.midpoint() < best->latency.midpoint()) best = &c;
  }
  plan.split_after_layer = best->split_after_layer;
  plan.latency_interval = best->latency;
  return plan;
}

SimulationReport dnn_partition_report(const Trace& trace, CostParams costs, const TimingParams& timing) {
  auto r = full_offload(trace, costs, timing);
  r.policy_name = policy_names::dnn_partition;
  return r;
}

std::vector<SimulationReport> compare_all(const Trace& trace, const TimingParams& timing,
                                          std::span<const double> beta_grid, std::uint64_t seed) {
  std::vector<SimulationReport> reports;
  reports.reserve(beta_grid.size() * 7);
  for (double beta : beta_grid) {
    CostParams costs(beta);
    auto search = optimal_threshold(trace, costs);
    auto hi = hi_report(trace, search.policy, costs, timing);
    double budget = hi.makespan_ms;
    reports.push_back(hi);
    reports.push_back(no_offload(trace, costs, timing));
    reports.push_back(full_offload(trace, costs, timing));
    reports.push_back(omd(trace, costs, timing));
    reports.push_back(oma(trace, costs, timing, budget, OmaVariant::random(seed)));
    reports.push_back(oma(trace, costs, timing, budget, OmaVariant::worst_case()));
    reports.push_back(dnn_partition_report(trace, costs, timing));
  }
  return reports;
}

}  // namespace hisim
