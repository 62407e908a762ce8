#include "hisim/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hisim/error.hpp"
#include "hisim/numfmt.hpp"
#include "hisim/policy.hpp"
#include "hisim/schedulers.hpp"
#include "hisim/trace.hpp"

namespace hisim::cli {

namespace {

Trace load_trace(const RunConfig& config) {
  if (config.trace.empty()) {
    throw ConfigError("--trace is required");
  }
  TraceFormat format = trace_format_from_path(config.trace);
  if (config.trace_format) {
    if (*config.trace_format == "jsonl") {
      format = TraceFormat::jsonl;
    } else if (*config.trace_format == "csv") {
      format = TraceFormat::csv;
    } else {
      throw ConfigError("unknown trace format '" + *config.trace_format + "'");
    }
  }
  return parse_trace(config.trace, format);
}

long long as_cell(std::size_t v) { return static_cast<long long>(v); }

Cell optional_cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(std::monostate{}); }

const std::vector<std::string> kReportColumns = {
    "policy", "beta", "theta", "n", "offloaded", "errors", "accuracy", "cost_beta_coefficient",
    "cost_constant", "cost", "makespan_ms", "throughput_jps", "budget_feasible"};

std::vector<Cell> report_row(const SimulationReport& r) {
  return {r.policy_name,
          r.beta,
          optional_cell(r.theta),
          as_cell(r.sample_count),
          as_cell(r.offloaded_count),
          as_cell(r.errors_total),
          r.accuracy(),
          as_cell(r.cost_beta_coefficient),
          as_cell(r.cost_constant),
          r.total_cost(),
          r.makespan_ms,
          r.throughput_jps,
          r.budget_feasible};
}

std::vector<Table> simulate_filter(const RunConfig& config, const Trace& trace, CostParams costs) {
  Table table{"filter",
              {"policy", "beta", "n", "relevant", "offloaded", "true_positives", "false_positives",
               "false_negatives", "accuracy", "zero_relevant", "cost_beta_coefficient", "cost_constant", "cost"},
              {}};
  std::vector<std::string> policies = config.policies;
  if (policies.empty()) policies = {"filter"};
  for (const auto& name : policies) {
    FilterOutcome o;
    if (name == "filter" || name == policy_names::hi) {
      o = evaluate_filter(trace, costs);
    } else if (name == policy_names::full_offload) {
      o = evaluate_filter_full_offload(trace, costs);
    } else {
      throw KindMismatch("policy '" + name + "' needs a multiclass trace");
    }
    table.rows.push_back({name == policy_names::hi ? std::string("filter") : name, costs.beta(),
                          as_cell(o.sample_count), as_cell(o.relevant_count), as_cell(o.offloaded_count),
                          as_cell(o.true_positives), as_cell(o.false_positives), as_cell(o.false_negatives),
                          o.accuracy(), o.zero_relevant(), as_cell(o.cost_beta_coefficient()),
                          as_cell(o.cost_constant()), o.total_cost()});
  }
  return {table};
}

}  // namespace

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::vector<double> parse_beta_grid(const std::string& text) {
  std::vector<double> grid;
  try {
    if (text.find(':') != std::string::npos) {
      auto a = text.find(':');
      auto b = text.find(':', a + 1);
      if (b == std::string::npos) throw ConfigError("range grid must be start:stop:step");
      double start = parse_double(text.substr(0, a));
      double stop = parse_double(text.substr(a + 1, b - a - 1));
      double step = parse_double(text.substr(b + 1));
      if (!(step > 0.0)) throw ConfigError("grid step must be positive");
      for (long i = 0;; ++i) {
        double v = start + static_cast<double>(i) * step;
        if (v > stop + step * 1e-9) break;
        // Snap to the decimal the user most likely meant (0.30000000000000004 -> 0.3).
        grid.push_back(std::round(v * 1e12) / 1e12);
      }
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) grid.push_back(parse_double(item));
    }
  } catch (const InputError& e) {
    throw ConfigError(std::string("bad beta grid: ") + e.what());
  }
  if (grid.empty()) {
    throw ConfigError("beta grid is empty");
  }
  return grid;
}

std::vector<Table> cmd_simulate(const RunConfig& config) {
  config.model.timing.validate();
  CostParams costs(config.beta);
  auto trace = load_trace(config);
  if (trace.kind() == TraceKind::binary) {
    return simulate_filter(config, trace, costs);
  }

  const auto& timing = config.model.timing;
  ThresholdPolicy policy = config.theta ? ThresholdPolicy(*config.theta) : optimal_threshold(trace, costs).policy;
  auto hi = hi_report(trace, policy, costs, timing);
  double budget = config.budget_ms.value_or(hi.makespan_ms);

  std::vector<std::string> policies = config.policies;
  if (policies.empty()) policies = {policy_names::hi};

  Table table{"reports", kReportColumns, {}};
  bool energy = config.e_local_mj.has_value() || config.e_tx_mj.has_value();
  if (energy) table.columns.push_back("energy_mj");

  for (const auto& name : policies) {
    SimulationReport r;
    if (name == policy_names::hi) {
      r = hi;
    } else if (name == policy_names::no_offload) {
      r = no_offload(trace, costs, timing);
    } else if (name == policy_names::full_offload) {
      r = full_offload(trace, costs, timing);
    } else if (name == policy_names::omd) {
      r = omd(trace, costs, timing);
    } else if (name == policy_names::oma_random) {
      r = oma(trace, costs, timing, budget, OmaVariant::random(config.seed));
    } else if (name == policy_names::oma_worst_case) {
      r = oma(trace, costs, timing, budget, OmaVariant::worst_case());
    } else if (name == policy_names::dnn_partition) {
      r = dnn_partition_report(trace, costs, timing);
    } else if (name == "filter") {
      throw KindMismatch("policy 'filter' needs a binary trace");
    } else {
      throw ConfigError("unknown policy '" + name + "'");
    }
    auto row = report_row(r);
    if (energy) {
      // Full offload and DNN partitioning skip local inference entirely.
      bool local_runs = r.policy_name == policy_names::hi || r.policy_name == policy_names::no_offload;
      std::size_t local = local_runs ? r.sample_count : r.sample_count - r.offloaded_count;
      row.push_back(energy_estimate_mj(local, 0, config.e_local_mj.value_or(0.0), 0.0) +
                    energy_estimate_mj(r.offloaded_count, r.offloaded_count, 0.0, config.e_tx_mj.value_or(0.0)));
    }
    table.rows.push_back(std::move(row));
  }
  return {table};
}

std::vector<Table> cmd_sweep_theta(const RunConfig& config) {
  CostParams costs(config.beta);
  if (!(config.bin_width > 0.0 && config.bin_width <= 1.0)) {
    throw ConfigError("bin width must lie in (0, 1]");
  }
  auto trace = load_trace(config);
  auto candidates = threshold_candidates(trace, costs);
  auto best = optimal_threshold(trace, costs);

  Table sweep{"candidates", {"theta", "offloaded", "local_errors", "remote_errors", "errors", "cost", "optimal"}, {}};
  for (const auto& c : candidates) {
    const auto& o = c.outcome;
    sweep.rows.push_back({c.theta, as_cell(o.offloaded_count), as_cell(o.local_errors), as_cell(o.remote_errors),
                          as_cell(o.cost_constant()), o.total_cost(), c.theta == best.policy.theta()});
  }

  const double w = config.bin_width;
  double ratio = 1.0 / w;
  auto bins = static_cast<std::size_t>(std::abs(ratio - std::round(ratio)) < 1e-9 ? std::round(ratio) : std::ceil(ratio));
  std::vector<std::size_t> correct(bins, 0), incorrect(bins, 0);
  for (const auto& s : trace.multiclass_samples()) {
    auto idx = static_cast<std::size_t>(std::floor(s.confidence / w));
    if (static_cast<double>(idx + 1) * w <= s.confidence) ++idx;
    if (idx > 0 && static_cast<double>(idx) * w > s.confidence) --idx;
    idx = std::min(idx, bins - 1);
    (s.local_correct() ? correct : incorrect)[idx]++;
  }
  Table hist{"histogram", {"bin_lo", "bin_hi", "correct", "incorrect"}, {}};
  for (std::size_t b = 0; b < bins; ++b) {
    hist.rows.push_back({static_cast<double>(b) * w, std::min(1.0, static_cast<double>(b + 1) * w),
                         as_cell(correct[b]), as_cell(incorrect[b])});
  }
  return {sweep, hist};
}

std::vector<Table> cmd_compare(const RunConfig& config) {
  auto trace = load_trace(config);
  auto grid = config.beta_grid.empty() ? default_beta_grid() : config.beta_grid;
  auto reports = compare_all(trace, config.model.timing, grid, config.seed);
  Table table{"comparison",
              {"policy", "beta", "theta", "throughput_jps", "accuracy", "offloaded", "errors", "makespan_ms",
               "cost_beta_coefficient", "cost_constant", "cost"},
              {}};
  for (const auto& r : reports) {
    table.rows.push_back({r.policy_name, r.beta, optional_cell(r.theta), r.throughput_jps, r.accuracy(),
                          as_cell(r.offloaded_count), as_cell(r.errors_total), r.makespan_ms,
                          as_cell(r.cost_beta_coefficient), as_cell(r.cost_constant), r.total_cost()});
  }
  return {table};
}

std::vector<Table> cmd_fault(const RunConfig& config) {
  if (config.series.empty()) {
    throw ConfigError("--series is required");
  }
  config.detector.validate();
  std::string format = config.series_format.value_or(config.series.extension() == ".csv" ? "csv" : "int16");
  VibrationSeries series;
  if (format == "csv") {
    series = read_series_csv(config.series, config.sample_rate_hz);
  } else if (format == "int16") {
    series = read_series_int16(config.series, config.sample_rate_hz);
  } else {
    throw ConfigError("unknown series format '" + format + "' (expected csv or int16)");
  }
  double raw = raw_bandwidth_bps(config.sensors, series.sample_rate_hz, config.bytes_per_sample);
  auto averages = windowed_averages(series, config.detector);
  auto decisions = classify_windows(averages, config.detector);
  double fraction = offload_fraction(decisions);

  Table windows{"windows", {"index", "average", "decision"}, {}};
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < averages.size(); ++i) {
    bool normal = decisions[i] == WindowState::normal;
    flagged += normal ? 0 : 1;
    windows.rows.push_back({as_cell(i), averages[i], std::string(normal ? "normal" : "not_normal")});
  }
  Table summary{"summary", {"metric", "value"}, {}};
  summary.rows.push_back({std::string("windows"), static_cast<double>(averages.size())});
  summary.rows.push_back({std::string("not_normal_windows"), static_cast<double>(flagged)});
  summary.rows.push_back({std::string("offload_fraction"), fraction});
  summary.rows.push_back({std::string("raw_bandwidth_bps"), raw});
  summary.rows.push_back({std::string("transmitted_bps"), raw * fraction});
  summary.rows.push_back({std::string("bandwidth_saved_bps"), raw * (1.0 - fraction)});
  return {windows, summary};
}

std::vector<Table> cmd_partition(const RunConfig& config) {
  if (config.profile.empty()) {
    throw ConfigError("--profile is required");
  }
  auto layers = load_layer_profile(config.profile);
  auto plan = dnn_partition_plan(layers, config.input_mb, config.model.bandwidth,
                                 config.remote_only_ms.value_or(config.model.timing.t_offload_ms));
  Table splits{"splits", {"split", "lo_ms", "hi_ms", "mid_ms", "argmin"}, {}};
  for (const auto& c : plan.candidates) {
    splits.rows.push_back({as_cell(c.split_after_layer), c.latency.lo_ms, c.latency.hi_ms, c.latency.midpoint(),
                           c.split_after_layer == plan.split_after_layer});
  }
  Table summary{"summary", {"metric", "value"}, {}};
  summary.rows.push_back({std::string("argmin_split"), static_cast<double>(plan.split_after_layer)});
  summary.rows.push_back({std::string("argmin_lo_ms"), plan.latency_interval.lo_ms});
  summary.rows.push_back({std::string("argmin_hi_ms"), plan.latency_interval.hi_ms});
  summary.rows.push_back({std::string("raw_offload_lo_ms"), plan.raw_offload_interval.lo_ms});
  summary.rows.push_back({std::string("raw_offload_hi_ms"), plan.raw_offload_interval.hi_ms});
  return {splits, summary};
}

namespace {

struct Flags {
  std::string trace, series, profile, config_file, out, hist_out, format = "csv", beta_grid;
  std::optional<double> t_local, t_offload, bw_mean, bw_sd;
  std::optional<int> bw_n;
};

void add_common(CLI::App* sub, RunConfig& cfg, Flags& flags) {
  sub->add_option("--config", flags.config_file, "TOML-style model config file");
  sub->add_option("--seed", cfg.seed, "seed for all randomness");
  sub->add_option("--out", flags.out, "output file (default stdout)");
  sub->add_option("--format", flags.format, "csv or json");
  sub->add_option("--t-local-ms", flags.t_local, "local inference time per sample");
  sub->add_option("--t-offload-ms", flags.t_offload, "offload + remote inference time per sample");
  sub->add_option("--bw-mean", flags.bw_mean, "mean bandwidth, MB/s");
  sub->add_option("--bw-sd", flags.bw_sd, "bandwidth standard deviation, MB/s");
  sub->add_option("--bw-n", flags.bw_n, "number of bandwidth experiments");
}

void add_trace(CLI::App* sub, RunConfig& cfg, Flags& flags) {
  sub->add_option("--trace", flags.trace, "trace file (.jsonl or .csv)")->required();
  sub->add_option("--trace-format", cfg.trace_format, "jsonl or csv (default from extension)");
}

void finalize(RunConfig& cfg, const Flags& flags) {
  cfg.trace = flags.trace;
  cfg.series = flags.series;
  cfg.profile = flags.profile;
  if (!flags.out.empty()) cfg.out = flags.out;
  if (!flags.hist_out.empty()) cfg.hist_out = flags.hist_out;
  cfg.format = parse_output_format(flags.format);
  if (!flags.beta_grid.empty()) cfg.beta_grid = parse_beta_grid(flags.beta_grid);
  if (!flags.config_file.empty()) cfg.model = load_model_config(flags.config_file, cfg.model);
  if (flags.t_local) cfg.model.timing.t_local_ms = *flags.t_local;
  if (flags.t_offload) cfg.model.timing.t_offload_ms = *flags.t_offload;
  if (flags.bw_mean) cfg.model.bandwidth.mean_mb_per_s = *flags.bw_mean;
  if (flags.bw_sd) cfg.model.bandwidth.sd_mb_per_s = *flags.bw_sd;
  if (flags.bw_n) cfg.model.bandwidth.n_experiments = *flags.bw_n;
  cfg.model.timing.validate();
  cfg.model.bandwidth.validate();
}

void emit(const RunConfig& cfg, const std::vector<Table>& tables, std::ostream& out) {
  std::vector<Table> main_tables = tables;
  if (cfg.hist_out && cfg.subcommand == "sweep-theta") {
    std::ofstream hist(*cfg.hist_out, std::ios::binary | std::ios::trunc);
    if (!hist) throw InputError("cannot write " + cfg.hist_out->string());
    write_tables(hist, std::span<const Table>(&tables.back(), 1), cfg.format);
    main_tables.pop_back();
  }
  if (cfg.out) {
    std::ofstream file(*cfg.out, std::ios::binary | std::ios::trunc);
    if (!file) throw InputError("cannot write " + cfg.out->string());
    write_tables(file, main_tables, cfg.format);
  } else {
    write_tables(out, main_tables, cfg.format);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trace-driven hierarchical inference simulator"};
  app.name("hisim");
  app.require_subcommand(1);

  RunConfig cfg;
  Flags flags;

  auto* simulate = app.add_subcommand("simulate", "run policies on a trace and report cost, accuracy, makespan");
  add_trace(simulate, cfg, flags);
  add_common(simulate, cfg, flags);
  simulate->add_option("--beta", cfg.beta, "offload cost per sample, in [0,1)");
  simulate->add_option("--theta", cfg.theta, "fixed threshold instead of the optimal one");
  simulate->add_option("--policy", cfg.policies,
                       "hi, no-offload, full-offload, omd, oma-random, oma-worst-case, dnn-partition, filter")
      ->delimiter(',');
  simulate->add_option("--budget-ms", cfg.budget_ms, "OMA time budget (default: HI makespan)");
  simulate->add_option("--e-local-mj", cfg.e_local_mj, "energy per local inference");
  simulate->add_option("--e-tx-mj", cfg.e_tx_mj, "energy per offloaded sample");

  auto* sweep = app.add_subcommand("sweep-theta", "cost for every candidate threshold plus a confidence histogram");
  add_trace(sweep, cfg, flags);
  add_common(sweep, cfg, flags);
  sweep->add_option("--beta", cfg.beta, "offload cost per sample, in [0,1)");
  sweep->add_option("--bin-width", cfg.bin_width, "histogram bin width");
  sweep->add_option("--hist-out", flags.hist_out, "write the histogram to its own file");

  auto* compare = app.add_subcommand("compare", "compare HI against the baselines over a beta grid");
  add_trace(compare, cfg, flags);
  add_common(compare, cfg, flags);
  compare->add_option("--beta-grid", flags.beta_grid, "comma list or start:stop:step (default 0:0.9:0.1)");

  auto* fault = app.add_subcommand("fault", "windowed-average fault detector over a vibration series");
  add_common(fault, cfg, flags);
  fault->add_option("--series", flags.series, "series file (.csv amplitudes or raw int16 LE)")->required();
  fault->add_option("--series-format", cfg.series_format, "csv or int16 (default from extension)");
  fault->add_option("--rate", cfg.sample_rate_hz, "sample rate, Hz");
  fault->add_option("--window", cfg.detector.window, "samples per window");
  fault->add_option("--threshold", cfg.detector.threshold, "average at or above which a window is not normal");
  fault->add_option("--sensors", cfg.sensors, "sensor count for bandwidth arithmetic");
  fault->add_option("--bytes-per-sample", cfg.bytes_per_sample, "bytes per stored sample");

  auto* partition = app.add_subcommand("partition", "latency of every DNN split point from a layer profile");
  add_common(partition, cfg, flags);
  partition->add_option("--profile", flags.profile, "layer profile CSV")->required();
  partition->add_option("--input-mb", cfg.input_mb, "raw input size, MB");
  partition->add_option("--remote-only-ms", cfg.remote_only_ms, "measured full-offload latency (default t_offload)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "hisim: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    finalize(cfg, flags);
    std::vector<Table> tables;
    if (simulate->parsed()) {
      cfg.subcommand = "simulate";
      tables = cmd_simulate(cfg);
    } else if (sweep->parsed()) {
      cfg.subcommand = "sweep-theta";
      tables = cmd_sweep_theta(cfg);
    } else if (compare->parsed()) {
      cfg.subcommand = "compare";
      tables = cmd_compare(cfg);
    } else if (fault->parsed()) {
      cfg.subcommand = "fault";
      tables = cmd_fault(cfg);
    } else {
      cfg.subcommand = "partition";
      tables = cmd_partition(cfg);
    }
    emit(cfg, tables, out);
  } catch (const ConfigError& e) {
    err << "hisim: " << e.what() << '\n';
    return kConfigError;
  } catch (const InputError& e) {
    err << "hisim: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}

}  // namespace hisim::cli
