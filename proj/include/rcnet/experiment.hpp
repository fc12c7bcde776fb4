#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "rcnet/baselines.hpp"
#include "rcnet/io.hpp"
#include "rcnet/network.hpp"
#include "rcnet/noise.hpp"
#include "rcnet/simulate.hpp"
#include "rcnet/topology.hpp"

namespace rcnet {

// ===========================================================================
// Run configuration
// ===========================================================================

struct NoiseConfig {
  std::string type = "white";  // white | ar1 | fir
  double variance = 1.0;
  double ar_coefficient = 0.5;
  std::vector<double> fir;
  std::uint64_t seed = 1;

  NoisePlan plan(int node_count) const {
    if (type == "white") return NoisePlan::white(node_count, variance, seed);
    if (type == "ar1") return NoisePlan::ar1(node_count, ar_coefficient, variance, seed);
    if (type == "fir") {
      if (fir.empty()) throw ConfigError("fir noise needs at least one tap");
      return NoisePlan::fir(node_count, fir, variance, seed);
    }
    throw ConfigError("unknown noise type '" + type + "'");
  }
};

struct SweepConfig {
  std::vector<std::string> methods{"wiener", "wiener_reg", "regression", "glasso"};
  std::vector<std::string> inputs{"white", "ar1"};
  std::vector<long> samples{1000, 10000, 100000};
  int trials = 10;
  std::uint64_t base_seed = 1000;
  int workers = 1;
  std::vector<double> thresholds;  // baseline threshold sweep; empty uses defaults in code
};

struct RunConfig {
  std::string network_path;
  double dt = 1.0;
  long samples = 100000;
  long burn_in = 1000;
  NoiseConfig noise;
  LearnOptions learn;
  bool gamma_auto = false;  // replace learn.gamma with the low-sample default
  double regression_gamma = 0.0;
  double regression_threshold = 0.05;
  double glasso_lambda = 0.05;
  double glasso_threshold = 0.05;
  SweepConfig sweep;
};

inline std::vector<double> default_threshold_sweep() {
  // Log-spaced 0.005 .. 0.5; shared by both baselines when comparing curves.
  std::vector<double> out;
  for (int t = 0; t < 25; ++t)
    out.push_back(0.005 * std::pow(100.0, t / 24.0));
  return out;
}

// ===========================================================================
// Config file parsing
// ===========================================================================

namespace detail {

template <class T>
void maybe_get(const Json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

inline void parse_noise(const Json& j, NoiseConfig& noise) {
  maybe_get(j, "type", noise.type);
  maybe_get(j, "variance", noise.variance);
  maybe_get(j, "ar_coefficient", noise.ar_coefficient);
  maybe_get(j, "fir", noise.fir);
  maybe_get(j, "seed", noise.seed);
}

inline void parse_learn(const Json& j, LearnOptions& learn) {
  maybe_get(j, "lag_order", learn.lag_order);
  maybe_get(j, "gamma", learn.gamma);
  maybe_get(j, "rho", learn.rho);
  maybe_get(j, "tau", learn.tau);
  maybe_get(j, "phase_floor", learn.phase_floor);
  maybe_get(j, "grid_size", learn.grid_size);
  maybe_get(j, "workers", learn.workers);
}

}  // namespace detail

inline RunConfig parse_config(const Json& j) {
  RunConfig cfg;
  detail::maybe_get(j, "network", cfg.network_path);
  detail::maybe_get(j, "dt", cfg.dt);
  detail::maybe_get(j, "samples", cfg.samples);
  detail::maybe_get(j, "burn_in", cfg.burn_in);
  if (j.contains("noise")) detail::parse_noise(j.at("noise"), cfg.noise);
  if (j.contains("learn")) detail::parse_learn(j.at("learn"), cfg.learn);
  if (j.contains("baselines")) {
    const Json& jb = j.at("baselines");
    detail::maybe_get(jb, "regression_gamma", cfg.regression_gamma);
    detail::maybe_get(jb, "regression_threshold", cfg.regression_threshold);
    detail::maybe_get(jb, "glasso_lambda", cfg.glasso_lambda);
    detail::maybe_get(jb, "glasso_threshold", cfg.glasso_threshold);
  }
  if (j.contains("sweep")) {
    const Json& js = j.at("sweep");
    detail::maybe_get(js, "methods", cfg.sweep.methods);
    detail::maybe_get(js, "inputs", cfg.sweep.inputs);
    detail::maybe_get(js, "samples", cfg.sweep.samples);
    detail::maybe_get(js, "trials", cfg.sweep.trials);
    detail::maybe_get(js, "base_seed", cfg.sweep.base_seed);
    detail::maybe_get(js, "workers", cfg.sweep.workers);
    detail::maybe_get(js, "thresholds", cfg.sweep.thresholds);
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(detail::read_json_file(path));
}

inline Json to_json(const RunConfig& cfg) {
  return Json{
      {"network", cfg.network_path},
      {"dt", cfg.dt},
      {"samples", cfg.samples},
      {"burn_in", cfg.burn_in},
      {"noise",
       {{"type", cfg.noise.type},
        {"variance", cfg.noise.variance},
        {"ar_coefficient", cfg.noise.ar_coefficient},
        {"fir", cfg.noise.fir},
        {"seed", cfg.noise.seed}}},
      {"learn",
       {{"lag_order", cfg.learn.lag_order},
        {"gamma", cfg.learn.gamma},
        {"rho", cfg.learn.rho},
        {"tau", cfg.learn.tau},
        {"phase_floor", cfg.learn.phase_floor},
        {"grid_size", cfg.learn.grid_size},
        {"workers", cfg.learn.workers}}},
      {"baselines",
       {{"regression_gamma", cfg.regression_gamma},
        {"regression_threshold", cfg.regression_threshold},
        {"glasso_lambda", cfg.glasso_lambda},
        {"glasso_threshold", cfg.glasso_threshold}}},
      {"sweep",
       {{"methods", cfg.sweep.methods},
        {"inputs", cfg.sweep.inputs},
        {"samples", cfg.sweep.samples},
        {"trials", cfg.sweep.trials},
        {"base_seed", cfg.sweep.base_seed},
        {"workers", cfg.sweep.workers},
        {"thresholds", cfg.sweep.thresholds}}}};
}

// ===========================================================================
// Trials
// ===========================================================================

/// Draw inputs and roll the network forward; the returned panel carries the
/// zone labels.
inline TimeSeriesPanel simulate_panel(const RcNetwork& net, const DiscreteDynamics& dyn,
                                      const NoiseConfig& noise, long samples, long burn_in) {
  if (samples < 1) throw ConfigError("sample count must be positive");
  if (burn_in < 0) throw ConfigError("burn-in must be non-negative");
  const TimeSeriesPanel inputs =
      generate_inputs(noise.plan(net.node_count()), net.node_count(), samples + burn_in);
  TimeSeriesPanel panel = rollout(dyn, inputs, burn_in);
  panel.labels = net.labels();
  return panel;
}

struct TrialResult {
  std::optional<double> error;
  double best_threshold = 0.0;  // baselines only
  double wall_ms = 0.0;
  std::string status = "ok";
};

/// Run one method on one panel against the truth edge set. Baselines report
/// their best error over the threshold sweep, which keeps the comparison
/// generous toward them.
inline TrialResult run_method_trial(const std::string& method, const TimeSeriesPanel& panel,
                                    const EdgeSet& truth, const RunConfig& cfg) {
  TrialResult result;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (method == "wiener" || method == "wiener_reg") {
      LearnOptions opts = cfg.learn;
      if (method == "wiener_reg")
        opts.gamma = low_sample_gamma(panel.node_count(), opts.lag_order, panel.sample_count());
      const GraphEstimate est = learn_topology(panel, opts, truth);
      result.error = est.error;
    } else if (method == "regression" || method == "glasso") {
      std::vector<double> thresholds =
          cfg.sweep.thresholds.empty() ? default_threshold_sweep() : cfg.sweep.thresholds;
      double best = std::numeric_limits<double>::infinity();
      double best_thr = thresholds.front();
      if (method == "regression") {
        const RegressionFit fit =
            fit_regression(panel, cfg.regression_gamma, cfg.regression_threshold);
        for (double thr : thresholds) {
          const double err = reconstruction_error(fit.edges_at(thr), truth);
          if (err < best) {
            best = err;
            best_thr = thr;
          }
        }
      } else {
        const GlassoFit fit = fit_glasso(panel, cfg.glasso_lambda, cfg.glasso_threshold);
        for (double thr : thresholds) {
          const double err = reconstruction_error(fit.edges_at(thr), truth);
          if (err < best) {
            best = err;
            best_thr = thr;
          }
        }
      }
      result.error = best;
      result.best_threshold = best_thr;
    } else {
      throw ConfigError("unknown method '" + method + "'");
    }
  } catch (const Error& e) {
    result.status = e.what();
  }
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return result;
}

// ===========================================================================
// Sweeps
// ===========================================================================

struct SweepRow {
  std::string method;
  std::string input;
  long samples = 0;
  std::uint64_t seed = 0;
  TrialResult result;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  /// Median error over the trials of one cell; failed trials are skipped.
  std::optional<double> median_error(const std::string& method, const std::string& input,
                                     long samples) const {
    std::vector<double> errs;
    for (const SweepRow& r : rows)
      if (r.method == method && r.input == input && r.samples == samples && r.result.error)
        errs.push_back(*r.result.error);
    if (errs.empty()) return std::nullopt;
    std::sort(errs.begin(), errs.end());
    const std::size_t n = errs.size();
    return n % 2 ? errs[n / 2] : 0.5 * (errs[n / 2 - 1] + errs[n / 2]);
  }
};

/// Full grid of (input type, sample count, seed): each simulation is shared
/// by all methods, and independent trials spread over the worker pool.
inline SweepResult run_sweep(const RcNetwork& net, const RunConfig& cfg,
                             std::ostream* log = nullptr) {
  const DiscreteDynamics dyn = discretize(net, cfg.dt);
  const EdgeSet truth = true_edge_set(net);

  struct Job {
    std::string input;
    long samples = 0;
    std::uint64_t seed = 0;
  };
  std::vector<Job> jobs;
  for (const std::string& input : cfg.sweep.inputs)
    for (long n : cfg.sweep.samples)
      for (int t = 0; t < cfg.sweep.trials; ++t)
        jobs.push_back({input, n, cfg.sweep.base_seed + static_cast<std::uint64_t>(t)});

  std::vector<std::vector<SweepRow>> per_job(jobs.size());
  std::mutex log_mutex;

  auto run_job = [&](std::size_t idx) {
    const Job& job = jobs[idx];
    NoiseConfig noise = cfg.noise;
    noise.type = job.input;
    noise.seed = job.seed;
    TimeSeriesPanel panel;
    std::string sim_failure;
    try {
      panel = simulate_panel(net, dyn, noise, job.samples, cfg.burn_in);
    } catch (const Error& e) {
      sim_failure = e.what();
    }
    for (const std::string& method : cfg.sweep.methods) {
      SweepRow row{method, job.input, job.samples, job.seed, {}};
      if (sim_failure.empty()) {
        row.result = run_method_trial(method, panel, truth, cfg);
      } else {
        row.result.status = sim_failure;
      }
      per_job[idx].push_back(std::move(row));
    }
    if (log) {
      std::lock_guard<std::mutex> lock(log_mutex);
      *log << "sweep: " << job.input << " n=" << job.samples << " seed=" << job.seed
           << " done\n";
    }
  };

  int workers = cfg.sweep.workers;
  if (workers == 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (workers == 1) {
    for (std::size_t idx = 0; idx < jobs.size(); ++idx) run_job(idx);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t idx = next.fetch_add(1);
          if (idx >= jobs.size()) break;
          run_job(idx);
        }
      });
    for (auto& t : pool) t.join();
  }

  SweepResult result;
  for (auto& rows : per_job)
    for (auto& row : rows) result.rows.push_back(std::move(row));
  return result;
}

// ===========================================================================
// Result files
// ===========================================================================

inline void write_sweep_rows(const SweepResult& sweep, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "method,input,samples,seed,error,best_threshold,wall_ms,status\n";
  for (const SweepRow& r : sweep.rows) {
    out << r.method << ',' << r.input << ',' << r.samples << ',' << r.seed << ',';
    if (r.result.error) out << detail::format_double(*r.result.error, 12);
    out << ',';
    if (r.result.best_threshold > 0.0) out << detail::format_double(r.result.best_threshold, 12);
    out << ',' << detail::format_double(r.result.wall_ms, 6) << ','
        << (r.result.status == "ok" ? "ok" : "failed: " + r.result.status) << '\n';
  }
}

inline void write_sweep_medians(const SweepResult& sweep, const RunConfig& cfg,
                                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "method,input,samples,median_error,trials,failures\n";
  for (const std::string& method : cfg.sweep.methods)
    for (const std::string& input : cfg.sweep.inputs)
      for (long n : cfg.sweep.samples) {
        int trials = 0, failures = 0;
        for (const SweepRow& r : sweep.rows)
          if (r.method == method && r.input == input && r.samples == n) {
            ++trials;
            if (!r.result.error) ++failures;
          }
        out << method << ',' << input << ',' << n << ',';
        if (const auto med = sweep.median_error(method, input, n))
          out << detail::format_double(*med, 12);
        out << ',' << trials << ',' << failures << '\n';
      }
}

}  // namespace rcnet
