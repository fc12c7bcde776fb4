#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rcnet/errors.hpp"
#include "rcnet/panel.hpp"

namespace rcnet {

/// Exogenous input process for one node: white Gaussian innovations with the
/// given variance, optionally shaped by a single-pole AR filter or an FIR
/// filter. At most one coloring may be set.
struct NodeNoiseSpec {
  double variance = 1.0;
  double ar_coefficient = 0.0;   // p(k) = a p(k-1) + w(k); zero means off
  std::vector<double> fir;       // p(k) = sum_t fir[t] w(k-t); empty means off
};

struct NoisePlan {
  std::vector<NodeNoiseSpec> nodes;
  std::uint64_t seed = 0;

  static NoisePlan white(int node_count, double variance, std::uint64_t seed) {
    NoisePlan plan;
    plan.nodes.assign(node_count, NodeNoiseSpec{variance, 0.0, {}});
    plan.seed = seed;
    return plan;
  }

  static NoisePlan ar1(int node_count, double coefficient, double variance,
                       std::uint64_t seed) {
    NoisePlan plan;
    plan.nodes.assign(node_count, NodeNoiseSpec{variance, coefficient, {}});
    plan.seed = seed;
    return plan;
  }

  static NoisePlan fir(int node_count, std::vector<double> taps, double variance,
                       std::uint64_t seed) {
    NoisePlan plan;
    plan.nodes.assign(node_count, NodeNoiseSpec{variance, 0.0, std::move(taps)});
    plan.seed = seed;
    return plan;
  }
};

namespace detail {

inline std::mt19937_64 node_engine(std::uint64_t seed, int node) {
  // Distinct nodes draw from independent, reproducible substreams.
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(node), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

inline int ar_warmup_steps(double a) {
  if (a == 0.0) return 0;
  // Enough steps for the start-up transient to decay below 1e-8.
  const double steps = std::ceil(-18.42 / std::log(std::abs(a)));
  return std::min(100000, std::max(100, static_cast<int>(steps)));
}

}  // namespace detail

/// Draw one panel of exogenous inputs. Deterministic in (plan.seed, node index,
/// sample count); each node uses its own stream.
inline TimeSeriesPanel generate_inputs(const NoisePlan& plan, int node_count,
                                       long sample_count) {
  if (static_cast<int>(plan.nodes.size()) != node_count)
    throw DimensionMismatch("noise plan covers " + std::to_string(plan.nodes.size()) +
                            " nodes, panel needs " + std::to_string(node_count));
  if (sample_count < 1) throw Error("sample count must be at least one");

  TimeSeriesPanel panel;
  panel.values.resize(node_count, sample_count);
  panel.dt = 1.0;
  panel.labels.resize(node_count);

  for (int j = 0; j < node_count; ++j) {
    const NodeNoiseSpec& spec = plan.nodes[j];
    panel.labels[j] = "u" + std::to_string(j + 1);
    if (!(spec.variance > 0.0))
      throw Error("node " + std::to_string(j) + ": variance must be positive");
    if (spec.ar_coefficient != 0.0 && !spec.fir.empty())
      throw Error("node " + std::to_string(j) + ": choose AR or FIR coloring, not both");
    if (std::abs(spec.ar_coefficient) >= 1.0)
      throw NonStationaryFilter("node " + std::to_string(j) + ": AR coefficient " +
                                std::to_string(spec.ar_coefficient) +
                                " has magnitude >= 1");

    auto engine = detail::node_engine(plan.seed, j);
    std::normal_distribution<double> gauss(0.0, std::sqrt(spec.variance));

    if (!spec.fir.empty()) {
      const long pre = static_cast<long>(spec.fir.size()) - 1;
      std::vector<double> w(pre + sample_count);
      for (double& x : w) x = gauss(engine);
      for (long k = 0; k < sample_count; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t < spec.fir.size(); ++t)
          acc += spec.fir[t] * w[pre + k - static_cast<long>(t)];
        panel.values(j, k) = acc;
      }
    } else if (spec.ar_coefficient != 0.0) {
      const int warm = detail::ar_warmup_steps(spec.ar_coefficient);
      double state = 0.0;
      for (int k = 0; k < warm; ++k) state = spec.ar_coefficient * state + gauss(engine);
      for (long k = 0; k < sample_count; ++k) {
        state = spec.ar_coefficient * state + gauss(engine);
        panel.values(j, k) = state;
      }
    } else {
      for (long k = 0; k < sample_count; ++k) panel.values(j, k) = gauss(engine);
    }
  }
  return panel;
}

}  // namespace rcnet
