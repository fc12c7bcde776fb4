#pragma once

#include <Eigen/Dense>
#include <string>

#include "rcnet/errors.hpp"
#include "rcnet/network.hpp"
#include "rcnet/panel.hpp"

namespace rcnet {

/// Iterate T(k+1) = A T(k) + P(k) from T(0) = 0 and drop the first
/// `burn_in` outputs. With inputs P(0..N-1) the result holds T(1..N)
/// minus the burned prefix, so its length is N - burn_in.
inline TimeSeriesPanel rollout(const DiscreteDynamics& dyn, const TimeSeriesPanel& inputs,
                               long burn_in = 0) {
  check_panel(inputs);
  const int m = inputs.node_count();
  const long n = inputs.sample_count();
  if (dyn.A.rows() != m || dyn.A.cols() != m)
    throw DimensionMismatch("dynamics are " + std::to_string(dyn.A.rows()) + "x" +
                            std::to_string(dyn.A.cols()) + ", inputs have " +
                            std::to_string(m) + " nodes");
  if (burn_in < 0 || burn_in >= n)
    throw DimensionMismatch("burn-in of " + std::to_string(burn_in) +
                            " leaves no samples from " + std::to_string(n) + " inputs");

  TimeSeriesPanel out;
  out.dt = dyn.dt;
  out.labels = inputs.labels;
  out.values.resize(m, n - burn_in);

  Eigen::VectorXd state = Eigen::VectorXd::Zero(m);
  for (long k = 0; k < n; ++k) {
    state = dyn.A * state + inputs.values.col(k);
    if (k >= burn_in) out.values.col(k - burn_in) = state;
  }
  if (!out.values.allFinite()) throw Error("rollout produced non-finite values");
  return out;
}

}  // namespace rcnet
