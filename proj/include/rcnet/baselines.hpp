#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "rcnet/edge_set.hpp"
#include "rcnet/errors.hpp"
#include "rcnet/panel.hpp"
#include "rcnet/solver.hpp"

namespace rcnet {

// ===========================================================================
// One-step-ahead regression
// ===========================================================================

/// Lag-1 autoregression of every node on the previous snapshot of all nodes,
/// with an optional L1 penalty. coefficients(j, i) predicts node j from node
/// i one step earlier; the self term is fitted but never yields an edge.
struct RegressionFit {
  Eigen::MatrixXd coefficients;
  double gamma = 0.0;
  double threshold = 0.05;

  /// Unordered pair kept when either direction exceeds the threshold.
  EdgeSet edges() const { return edges_at(threshold); }

  EdgeSet edges_at(double thr) const {
    EdgeSet out;
    const int m = static_cast<int>(coefficients.rows());
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if (std::abs(coefficients(a, b)) > thr || std::abs(coefficients(b, a)) > thr)
          out.insert(a, b);
    return out;
  }
};

inline RegressionFit fit_regression(const TimeSeriesPanel& panel, double gamma = 0.0,
                                    double threshold = 0.05) {
  check_panel(panel);
  const int m = panel.node_count();
  const long n = panel.sample_count();
  if (n < 2) throw InsufficientSamples("lag-1 regression needs at least two samples");
  if (!(gamma >= 0.0)) throw Error("gamma must be non-negative");

  Eigen::MatrixXd v = panel.values;
  v.colwise() -= v.rowwise().mean().eval();

  const long K = n - 1;
  const Eigen::MatrixXd past = v.leftCols(K);
  const Eigen::MatrixXd next = v.rightCols(K);
  const Eigen::MatrixXd G = (past * past.transpose()) / static_cast<double>(K);
  const Eigen::MatrixXd B = (next * past.transpose()) / static_cast<double>(K);

  RegressionFit fit;
  fit.gamma = gamma;
  fit.threshold = threshold;
  fit.coefficients.resize(m, m);
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXd bj = B.row(j).transpose();
    fit.coefficients.row(j) =
        (gamma > 0.0 ? solve_l1_quadratic(G, bj, gamma) : solve_quadratic(G, bj)).transpose();
  }
  return fit;
}

// ===========================================================================
// Graphical lasso
// ===========================================================================

/// Sparse inverse covariance of the panel treated as i.i.d. snapshots. The
/// time structure is deliberately ignored; that is the point of comparison.
struct GlassoFit {
  Eigen::MatrixXd sample_covariance;
  Eigen::MatrixXd precision;
  double lambda = 0.05;
  double threshold = 0.05;
  int sweeps = 0;

  EdgeSet edges() const { return edges_at(threshold); }

  EdgeSet edges_at(double thr) const {
    EdgeSet out;
    const int m = static_cast<int>(precision.rows());
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if (std::abs(precision(a, b)) > thr) out.insert(a, b);
    return out;
  }
};

/// Block coordinate descent on the covariance estimate W = S + lambda I,
/// cycling a lasso over each column until the largest entry change in a full
/// sweep drops below 1e-6.
inline GlassoFit fit_glasso_from_covariance(const Eigen::MatrixXd& S, double lambda,
                                            double threshold = 0.05, int max_sweeps = 10000) {
  if (S.rows() != S.cols()) throw DimensionMismatch("covariance must be square");
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  const int m = static_cast<int>(S.rows());

  GlassoFit fit;
  fit.sample_covariance = S;
  fit.lambda = lambda;
  fit.threshold = threshold;

  if (m == 1) {
    fit.precision = Eigen::MatrixXd::Constant(1, 1, 1.0 / (S(0, 0) + lambda));
    return fit;
  }

  Eigen::MatrixXd W = S;
  W.diagonal().array() += lambda;
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(m - 1, m);

  std::vector<int> rest(m - 1);
  bool done = false;
  int sweep = 0;
  for (; sweep < max_sweeps && !done; ++sweep) {
    double max_change = 0.0;
    for (int j = 0; j < m; ++j) {
      int r = 0;
      for (int i = 0; i < m; ++i)
        if (i != j) rest[r++] = i;
      const Eigen::MatrixXd W11 = W(rest, rest);
      const Eigen::VectorXd s12 = S(rest, j);
      // Half the lasso objective is folded into the kernel's scaling.
      beta.col(j) = solve_l1_quadratic(W11, s12, 2.0 * lambda, nullptr, 1e-10);
      const Eigen::VectorXd w12 = W11 * beta.col(j);
      for (int r2 = 0; r2 < m - 1; ++r2) {
        const int i = rest[r2];
        max_change = std::max(max_change, std::abs(W(i, j) - w12(r2)));
        W(i, j) = w12(r2);
        W(j, i) = w12(r2);
      }
    }
    done = max_change < 1e-6;
  }
  if (!done)
    throw NonConvergence("graphical lasso did not settle within " +
                         std::to_string(max_sweeps) + " sweeps");
  fit.sweeps = sweep;

  fit.precision.resize(m, m);
  for (int j = 0; j < m; ++j) {
    int r = 0;
    for (int i = 0; i < m; ++i)
      if (i != j) rest[r++] = i;
    const double denom = W(j, j) - W(rest, j).dot(beta.col(j));
    if (!(denom > 0.0)) throw SolverDiverged("graphical lasso lost positive definiteness");
    fit.precision(j, j) = 1.0 / denom;
    for (int r2 = 0; r2 < m - 1; ++r2)
      fit.precision(rest[r2], j) = -beta(r2, j) / denom;
  }
  fit.precision = ((fit.precision + fit.precision.transpose()) / 2.0).eval();
  return fit;
}

inline GlassoFit fit_glasso(const TimeSeriesPanel& panel, double lambda = 0.05,
                            double threshold = 0.05) {
  check_panel(panel);
  const long n = panel.sample_count();
  if (n < 2) throw InsufficientSamples("covariance needs at least two samples");
  Eigen::MatrixXd v = panel.values;
  v.colwise() -= v.rowwise().mean().eval();
  const Eigen::MatrixXd S = (v * v.transpose()) / static_cast<double>(n);
  return fit_glasso_from_covariance(S, lambda, threshold);
}

}  // namespace rcnet
