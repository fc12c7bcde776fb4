#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "rcnet/errors.hpp"

namespace rcnet {

struct QuadraticSolveInfo {
  int sweeps = 0;
  bool converged = true;
  bool ridge_applied = false;
  std::vector<double> objectives;  // one value per coordinate descent sweep
};

namespace detail {

inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace detail

/// Minimize h' G h - 2 b' h exactly via an LDLT factorization. If G is close
/// to singular the diagonal is lifted by 1e-10 * trace(G) and the solve is
/// repeated.
inline Eigen::VectorXd solve_quadratic(Eigen::MatrixXd G, const Eigen::VectorXd& b,
                                       QuadraticSolveInfo* info = nullptr) {
  if (G.rows() != G.cols() || G.rows() != b.size())
    throw DimensionMismatch("quadratic solve needs square G matching b");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  const Eigen::VectorXd d = ldlt.vectorD();
  const double dmax = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  const bool near_singular = ldlt.info() != Eigen::Success || d.minCoeff() <= 0.0 ||
                             d.minCoeff() <= 1e-12 * dmax;
  if (near_singular) {
    G.diagonal().array() += 1e-10 * G.trace();
    ldlt.compute(G);
    if (info) info->ridge_applied = true;
  }
  Eigen::VectorXd h = ldlt.solve(b);
  if (!h.allFinite()) throw SolverDiverged("normal equations produced non-finite coefficients");
  return h;
}

/// Minimize h' G h - 2 b' h + gamma * ||h||_1 by cyclic coordinate descent
/// with soft thresholding. The objective must never increase from one sweep
/// to the next; a rise beyond rounding noise aborts the solve.
inline Eigen::VectorXd solve_l1_quadratic(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                                          double gamma, QuadraticSolveInfo* info = nullptr,
                                          double tol = 1e-8, int max_sweeps = 10000) {
  if (G.rows() != G.cols() || G.rows() != b.size())
    throw DimensionMismatch("coordinate descent needs square G matching b");
  if (!(gamma >= 0.0)) throw Error("l1 weight must be non-negative");

  const int d = static_cast<int>(b.size());
  Eigen::VectorXd h = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(d);  // q = G h, kept incrementally

  auto objective = [&]() { return h.dot(q) - 2.0 * b.dot(h) + gamma * h.lpNorm<1>(); };

  double prev = objective();
  bool converged = false;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double max_step = 0.0;
    for (int c = 0; c < d; ++c) {
      const double diag = G(c, c);
      if (diag <= 0.0) continue;  // degenerate coordinate, leave at zero
      const double rho = b(c) - (q(c) - diag * h(c));
      const double next = detail::soft_threshold(rho, 0.5 * gamma) / diag;
      const double step = next - h(c);
      if (step != 0.0) {
        q += G.col(c) * step;
        h(c) = next;
        max_step = std::max(max_step, std::abs(step));
      }
    }
    const double now = objective();
    if (!std::isfinite(now)) throw SolverDiverged("coordinate descent objective is not finite");
    if (now > prev + 1e-10 * (1.0 + std::abs(prev)))
      throw SolverDiverged("coordinate descent objective increased");
    if (info) info->objectives.push_back(now);
    prev = now;
    if (max_step < tol) {
      converged = true;
      ++sweep;
      break;
    }
  }
  if (info) {
    info->sweeps = sweep;
    info->converged = converged;
  }
  return h;
}

}  // namespace rcnet
