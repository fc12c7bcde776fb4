#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "rcnet/errors.hpp"
#include "rcnet/panel.hpp"
#include "rcnet/solver.hpp"

namespace rcnet {

// ===========================================================================
// Frequency grid
// ===========================================================================

/// Strictly increasing angular frequencies inside [0, pi].
struct FrequencyGrid {
  std::vector<double> omegas;

  explicit FrequencyGrid(std::vector<double> points) : omegas(std::move(points)) {
    if (omegas.empty()) throw Error("frequency grid must not be empty");
    const double pi = std::acos(-1.0);
    for (std::size_t t = 0; t < omegas.size(); ++t) {
      if (!(omegas[t] >= 0.0 && omegas[t] <= pi))
        throw Error("grid frequency " + std::to_string(omegas[t]) + " outside [0, pi]");
      if (t > 0 && !(omegas[t] > omegas[t - 1]))
        throw Error("grid frequencies must be strictly increasing");
    }
  }

  /// Equispaced grid over [0, pi] including both endpoints.
  static FrequencyGrid uniform(int count = 64) {
    if (count < 2) throw Error("uniform grid needs at least two points");
    const double pi = std::acos(-1.0);
    std::vector<double> pts(count);
    for (int t = 0; t < count; ++t) pts[t] = pi * t / (count - 1);
    return FrequencyGrid(std::move(pts));
  }

  std::size_t size() const { return omegas.size(); }
};

// ===========================================================================
// Filter bank
// ===========================================================================

/// Two-sided FIR filters for every ordered pair (target j, source i), j != i.
/// Coefficients run over lags -F..F, stored front to back.
class FilterBank {
 public:
  FilterBank() = default;
  FilterBank(int node_count, int lag_order)
      : node_count_(node_count), lag_order_(lag_order),
        coeffs_(static_cast<std::size_t>(node_count) * node_count,
                Eigen::VectorXd::Zero(2 * lag_order + 1)) {
    if (node_count < 2) throw Error("filter bank needs at least two nodes");
    if (lag_order < 1) throw Error("lag order must be at least one");
  }

  int node_count() const { return node_count_; }
  int lag_order() const { return lag_order_; }

  const Eigen::VectorXd& pair(int target, int source) const {
    return coeffs_[slot(target, source)];
  }
  Eigen::VectorXd& pair(int target, int source) { return coeffs_[slot(target, source)]; }

  /// Response at one angular frequency: sum_L h[L] exp(-i omega L).
  std::complex<double> response(int target, int source, double omega) const {
    const Eigen::VectorXd& h = pair(target, source);
    std::complex<double> acc(0.0, 0.0);
    for (int L = -lag_order_; L <= lag_order_; ++L)
      acc += h(L + lag_order_) * std::exp(std::complex<double>(0.0, -omega * L));
    return acc;
  }

 private:
  std::size_t slot(int target, int source) const {
    if (target < 0 || target >= node_count_ || source < 0 || source >= node_count_)
      throw UnknownPair("pair (" + std::to_string(target) + ", " + std::to_string(source) +
                        ") outside a bank of " + std::to_string(node_count_) + " nodes");
    if (target == source)
      throw UnknownPair("bank holds no self pair (" + std::to_string(target) + ")");
    return static_cast<std::size_t>(target) * node_count_ + source;
  }

  int node_count_ = 0;
  int lag_order_ = 0;
  std::vector<Eigen::VectorXd> coeffs_;
};

template <class Bank>
std::vector<std::complex<double>> freq_response(const Bank& bank, int target, int source,
                                                const FrequencyGrid& grid) {
  std::vector<std::complex<double>> out;
  out.reserve(grid.size());
  for (double omega : grid.omegas) out.push_back(bank.response(target, source, omega));
  return out;
}

/// Largest response magnitude over the grid.
template <class Bank>
double h_inf_norm(const Bank& bank, int target, int source, const FrequencyGrid& grid) {
  double best = 0.0;
  for (double omega : grid.omegas)
    best = std::max(best, std::abs(bank.response(target, source, omega)));
  return best;
}

// ===========================================================================
// Least squares machinery
// ===========================================================================

namespace detail {

/// Gram matrix of all lagged copies of every node over the interior window
/// k = F .. N-1-F, scaled by the window length. Column (i, L) holds node i
/// delayed by L steps, so normal equations for any target are sub-blocks and
/// the cross vector is a column slice.
struct LaggedGram {
  Eigen::MatrixXd G;
  int node_count = 0;
  int lag_order = 0;
  long window = 0;

  int index(int node, int lag) const { return node * (2 * lag_order + 1) + lag + lag_order; }
};

inline LaggedGram build_lagged_gram(const Eigen::MatrixXd& centered, int lag_order) {
  const int m = static_cast<int>(centered.rows());
  const long n = centered.cols();
  const int span = 2 * lag_order + 1;
  const long window = n - 2 * lag_order;

  Eigen::MatrixXd X(window, static_cast<long>(m) * span);
  for (int i = 0; i < m; ++i)
    for (int L = -lag_order; L <= lag_order; ++L)
      X.col(static_cast<long>(i) * span + L + lag_order) =
          centered.row(i).segment(lag_order - L, window).transpose();

  LaggedGram gram;
  gram.node_count = m;
  gram.lag_order = lag_order;
  gram.window = window;
  gram.G = Eigen::MatrixXd::Zero(m * span, m * span);
  gram.G.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  gram.G = gram.G.selfadjointView<Eigen::Lower>();
  gram.G /= static_cast<double>(window);
  return gram;
}

inline void require_enough_samples(int node_count, int lag_order, long sample_count) {
  const long floor_n = 4L * node_count * (2L * lag_order + 1);
  if (sample_count <= floor_n)
    throw InsufficientSamples("need more than " + std::to_string(floor_n) +
                              " samples for " + std::to_string(node_count) + " nodes at lag order " +
                              std::to_string(lag_order) + ", got " + std::to_string(sample_count));
}

inline Eigen::MatrixXd centered_values(const TimeSeriesPanel& panel) {
  Eigen::MatrixXd v = panel.values;
  v.colwise() -= v.rowwise().mean().eval();
  return v;
}

/// One target's fit from the shared Gram. Returns stacked coefficients over
/// the m-1 source blocks in node order.
inline Eigen::VectorXd fit_target(const LaggedGram& gram, int target, double gamma,
                                  QuadraticSolveInfo* info) {
  const int m = gram.node_count;
  const int span = 2 * gram.lag_order + 1;
  std::vector<int> sel;
  sel.reserve(static_cast<std::size_t>(m - 1) * span);
  for (int i = 0; i < m; ++i) {
    if (i == target) continue;
    for (int L = -gram.lag_order; L <= gram.lag_order; ++L) sel.push_back(gram.index(i, L));
  }
  const int tcol = gram.index(target, 0);
  const Eigen::MatrixXd Gj = gram.G(sel, sel);
  const Eigen::VectorXd bj = gram.G(sel, tcol);
  return gamma > 0.0 ? solve_l1_quadratic(Gj, bj, gamma, info)
                     : solve_quadratic(Gj, bj, info);
}

}  // namespace detail

/// Fit the two-sided filters predicting one target node from all others by
/// minimizing the mean squared interior-window residual, plus an optional L1
/// penalty gamma (gamma = 0 solves the normal equations exactly). Series are
/// centered before fitting. Keys of the result are source node indices.
inline std::map<int, Eigen::VectorXd> fit_wiener(const TimeSeriesPanel& panel, int target,
                                                 int lag_order = 10, double gamma = 0.0,
                                                 QuadraticSolveInfo* info = nullptr) {
  check_panel(panel);
  const int m = panel.node_count();
  if (m < 2) throw DimensionMismatch("fit needs at least two nodes");
  if (target < 0 || target >= m) throw UnknownPair("target " + std::to_string(target) + " out of range");
  if (lag_order < 1) throw Error("lag order must be at least one");
  detail::require_enough_samples(m, lag_order, panel.sample_count());

  const auto gram = detail::build_lagged_gram(detail::centered_values(panel), lag_order);
  const Eigen::VectorXd h = detail::fit_target(gram, target, gamma, info);

  std::map<int, Eigen::VectorXd> out;
  const int span = 2 * lag_order + 1;
  int block = 0;
  for (int i = 0; i < m; ++i) {
    if (i == target) continue;
    out[i] = h.segment(static_cast<long>(block) * span, span);
    ++block;
  }
  return out;
}

/// Fit every ordered pair. The Gram matrix is shared across targets; targets
/// are distributed over `workers` threads (0 picks the hardware count).
inline FilterBank fit_all(const TimeSeriesPanel& panel, int lag_order = 10, double gamma = 0.0,
                          int workers = 1) {
  check_panel(panel);
  const int m = panel.node_count();
  if (m < 2) throw DimensionMismatch("fit needs at least two nodes");
  if (lag_order < 1) throw Error("lag order must be at least one");
  detail::require_enough_samples(m, lag_order, panel.sample_count());

  const auto gram = detail::build_lagged_gram(detail::centered_values(panel), lag_order);
  FilterBank bank(m, lag_order);
  const int span = 2 * lag_order + 1;

  auto fit_one = [&](int target) {
    const Eigen::VectorXd h = detail::fit_target(gram, target, gamma, nullptr);
    int block = 0;
    for (int i = 0; i < m; ++i) {
      if (i == target) continue;
      bank.pair(target, i) = h.segment(static_cast<long>(block) * span, span);
      ++block;
    }
  };

  if (workers == 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, m));
  if (workers == 1) {
    for (int j = 0; j < m; ++j) fit_one(j);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w]() {
        try {
          for (int j = w; j < m; j += workers) fit_one(j);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  return bank;
}

}  // namespace rcnet
