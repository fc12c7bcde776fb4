#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "rcnet/edge_set.hpp"
#include "rcnet/errors.hpp"
#include "rcnet/network.hpp"
#include "rcnet/noise.hpp"
#include "rcnet/wiener.hpp"

namespace rcnet {

using Complex = std::complex<double>;

/// Power spectral density of one node's exogenous input, evaluated on the
/// unit circle.
struct InputSpectrum {
  double variance = 1.0;
  double ar_coefficient = 0.0;
  std::vector<double> fir;

  static InputSpectrum from(const NodeNoiseSpec& spec) {
    if (std::abs(spec.ar_coefficient) >= 1.0)
      throw NonStationaryFilter("AR coefficient magnitude must be below one");
    return {spec.variance, spec.ar_coefficient, spec.fir};
  }

  double operator()(double omega) const {
    if (!fir.empty()) {
      Complex c(0.0, 0.0);
      for (std::size_t t = 0; t < fir.size(); ++t)
        c += fir[t] * std::exp(Complex(0.0, -omega * static_cast<double>(t)));
      return variance * std::norm(c);
    }
    if (ar_coefficient != 0.0) {
      const Complex den = 1.0 - ar_coefficient * std::exp(Complex(0.0, -omega));
      return variance / std::norm(den);
    }
    return variance;
  }
};

/// Exact frequency-domain description of a simulated network: the one-step
/// map A together with the input spectrum at every node.
struct ZDomainModel {
  Eigen::MatrixXd A;
  std::vector<InputSpectrum> spectra;

  int node_count() const { return static_cast<int>(A.rows()); }

  static ZDomainModel from(const DiscreteDynamics& dyn, const NoisePlan& plan) {
    if (dyn.A.rows() != dyn.A.cols()) throw DimensionMismatch("dynamics must be square");
    if (static_cast<long>(plan.nodes.size()) != dyn.A.rows())
      throw DimensionMismatch("noise plan covers " + std::to_string(plan.nodes.size()) +
                              " nodes, dynamics have " + std::to_string(dyn.A.rows()));
    ZDomainModel model;
    model.A = dyn.A;
    for (const auto& spec : plan.nodes) model.spectra.push_back(InputSpectrum::from(spec));
    return model;
  }

  /// Support of A's off-diagonal, as an undirected edge set.
  EdgeSet support() const {
    EdgeSet edges;
    const int m = node_count();
    for (int j = 0; j < m; ++j)
      for (int i = j + 1; i < m; ++i)
        if (A(j, i) != 0.0 || A(i, j) != 0.0) edges.insert(j, i);
    return edges;
  }
};

namespace detail {

inline Complex unit_circle(double omega) { return std::exp(Complex(0.0, omega)); }

/// S_j at one frequency: the target node's own dynamics removed from z.
inline Complex self_term(const ZDomainModel& model, int j, double omega) {
  return unit_circle(omega) - model.A(j, j);
}

inline double input_spectrum_checked(const ZDomainModel& model, int j, double omega) {
  const double phi = model.spectra[j](omega);
  if (!(phi > 0.0) || !std::isfinite(phi))
    throw Error("input spectrum at node " + std::to_string(j) +
                " is not positive at omega = " + std::to_string(omega));
  return phi;
}

}  // namespace detail

/// Open-loop transfer matrix H at one frequency: entry (j, i) weighs neighbor
/// i in the expression of node j, A(j,i) divided by S_j; the diagonal is zero.
inline Eigen::MatrixXcd transfer_matrix(const ZDomainModel& model, double omega) {
  const int m = model.node_count();
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    const Complex sj = detail::self_term(model, j, omega);
    for (int i = 0; i < m; ++i)
      if (i != j && model.A(j, i) != 0.0) H(j, i) = model.A(j, i) / sj;
  }
  return H;
}

/// Inverse output spectral density at one frequency, computed from the
/// whitened closed-loop form (I - H)* diag(1/Phi_E) (I - H), where node j's
/// disturbance spectrum is Phi_E_j = Phi_p_j / |S_j|^2. Exactly Hermitian up
/// to rounding, and entry (j, i) vanishes unless j and i are neighbors or
/// share a neighbor.
inline Eigen::MatrixXcd analytic_spectrum_inverse(const ZDomainModel& model, double omega) {
  const int m = model.node_count();
  const Eigen::MatrixXcd M =
      Eigen::MatrixXcd::Identity(m, m) - transfer_matrix(model, omega);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > 1e12)
    throw SingularAtFrequency("closed-loop map is numerically singular at omega = " +
                              std::to_string(omega));

  Eigen::VectorXcd inv_phi_e(m);
  for (int j = 0; j < m; ++j) {
    const double phi_p = detail::input_spectrum_checked(model, j, omega);
    inv_phi_e(j) = std::norm(detail::self_term(model, j, omega)) / phi_p;
  }
  return M.adjoint() * inv_phi_e.asDiagonal() * M;
}

/// Exact non-causal Wiener filter from source i to target j at one frequency.
/// The normalizer is the residual spectrum of the conditional estimate,
/// 1 / [Phi_T^{-1}](j,j), so this is the limit the least-squares fit
/// converges to. The diagonal entry is real positive, which means scaling by
/// it never moves the phase.
inline Complex analytic_wiener_at(const ZDomainModel& model, int target, int source,
                                  double omega) {
  const int m = model.node_count();
  if (target < 0 || target >= m || source < 0 || source >= m || target == source)
    throw UnknownPair("pair (" + std::to_string(target) + ", " + std::to_string(source) +
                      ") invalid for " + std::to_string(m) + " nodes");
  const Eigen::MatrixXcd inv = analytic_spectrum_inverse(model, omega);
  const double diag = inv(target, target).real();
  if (!(diag > 0.0))
    throw SingularAtFrequency("spectrum inverse has a non-positive diagonal at omega = " +
                              std::to_string(omega));
  return -inv(target, source) / diag;
}

inline std::vector<Complex> analytic_wiener(const ZDomainModel& model, int target, int source,
                                            const FrequencyGrid& grid) {
  std::vector<Complex> out;
  out.reserve(grid.size());
  for (double omega : grid.omegas)
    out.push_back(analytic_wiener_at(model, target, source, omega));
  return out;
}

/// Adapter exposing the analytic filters through the same interface as a
/// fitted FilterBank, so graph routines can run on exact responses. Values
/// are cached per frequency.
class OracleBank {
 public:
  explicit OracleBank(ZDomainModel model) : model_(std::move(model)) {}

  int node_count() const { return model_.node_count(); }

  Complex response(int target, int source, double omega) const {
    auto it = cache_.find(omega);
    if (it == cache_.end()) {
      const int m = model_.node_count();
      const Eigen::MatrixXcd inv = analytic_spectrum_inverse(model_, omega);
      Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(m, m);
      for (int j = 0; j < m; ++j) {
        const double diag = inv(j, j).real();
        if (!(diag > 0.0))
          throw SingularAtFrequency(
              "spectrum inverse has a non-positive diagonal at omega = " +
              std::to_string(omega));
        for (int i = 0; i < m; ++i)
          if (i != j) W(j, i) = -inv(j, i) / diag;
      }
      it = cache_.emplace(omega, std::move(W)).first;
    }
    const int m = model_.node_count();
    if (target < 0 || target >= m || source < 0 || source >= m || target == source)
      throw UnknownPair("pair (" + std::to_string(target) + ", " + std::to_string(source) +
                        ") invalid for " + std::to_string(m) + " nodes");
    return it->second(target, source);
  }

  const ZDomainModel& model() const { return model_; }

 private:
  ZDomainModel model_;
  mutable std::map<double, Eigen::MatrixXcd> cache_;
};

// ===========================================================================
// Phase-pi pathology check
// ===========================================================================

/// For a pair of true neighbors, a filter whose phase sits at pi across every
/// frequency (and which pruning would therefore discard) can only occur when
/// specific sign conditions on the direct terms hold at all frequencies. This
/// report evaluates those necessary conditions per grid point.
struct PhasePiPathologyReport {
  PairKind kind = PairKind::NonAdjacent;
  std::vector<double> omegas;
  std::vector<bool> condition_holds;

  /// True when no grid frequency rules the all-pi phase profile out.
  bool pathological() const {
    for (bool h : condition_holds)
      if (!h) return false;
    return !condition_holds.empty();
  }
};

inline PhasePiPathologyReport check_phase_pi_pathology(const ZDomainModel& model, int target,
                                                       int source, const FrequencyGrid& grid) {
  const int m = model.node_count();
  if (target < 0 || target >= m || source < 0 || source >= m || target == source)
    throw UnknownPair("pair (" + std::to_string(target) + ", " + std::to_string(source) +
                      ") invalid for " + std::to_string(m) + " nodes");

  PhasePiPathologyReport report;
  report.omegas = grid.omegas;
  const EdgeSet support = model.support();
  report.kind = classify_pair(support, m, target, source);

  const auto nb = neighbor_sets(support, m);
  std::vector<int> shared;
  for (int k : nb[target])
    if (k != source && nb[source].count(k)) shared.push_back(k);

  for (double omega : grid.omegas) {
    switch (report.kind) {
      case PairKind::NonAdjacent:
        // The filter vanishes identically; no phase to speak of.
        report.condition_holds.push_back(false);
        break;
      case PairKind::StrictTwoHop:
        // Only shared-neighbor cross terms survive, all real and positive,
        // so the phase is pi by construction.
        report.condition_holds.push_back(true);
        break;
      case PairKind::NeighborOnly:
      case PairKind::NeighborAndTwoHop: {
        const Complex sj = detail::self_term(model, target, omega);
        const Complex si = detail::self_term(model, source, omega);
        const double phi_j = detail::input_spectrum_checked(model, target, omega);
        const double phi_i = detail::input_spectrum_checked(model, source, omega);
        // Direct terms of the inverse spectral density for this pair.
        const Complex x = -model.A(target, source) * std::conj(sj) / phi_j -
                          model.A(source, target) * si / phi_i;
        double cross = 0.0;
        for (int k : shared)
          cross += model.A(k, target) * model.A(k, source) /
                   detail::input_spectrum_checked(model, k, omega);
        const double scale = std::abs(x) + cross + 1.0;
        const bool imag_zero = std::abs(x.imag()) <= 1e-12 * scale;
        const bool real_positive = x.real() + cross > 0.0;
        report.condition_holds.push_back(imag_zero && real_positive);
        break;
      }
    }
  }
  return report;
}

}  // namespace rcnet
