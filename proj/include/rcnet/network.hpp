#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rcnet/edge_set.hpp"
#include "rcnet/errors.hpp"

namespace rcnet {

/// A zone: thermal capacitance plus an optional resistance to a fixed
/// ambient temperature. Ambient coupling keeps the one-step dynamics
/// strictly stable and is never treated as a learnable edge.
struct RcNode {
  std::string id;
  double capacitance = 1.0;
  std::optional<double> ambient_resistance;
};

/// Symmetric thermal resistance between two zones.
struct RcEdge {
  int a = 0;
  int b = 0;
  double resistance = 0.0;
};

/// Undirected RC network over zones indexed 0..m-1.
class RcNetwork {
 public:
  int add_node(std::string id, double capacitance,
               std::optional<double> ambient_resistance = std::nullopt) {
    nodes_.push_back({std::move(id), capacitance, ambient_resistance});
    return static_cast<int>(nodes_.size()) - 1;
  }

  void add_edge(int a, int b, double resistance) {
    if (a > b) std::swap(a, b);
    edges_.push_back({a, b, resistance});
  }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const std::vector<RcNode>& nodes() const { return nodes_; }
  const std::vector<RcEdge>& edges() const { return edges_; }
  const RcNode& node(int j) const { return nodes_.at(j); }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.id);
    return out;
  }

 private:
  std::vector<RcNode> nodes_;
  std::vector<RcEdge> edges_;
};

struct ValidationReport {
  std::vector<std::string> findings;
  bool ok() const { return findings.empty(); }
};

/// Structural checks: positive capacitances and resistances, in-range
/// endpoints, no self loops, no duplicate edges, unique node ids.
inline ValidationReport validate(const RcNetwork& net) {
  ValidationReport report;
  const int m = net.node_count();
  std::set<std::string> ids;
  for (int j = 0; j < m; ++j) {
    const RcNode& n = net.node(j);
    if (!(n.capacitance > 0.0))
      report.findings.push_back("node '" + n.id + "': capacitance must be positive");
    if (n.ambient_resistance && !(*n.ambient_resistance > 0.0))
      report.findings.push_back("node '" + n.id + "': ambient resistance must be positive");
    if (!ids.insert(n.id).second)
      report.findings.push_back("duplicate node id '" + n.id + "'");
  }
  std::set<std::pair<int, int>> seen;
  for (const RcEdge& e : net.edges()) {
    if (e.a < 0 || e.b >= m) {
      report.findings.push_back("edge endpoint out of range");
      continue;
    }
    if (e.a == e.b) {
      report.findings.push_back("self loop on node '" + net.node(e.a).id + "'");
      continue;
    }
    if (!(e.resistance > 0.0))
      report.findings.push_back("edge (" + net.node(e.a).id + ", " + net.node(e.b).id +
                                "): resistance must be positive");
    if (!seen.insert({e.a, e.b}).second)
      report.findings.push_back("duplicate edge (" + net.node(e.a).id + ", " +
                                net.node(e.b).id + ")");
  }
  return report;
}

/// One-step linear map for temperature deviations: T(k+1) = A T(k) + P(k).
struct DiscreteDynamics {
  Eigen::MatrixXd A;
  double dt = 1.0;
};

inline double spectral_radius(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("spectral radius needs a square matrix");
  if (A.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Forward Euler step of the RC heat balance. Off-diagonal entries couple
/// neighbors as dt / (R_ji * C_j); each diagonal keeps the remainder so that
/// a row without ambient coupling sums to exactly one.
inline DiscreteDynamics discretize(const RcNetwork& net, double dt) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const ValidationReport report = validate(net);
  if (!report.ok()) {
    std::string msg = "invalid network:";
    for (const auto& f : report.findings) msg += " " + f + ";";
    throw Error(msg);
  }

  const int m = net.node_count();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd leak = Eigen::VectorXd::Zero(m);  // sum of dt/(R*C) leaving each node
  for (const RcEdge& e : net.edges()) {
    const double ca = net.node(e.a).capacitance;
    const double cb = net.node(e.b).capacitance;
    A(e.a, e.b) = dt / (e.resistance * ca);
    A(e.b, e.a) = dt / (e.resistance * cb);
    leak(e.a) += dt / (e.resistance * ca);
    leak(e.b) += dt / (e.resistance * cb);
  }
  bool all_ambient = true;
  for (int j = 0; j < m; ++j) {
    const RcNode& n = net.node(j);
    if (n.ambient_resistance)
      leak(j) += dt / (*n.ambient_resistance * n.capacitance);
    else
      all_ambient = false;
    A(j, j) = 1.0 - leak(j);
    if (!(A(j, j) > 0.0))
      throw UnstableDiscretization("time step too coarse: diagonal entry for node '" +
                                   n.id + "' is not positive");
  }
  if (all_ambient && m > 0 && !(spectral_radius(A) < 1.0))
    throw UnstableDiscretization("one-step map is not strictly stable");
  return {A, dt};
}

inline EdgeSet true_edge_set(const RcNetwork& net) {
  EdgeSet edges;
  for (const RcEdge& e : net.edges()) edges.insert(e.a, e.b);
  return edges;
}

// ===========================================================================
// Stock networks used by the command line demos and the test suite.
// ===========================================================================

/// Two zones joined by one resistance, both coupled to ambient.
inline RcNetwork two_zone_network() {
  RcNetwork net;
  net.add_node("z1", 1.0, 5.0);
  net.add_node("z2", 1.0, 5.0);
  net.add_edge(0, 1, 5.0);
  return net;
}

/// Three zones in a chain: z1 - z2 - z3.
inline RcNetwork three_zone_chain() {
  RcNetwork net;
  net.add_node("z1", 1.0, 5.0);
  net.add_node("z2", 1.0, 5.0);
  net.add_node("z3", 1.0, 5.0);
  net.add_edge(0, 1, 5.0);
  net.add_edge(1, 2, 5.0);
  return net;
}

/// Five zones: a core connected to four perimeter zones, with the perimeter
/// forming a ring. Unit capacitances, R = 10 core to perimeter, R = 20 along
/// the ring, R = 15 to ambient everywhere.
inline RcNetwork five_zone_default() {
  RcNetwork net;
  net.add_node("core", 1.0, 15.0);
  net.add_node("p1", 1.0, 15.0);
  net.add_node("p2", 1.0, 15.0);
  net.add_node("p3", 1.0, 15.0);
  net.add_node("p4", 1.0, 15.0);
  for (int p = 1; p <= 4; ++p) net.add_edge(0, p, 10.0);
  net.add_edge(1, 2, 20.0);
  net.add_edge(2, 3, 20.0);
  net.add_edge(3, 4, 20.0);
  net.add_edge(4, 1, 20.0);
  return net;
}

}  // namespace rcnet
