// Network construction, validation, Euler discretization and graph helpers.

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "rcnet.hpp"

namespace {

// Independent largest-eigenvalue estimate so the stability check is not
// tested against itself.
double power_iteration_radius(const Eigen::MatrixXd& a) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd next = a * v;
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    next /= norm;
    const double estimate = std::abs(v.dot(a * v));
    if (it > 10 && std::abs(estimate - lambda) < 1e-14) return estimate;
    lambda = estimate;
    v = next;
  }
  return lambda;
}

rcnet::RcNetwork two_node_no_ambient() {
  rcnet::RcNetwork net;
  net.add_node("a", 1.0);
  net.add_node("b", 1.0);
  net.add_edge(0, 1, 10.0);
  return net;
}

TEST(Discretize, TwoNodeHandComputed) {
  // dt/(R C) = 1/10 off diagonal, 1 - 0.1 on the diagonal.
  const auto dyn = rcnet::discretize(two_node_no_ambient(), 1.0);
  ASSERT_EQ(dyn.A.rows(), 2);
  EXPECT_NEAR(dyn.A(0, 0), 0.9, 1e-15);
  EXPECT_NEAR(dyn.A(0, 1), 0.1, 1e-15);
  EXPECT_NEAR(dyn.A(1, 0), 0.1, 1e-15);
  EXPECT_NEAR(dyn.A(1, 1), 0.9, 1e-15);
}

TEST(Discretize, AmbientLeakEntersDiagonalOnly) {
  const auto dyn = rcnet::discretize(rcnet::two_zone_network(), 1.0);
  // 1 - dt (1/(R C) + 1/(R_amb C)) = 1 - (0.2 + 0.2).
  EXPECT_NEAR(dyn.A(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(dyn.A(0, 1), 0.2, 1e-15);
  EXPECT_NEAR(dyn.A(1, 0), 0.2, 1e-15);
  EXPECT_NEAR(dyn.A(1, 1), 0.6, 1e-15);
}

TEST(Discretize, FiveZoneEntries) {
  const auto dyn = rcnet::discretize(rcnet::five_zone_default(), 1.0);
  ASSERT_EQ(dyn.A.rows(), 5);
  // Core: 1 - (4/10 + 1/15); perimeter: 1 - (1/10 + 2/20 + 1/15).
  EXPECT_NEAR(dyn.A(0, 0), 1.0 - 0.4 - 1.0 / 15.0, 1e-14);
  for (int j = 1; j <= 4; ++j) {
    EXPECT_NEAR(dyn.A(j, j), 1.0 - 0.1 - 0.1 - 1.0 / 15.0, 1e-14) << "node " << j;
    EXPECT_NEAR(dyn.A(0, j), 0.1, 1e-15);
    EXPECT_NEAR(dyn.A(j, 0), 0.1, 1e-15);
  }
  EXPECT_NEAR(dyn.A(1, 2), 0.05, 1e-15);
  EXPECT_NEAR(dyn.A(2, 3), 0.05, 1e-15);
  EXPECT_NEAR(dyn.A(3, 4), 0.05, 1e-15);
  EXPECT_NEAR(dyn.A(1, 4), 0.05, 1e-15);
  EXPECT_NEAR(dyn.A(1, 3), 0.0, 0.0);
  EXPECT_NEAR(dyn.A(2, 4), 0.0, 0.0);
}

TEST(Discretize, RowSumsAreOneMinusAmbientLeak) {
  const auto dyn = rcnet::discretize(rcnet::five_zone_default(), 1.0);
  for (int j = 0; j < 5; ++j)
    EXPECT_NEAR(dyn.A.row(j).sum(), 1.0 - 1.0 / 15.0, 1e-14);
}

TEST(Discretize, SpectralRadiusMatchesPowerIteration) {
  const auto dyn = rcnet::discretize(rcnet::five_zone_default(), 1.0);
  const double reported = rcnet::spectral_radius(dyn.A);
  const double independent = power_iteration_radius(dyn.A);
  EXPECT_NEAR(reported, independent, 1e-10);
  EXPECT_LT(reported, 1.0);
}

TEST(Discretize, SupportIsSymmetric) {
  const auto dyn = rcnet::discretize(rcnet::five_zone_default(), 1.0);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      EXPECT_EQ(dyn.A(i, j) != 0.0, dyn.A(j, i) != 0.0);
}

TEST(Discretize, JointScalingOfResistanceAndStepIsInvariant) {
  // Doubling every resistance and the time step leaves A unchanged.
  rcnet::RcNetwork scaled;
  scaled.add_node("core", 1.0, 30.0);
  for (int j = 1; j <= 4; ++j) scaled.add_node("p" + std::to_string(j), 1.0, 30.0);
  for (int j = 1; j <= 4; ++j) scaled.add_edge(0, j, 20.0);
  scaled.add_edge(1, 2, 40.0);
  scaled.add_edge(2, 3, 40.0);
  scaled.add_edge(3, 4, 40.0);
  scaled.add_edge(1, 4, 40.0);

  const auto base = rcnet::discretize(rcnet::five_zone_default(), 1.0);
  const auto doubled = rcnet::discretize(scaled, 2.0);
  EXPECT_LT((base.A - doubled.A).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Discretize, CoarseStepThrows) {
  // dt = 12 drives the perimeter diagonal negative.
  EXPECT_THROW(rcnet::discretize(rcnet::five_zone_default(), 12.0),
               rcnet::UnstableDiscretization);
}

TEST(Discretize, InvalidNetworkThrowsWithFindings) {
  rcnet::RcNetwork net;
  net.add_node("a", -1.0);
  net.add_node("b", 1.0);
  net.add_edge(0, 1, 5.0);
  try {
    rcnet::discretize(net, 1.0);
    FAIL() << "expected a validation error";
  } catch (const rcnet::Error& e) {
    EXPECT_NE(std::string(e.what()).find("capacitance"), std::string::npos);
  }
}

TEST(Validate, CollectsAllFindings) {
  rcnet::RcNetwork net;
  net.add_node("a", 1.0);
  net.add_node("a", 0.0, -2.0);
  net.add_edge(0, 1, 0.0);
  const auto report = rcnet::validate(net);
  EXPECT_FALSE(report.ok());
  // Duplicate id, non-positive capacitance, negative ambient, non-positive R.
  EXPECT_GE(report.findings.size(), 4u);
}

TEST(Validate, RejectsSelfLoopsAndDuplicateEdges) {
  rcnet::RcNetwork loops;
  loops.add_node("a", 1.0);
  loops.add_edge(0, 0, 1.0);
  EXPECT_FALSE(rcnet::validate(loops).ok());

  rcnet::RcNetwork dupes;
  dupes.add_node("a", 1.0);
  dupes.add_node("b", 1.0);
  dupes.add_edge(0, 1, 1.0);
  dupes.add_edge(1, 0, 2.0);  // same pair in the other order
  EXPECT_FALSE(rcnet::validate(dupes).ok());
}

TEST(EdgeSet, NormalizationAndDifference) {
  rcnet::EdgeSet a;
  a.insert(2, 0);
  a.insert(0, 2);  // duplicate after normalization
  a.insert(1, 2);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_TRUE(a.contains(2, 0));

  rcnet::EdgeSet b;
  b.insert(0, 2);
  EXPECT_EQ(a.symmetric_difference_size(b), 1u);
  EXPECT_THROW(rcnet::make_edge(3, 3), rcnet::Error);
}

TEST(EdgeSet, FiveZoneTruth) {
  const auto truth = rcnet::true_edge_set(rcnet::five_zone_default());
  EXPECT_EQ(truth.size(), 8u);
  EXPECT_TRUE(truth.contains(0, 3));
  EXPECT_TRUE(truth.contains(1, 4));
  EXPECT_FALSE(truth.contains(1, 3));
  EXPECT_FALSE(truth.contains(2, 4));
}

// Brute-force two-hop detection over random graphs, compared entry by entry.
TEST(EdgeSet, TwoHopMatchesBruteForce) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 3 + static_cast<int>(rng() % 6);
    rcnet::EdgeSet edges;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (coin(rng) < 0.4) edges.insert(i, j);

    const auto nbr = rcnet::neighbor_sets(edges, m);
    const auto two_hop = rcnet::two_hop_sets(edges, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        bool expected = false;
        for (int k = 0; k < m; ++k) {
          if (k == i || k == j) continue;
          if (nbr[i].count(k) && nbr[j].count(k)) expected = true;
        }
        EXPECT_EQ(two_hop[i].count(j) > 0, expected)
            << "trial " << trial << " pair (" << i << "," << j << ")";
      }
    }
  }
}

TEST(EdgeSet, PairClassification) {
  const auto truth = rcnet::true_edge_set(rcnet::five_zone_default());
  using K = rcnet::PairKind;
  // Core to perimeter: adjacent, and also joined through the ring.
  EXPECT_EQ(rcnet::classify_pair(truth, 5, 0, 1), K::NeighborAndTwoHop);
  // Opposite perimeter nodes: joined only through core and the ring.
  EXPECT_EQ(rcnet::classify_pair(truth, 5, 1, 3), K::StrictTwoHop);
  EXPECT_EQ(rcnet::classify_pair(truth, 5, 2, 4), K::StrictTwoHop);
}

TEST(NetworkJson, RoundTrip) {
  const auto net = rcnet::five_zone_default();
  const auto json = rcnet::to_json(net);
  const auto back = rcnet::network_from_json(json, "test");
  ASSERT_EQ(back.node_count(), net.node_count());
  for (int j = 0; j < net.node_count(); ++j) {
    EXPECT_EQ(back.node(j).id, net.node(j).id);
    EXPECT_EQ(back.node(j).capacitance, net.node(j).capacitance);
    EXPECT_EQ(back.node(j).ambient_resistance, net.node(j).ambient_resistance);
  }
  EXPECT_EQ(rcnet::true_edge_set(back), rcnet::true_edge_set(net));
  EXPECT_EQ(rcnet::network_fingerprint(back), rcnet::network_fingerprint(net));
}

TEST(NetworkJson, UnknownNodeInEdgeThrows) {
  rcnet::Json json{{"nodes", {{{"id", "a"}, {"capacitance", 1.0}}}},
                   {"edges", {{{"a", "a"}, {"b", "zz"}, {"resistance", 1.0}}}}};
  EXPECT_THROW(rcnet::network_from_json(json, "test"), rcnet::MalformedFile);
}

TEST(NetworkJson, MissingFileNamesPath) {
  try {
    rcnet::load_network("/nonexistent/net.json");
    FAIL() << "expected a file error";
  } catch (const rcnet::MalformedFile& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/net.json"), std::string::npos);
  }
}

}  // namespace
