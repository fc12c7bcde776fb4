// Full-pipeline acceptance run. Every check measures real behavior end to end
// and prints one PASS or FAIL line with the numbers it saw; the process exits
// nonzero when any check fails. No check is allowed to touch another's seeds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rcnet.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) { return rcnet::detail::format_double(v, 4); }

rcnet::TimeSeriesPanel simulate(const rcnet::RcNetwork& net, const rcnet::NoisePlan& plan,
                                long samples) {
  const auto dyn = rcnet::discretize(net, 1.0);
  const auto inputs = rcnet::generate_inputs(plan, net.node_count(), samples + 1000);
  auto panel = rcnet::rollout(dyn, inputs, 1000);
  panel.labels = net.labels();
  return panel;
}

rcnet::NoisePlan make_plan(const std::string& input, int m, std::uint64_t seed) {
  return input == "white" ? rcnet::NoisePlan::white(m, 1.0, seed)
                          : rcnet::NoisePlan::ar1(m, 0.5, 1.0, seed);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

template <class Fn>
void check(const std::string& name, Fn&& body) {
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome = {false, std::string("threw: ") + e.what()};
  }
  if (!outcome.pass) ++failures;
  std::printf("%s  %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(),
              outcome.detail.c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------
// Checks 1 and 2: the pipeline recovers the bundled five-zone wiring exactly
// from 10^5 samples, for both input kinds, in almost every seed.

Outcome exact_recovery(const std::string& input) {
  const auto net = rcnet::five_zone_default();
  const auto truth = rcnet::true_edge_set(net);
  int exact = 0;
  double worst_trial = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto start = Clock::now();
    const auto panel = simulate(net, make_plan(input, 5, seed), 100000);
    const auto estimate = rcnet::learn_topology(panel, rcnet::LearnOptions{}, truth);
    worst_trial = std::max(worst_trial, seconds_since(start));
    if (*estimate.error == 0.0) ++exact;
  }
  const bool pass = exact >= 9 && worst_trial < 60.0;
  return {pass, std::to_string(exact) + "/10 seeds exact, slowest trial " + fmt(worst_trial) +
                    " s (budget 60 s)"};
}

// ---------------------------------------------------------------------------
// Check 3: for pairs that only interact through shared neighbors, the
// analytic filter phase sits at pi (within 1e-9) on the whole grid.

Outcome two_hop_phase() {
  const auto start = Clock::now();
  const double pi = std::acos(-1.0);
  const auto grid = rcnet::FrequencyGrid::uniform(64);

  struct Case {
    rcnet::RcNetwork net;
    std::vector<std::pair<int, int>> pairs;
  };
  std::vector<Case> cases;
  cases.push_back({rcnet::three_zone_chain(), {{0, 2}, {2, 0}}});
  cases.push_back({rcnet::five_zone_default(), {{1, 3}, {3, 1}, {2, 4}, {4, 2}}});

  double worst_gap = 0.0;
  int checked = 0;
  for (const Case& c : cases) {
    for (const std::string input : {"white", "ar1"}) {
      const auto model = rcnet::ZDomainModel::from(rcnet::discretize(c.net, 1.0),
                                                   make_plan(input, c.net.node_count(), 0));
      for (const auto& [j, i] : c.pairs)
        for (const std::complex<double>& w : rcnet::analytic_wiener(model, j, i, grid)) {
          worst_gap = std::max(worst_gap, pi - std::abs(std::arg(w)));
          ++checked;
        }
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = worst_gap <= 1e-9 && elapsed < 1.0;
  return {pass, "worst |phase - pi| " + fmt(worst_gap) + " over " + std::to_string(checked) +
                    " grid values, " + fmt(elapsed) + " s (budget 1 s)"};
}

// ---------------------------------------------------------------------------
// Check 4: on random small networks, analytic filters between pairs farther
// than two hops apart are identically zero.

Outcome far_pairs_vanish() {
  const auto start = Clock::now();
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> resistance(10.0, 30.0);
  const auto grid = rcnet::FrequencyGrid::uniform(32);

  int networks = 0, far_pairs = 0;
  double worst = 0.0;
  while (networks < 8) {
    const int m = 4 + static_cast<int>(rng() % 3);
    rcnet::RcNetwork net;
    for (int j = 0; j < m; ++j) net.add_node("n" + std::to_string(j), 1.0, 10.0);
    rcnet::EdgeSet edges;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (coin(rng) < 0.3) {
          net.add_edge(i, j, resistance(rng));
          edges.insert(i, j);
        }
    ++networks;
    const auto model = rcnet::ZDomainModel::from(rcnet::discretize(net, 1.0),
                                                 rcnet::NoisePlan::white(m, 1.0, 0));
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        if (i == j) continue;
        if (rcnet::classify_pair(edges, m, j, i) != rcnet::PairKind::NonAdjacent) continue;
        ++far_pairs;
        for (const std::complex<double>& w : rcnet::analytic_wiener(model, j, i, grid))
          worst = std::max(worst, std::abs(w));
      }
  }
  const double elapsed = seconds_since(start);
  const bool pass = far_pairs >= 10 && worst < 1e-10 && elapsed < 5.0;
  return {pass, "sup |W| " + fmt(worst) + " over " + std::to_string(far_pairs) +
                    " far pairs in " + std::to_string(networks) + " networks, " + fmt(elapsed) +
                    " s (budget 5 s)"};
}

// ---------------------------------------------------------------------------
// Check 5: fitted filters approach the analytic response as the panel grows.

Outcome estimator_converges() {
  const auto net = rcnet::two_zone_network();
  const auto dyn = rcnet::discretize(net, 1.0);
  const auto grid = rcnet::FrequencyGrid::uniform(64);
  const auto oracle = rcnet::analytic_wiener(
      rcnet::ZDomainModel::from(dyn, rcnet::NoisePlan::white(2, 1.0, 0)), 0, 1, grid);

  std::vector<double> medians;
  for (long samples : {1000L, 10000L, 100000L}) {
    std::vector<double> gaps;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto panel = simulate(net, rcnet::NoisePlan::white(2, 1.0, seed), samples);
      const auto bank = rcnet::fit_all(panel, 10, 0.0);
      double sup = 0.0;
      for (std::size_t t = 0; t < grid.size(); ++t)
        sup = std::max(sup, std::abs(bank.response(0, 1, grid.omegas[t]) - oracle[t]));
      gaps.push_back(sup);
    }
    medians.push_back(median(gaps));
  }
  const bool pass =
      medians[2] < 0.05 && medians[0] > medians[1] && medians[1] > medians[2];
  return {pass, "median sup gap " + fmt(medians[0]) + " -> " + fmt(medians[1]) + " -> " +
                    fmt(medians[2]) + " over N = 10^3, 10^4, 10^5 (need < 0.05 and decreasing)"};
}

// ---------------------------------------------------------------------------
// Check 6: the one-step regression comparison should misplace at least half
// the wiring at every sample size, even with its threshold swept in its
// favor. Known not to hold with per-node-independent synthetic inputs: the
// lag-1 regressor is consistent here, so its best-threshold error collapses
// instead of staying above the floor. Reported honestly.

Outcome regression_stays_wrong() {
  const auto net = rcnet::five_zone_default();
  const auto truth = rcnet::true_edge_set(net);
  bool pass = true;
  std::string detail;
  for (const std::string input : {"white", "ar1"}) {
    detail += (detail.empty() ? "" : "; ") + input + " medians";
    for (long samples : {1000L, 10000L, 100000L}) {
      std::vector<double> errors;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto panel = simulate(net, make_plan(input, 5, seed), samples);
        const auto fit = rcnet::fit_regression(panel);
        double best = 1e9;
        for (double thr : rcnet::default_threshold_sweep())
          best = std::min(best, rcnet::reconstruction_error(fit.edges_at(thr), truth));
        errors.push_back(best);
      }
      const double med = median(errors);
      if (!(med >= 0.5)) pass = false;
      detail += " " + fmt(med);
    }
  }
  return {pass, detail + " (need every median >= 0.5)"};
}

// ---------------------------------------------------------------------------
// Check 7: covariance selection should trail the filter pipeline at 10^4 and
// 10^5 samples. Also known not to hold with independent synthetic inputs:
// the stationary precision is separable here, so best-threshold covariance
// selection recovers the wiring exactly. Reported honestly.

Outcome glasso_trails() {
  const auto net = rcnet::five_zone_default();
  const auto truth = rcnet::true_edge_set(net);
  bool pass = true;
  std::string detail;
  for (const std::string input : {"white", "ar1"}) {
    for (long samples : {10000L, 100000L}) {
      std::vector<double> filter_errors, glasso_errors;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto panel = simulate(net, make_plan(input, 5, seed), samples);
        filter_errors.push_back(
            *rcnet::learn_topology(panel, rcnet::LearnOptions{}, truth).error);
        const auto fit = rcnet::fit_glasso(panel, 0.05, 0.05);
        double best = 1e9;
        for (double thr : rcnet::default_threshold_sweep())
          best = std::min(best, rcnet::reconstruction_error(fit.edges_at(thr), truth));
        glasso_errors.push_back(best);
      }
      const double mg = median(glasso_errors), mf = median(filter_errors);
      if (!(mg > mf)) pass = false;
      detail += (detail.empty() ? "" : "; ") + input + " N=" + std::to_string(samples) +
                " glasso " + fmt(mg) + " vs filter " + fmt(mf);
    }
  }
  return {pass, detail + " (need glasso strictly worse)"};
}

// ---------------------------------------------------------------------------
// Check 8: at 5000 samples the default small-sample penalty should do no
// worse than the unpenalized fit.

Outcome penalty_helps_when_starved() {
  const auto net = rcnet::five_zone_default();
  const auto truth = rcnet::true_edge_set(net);
  const double gamma = rcnet::low_sample_gamma(5, 10, 5000);
  bool pass = true;
  std::string detail = "gamma " + fmt(gamma);
  for (const std::string input : {"white", "ar1"}) {
    std::vector<double> plain, penalized;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto panel = simulate(net, make_plan(input, 5, seed), 5000);
      rcnet::LearnOptions opts;
      plain.push_back(*rcnet::learn_topology(panel, opts, truth).error);
      opts.gamma = gamma;
      penalized.push_back(*rcnet::learn_topology(panel, opts, truth).error);
    }
    const double mp = median(penalized), m0 = median(plain);
    if (!(mp <= m0)) pass = false;
    detail += "; " + input + " median " + fmt(mp) + " penalized vs " + fmt(m0) + " plain";
  }
  return {pass, detail + " (need penalized <= plain)"};
}

// ---------------------------------------------------------------------------
// Check 9: structural properties that need no simulation. Discretization row
// sums and stability, threshold monotonicity of the graph stages on analytic
// filters, solver objective descent, and CSV round-tripping.

Outcome fast_properties() {
  const auto start = Clock::now();
  std::string why;

  // Row sums equal one minus the ambient leak, and the dynamics stay stable.
  for (const auto& net : {rcnet::five_zone_default(), rcnet::two_zone_network(),
                          rcnet::three_zone_chain()}) {
    const auto dyn = rcnet::discretize(net, 1.0);
    for (int j = 0; j < net.node_count(); ++j) {
      const auto& node = net.node(j);
      const double leak =
          node.ambient_resistance ? 1.0 / (*node.ambient_resistance * node.capacitance) : 0.0;
      if (std::abs(dyn.A.row(j).sum() - (1.0 - leak)) > 1e-12)
        why = "row sum off for node " + node.id;
    }
    if (Eigen::EigenSolver<Eigen::MatrixXd>(dyn.A).eigenvalues().cwiseAbs().maxCoeff() >=
        1.0)
      why = "unstable dynamics";
  }

  // Raising the magnitude threshold only removes moral edges; widening the
  // phase band only removes surviving edges.
  const auto model = rcnet::ZDomainModel::from(
      rcnet::discretize(rcnet::five_zone_default(), 1.0), rcnet::NoisePlan::white(5, 1.0, 0));
  const rcnet::OracleBank bank(model);
  const auto grid = rcnet::FrequencyGrid::uniform(64);
  std::size_t last_moral = 11;
  for (double rho : {0.01, 0.05, 0.2, 0.5, 1.5}) {
    const auto moral = rcnet::moral_graph(bank, grid, rho);
    if (moral.size() > last_moral) why = "moral graph grew when rho rose";
    last_moral = moral.size();
  }
  rcnet::GraphEstimate estimate;
  estimate.moral_edges = rcnet::moral_graph(bank, grid, 0.05);
  std::size_t last_kept = 11;
  for (double tau : {0.1, 0.5, 1.0, 2.0}) {
    const auto kept = rcnet::prune_two_hop(estimate, bank, grid, tau, 0.5);
    if (kept.size() > last_kept) why = "pruning kept more edges as the band widened";
    last_kept = kept.size();
  }

  // Coordinate descent never raises its objective between sweeps.
  Eigen::MatrixXd G(3, 3);
  G << 4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0;
  Eigen::VectorXd b(3);
  b << 1.0, -2.0, 0.5;
  rcnet::QuadraticSolveInfo info;
  rcnet::solve_l1_quadratic(G, b, 0.6, &info);
  if (!info.converged) why = "solver did not converge";
  for (std::size_t t = 1; t < info.objectives.size(); ++t)
    if (info.objectives[t] > info.objectives[t - 1] + 1e-12) why = "objective rose";

  // Panels survive a CSV round trip bit for bit.
  rcnet::TimeSeriesPanel panel;
  panel.values.resize(4, 23);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 23; ++k)
      panel.values(j, k) = std::sin(3.0 * j + k) * std::pow(10.0, (k % 5) - 2);
  panel.labels = {"a", "b", "c", "d"};
  const auto path = std::filesystem::temp_directory_path() /
                    ("rcnet_accept_" + std::to_string(::getpid()) + ".csv");
  rcnet::export_csv(panel, path);
  const auto back = rcnet::import_csv(path);
  std::filesystem::remove(path);
  if (back.labels != panel.labels || back.values != panel.values) why = "round trip changed";

  const double elapsed = seconds_since(start);
  if (elapsed >= 1.0 && why.empty()) why = "took " + fmt(elapsed) + " s";
  if (!why.empty()) return {false, why};
  return {true, "row sums, stability, threshold monotonicity, solver descent and CSV round "
                "trip all hold in " + fmt(elapsed) + " s"};
}

}  // namespace

int main() {
  const auto start = Clock::now();
  std::printf("acceptance run, 9 checks\n");

  check("exact recovery from white inputs", [] { return exact_recovery("white"); });
  check("exact recovery from colored inputs", [] { return exact_recovery("ar1"); });
  check("two-hop filters lock phase at pi", two_hop_phase);
  check("filters vanish beyond two hops", far_pairs_vanish);
  check("fitted filters converge to the analytic response", estimator_converges);
  check("one-step regression misses at least half the structure", regression_stays_wrong);
  check("covariance selection trails the filter pipeline", glasso_trails);
  check("small-sample penalty does not hurt", penalty_helps_when_starved);
  check("fast structural properties", fast_properties);

  std::printf("%d of 9 checks passed in %s s\n", 9 - failures, fmt(seconds_since(start)).c_str());
  return failures == 0 ? 0 : 1;
}
