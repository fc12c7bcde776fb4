// Command line front end: simulate panels, learn topologies, run baselines,
// sweep sample-size grids, print analytic oracles, score stored estimates.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "rcnet.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string network_path;
  std::string out_dir;
};

rcnet::RunConfig resolve_config(const CommonFlags& flags) {
  rcnet::RunConfig cfg;
  if (!flags.config_path.empty()) cfg = rcnet::load_config(flags.config_path);
  if (!flags.network_path.empty()) cfg.network_path = flags.network_path;
  return cfg;
}

fs::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* root = std::getenv("RCNET_OUTPUT_ROOT")) return root;
  return ".";
}

rcnet::RcNetwork load_required_network(const rcnet::RunConfig& cfg) {
  if (cfg.network_path.empty())
    throw rcnet::ConfigError("no network file given (use --network or the config)");
  return rcnet::load_network(cfg.network_path);
}

void write_manifest(const rcnet::RunConfig& cfg, const rcnet::RcNetwork& net,
                    const std::string& command, const fs::path& dir) {
  rcnet::Json manifest{{"command", command},
                       {"network_fingerprint", rcnet::network_fingerprint(net)},
                       {"config", rcnet::to_json(cfg)}};
  rcnet::detail::write_json_file(manifest, dir / "manifest.json");
}

int find_node(const rcnet::RcNetwork& net, const std::string& id) {
  for (int j = 0; j < net.node_count(); ++j)
    if (net.node(j).id == id) return j;
  throw rcnet::ConfigError("node '" + id + "' is not in the network");
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonFlags& flags, const rcnet::RunConfig& cfg) {
  const rcnet::RcNetwork net = load_required_network(cfg);
  const rcnet::DiscreteDynamics dyn = rcnet::discretize(net, cfg.dt);
  const rcnet::TimeSeriesPanel panel =
      rcnet::simulate_panel(net, dyn, cfg.noise, cfg.samples, cfg.burn_in);

  const fs::path dir = resolve_out_dir(flags.out_dir);
  fs::create_directories(dir);
  rcnet::export_csv(panel, dir / "panel.csv");
  write_manifest(cfg, net, "simulate", dir);
  std::cout << (dir / "panel.csv").string() << '\n';
  return 0;
}

int cmd_learn(const CommonFlags& flags, rcnet::RunConfig cfg, const std::string& panel_path,
              const std::string& truth_path, bool adapt_lags) {
  rcnet::TimeSeriesPanel panel = rcnet::import_csv(panel_path);
  if (cfg.gamma_auto)
    cfg.learn.gamma = rcnet::low_sample_gamma(panel.node_count(), cfg.learn.lag_order,
                                              panel.sample_count());

  // Shrink the lag window when the panel is too short for the configured one,
  // so small demos still produce an estimate.
  if (adapt_lags) {
    const int m = panel.node_count();
    int F = cfg.learn.lag_order;
    while (F > 1 && panel.sample_count() <= 4L * m * (2L * F + 1)) --F;
    if (F != cfg.learn.lag_order) {
      std::cerr << "warning: short panel, lag order reduced from " << cfg.learn.lag_order
                << " to " << F << '\n';
      cfg.learn.lag_order = F;
    }
  }

  rcnet::GraphEstimate estimate;
  std::vector<std::string> labels = panel.labels;
  if (!truth_path.empty()) {
    const rcnet::RcNetwork truth_net = rcnet::load_network(truth_path);
    estimate = rcnet::learn_topology(panel, cfg.learn, rcnet::true_edge_set(truth_net));
  } else {
    estimate = rcnet::learn_topology(panel, cfg.learn);
  }

  const fs::path dir = resolve_out_dir(flags.out_dir);
  fs::create_directories(dir);
  rcnet::save_estimate(estimate, labels, dir / "estimate.json");
  std::cerr << "estimate written to " << (dir / "estimate.json").string() << '\n';
  if (estimate.error) std::cout << rcnet::detail::format_double(*estimate.error, 12) << '\n';
  return 0;
}

int cmd_baseline(const CommonFlags& flags, const rcnet::RunConfig& cfg,
                 const std::string& method, const std::string& panel_path,
                 const std::string& truth_path) {
  const rcnet::TimeSeriesPanel panel = rcnet::import_csv(panel_path);

  rcnet::EdgeSet edges;
  rcnet::Json extra;
  if (method == "regression") {
    const auto fit =
        rcnet::fit_regression(panel, cfg.regression_gamma, cfg.regression_threshold);
    edges = fit.edges();
    extra["threshold"] = fit.threshold;
    extra["gamma"] = fit.gamma;
  } else if (method == "glasso") {
    const auto fit = rcnet::fit_glasso(panel, cfg.glasso_lambda, cfg.glasso_threshold);
    edges = fit.edges();
    extra["threshold"] = fit.threshold;
    extra["lambda"] = fit.lambda;
  } else {
    throw rcnet::ConfigError("unknown baseline '" + method + "' (use regression or glasso)");
  }

  rcnet::Json out{{"method", method},
                  {"labels", panel.labels},
                  {"edges", rcnet::edges_to_json(edges, panel.labels)},
                  {"parameters", extra}};
  if (!truth_path.empty()) {
    const rcnet::RcNetwork truth_net = rcnet::load_network(truth_path);
    const double err = rcnet::reconstruction_error(edges, rcnet::true_edge_set(truth_net));
    out["error"] = err;
    std::cout << rcnet::detail::format_double(err, 12) << '\n';
  }
  const fs::path dir = resolve_out_dir(flags.out_dir);
  fs::create_directories(dir);
  rcnet::detail::write_json_file(out, dir / (method + "_edges.json"));
  std::cerr << "edges written to " << (dir / (method + "_edges.json")).string() << '\n';
  return 0;
}

int cmd_sweep(const CommonFlags& flags, const rcnet::RunConfig& cfg) {
  const rcnet::RcNetwork net = load_required_network(cfg);
  const rcnet::SweepResult sweep = rcnet::run_sweep(net, cfg, &std::cerr);

  const fs::path dir = resolve_out_dir(flags.out_dir);
  fs::create_directories(dir);
  rcnet::write_sweep_rows(sweep, dir / "rows.csv");
  rcnet::write_sweep_medians(sweep, cfg, dir / "medians.csv");
  write_manifest(cfg, net, "sweep", dir);
  std::cout << (dir / "medians.csv").string() << '\n';
  return 0;
}

int cmd_oracle(const rcnet::RunConfig& cfg, const std::string& pair_spec,
               const std::string& out_path) {
  const rcnet::RcNetwork net = load_required_network(cfg);
  const rcnet::DiscreteDynamics dyn = rcnet::discretize(net, cfg.dt);
  const rcnet::ZDomainModel model =
      rcnet::ZDomainModel::from(dyn, cfg.noise.plan(net.node_count()));

  const auto comma = pair_spec.find(',');
  if (comma == std::string::npos)
    throw rcnet::ConfigError("--pair expects two node ids, e.g. --pair core,p2");
  const int target = find_node(net, pair_spec.substr(0, comma));
  const int source = find_node(net, pair_spec.substr(comma + 1));

  const rcnet::FrequencyGrid grid = rcnet::FrequencyGrid::uniform(cfg.learn.grid_size);
  const auto response = rcnet::analytic_wiener(model, target, source, grid);
  const auto pathology = rcnet::check_phase_pi_pathology(model, target, source, grid);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw rcnet::Error("cannot open '" + out_path + "' for writing");
    out = &file;
  }
  *out << "omega,magnitude,phase,abs_phase,pi_conditions_hold\n";
  for (std::size_t t = 0; t < grid.size(); ++t) {
    const auto w = response[t];
    *out << rcnet::detail::format_double(grid.omegas[t], 12) << ','
         << rcnet::detail::format_double(std::abs(w), 12) << ','
         << rcnet::detail::format_double(std::arg(w), 12) << ','
         << rcnet::detail::format_double(std::abs(std::arg(w)), 12) << ','
         << (pathology.condition_holds[t] ? 1 : 0) << '\n';
  }
  std::cerr << "pair (" << net.node(target).id << ", " << net.node(source).id << "): "
            << (pathology.pathological()
                    ? "phase-pi conditions hold at every grid frequency"
                    : "phase-pi conditions violated at some frequency")
            << '\n';
  return 0;
}

int cmd_eval(const std::string& estimate_path, const std::string& truth_path) {
  const rcnet::RcNetwork net = rcnet::load_network(truth_path);
  const rcnet::EdgeSet estimate = rcnet::load_estimate_edges(estimate_path, net.labels());
  const double err = rcnet::reconstruction_error(estimate, rcnet::true_edge_set(net));
  std::cout << rcnet::detail::format_double(err, 12) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RC network simulation and topology learning"};
  app.require_subcommand(1);

  CommonFlags flags;
  rcnet::RunConfig overrides;

  // Values that override the config file when given on the command line.
  std::optional<std::string> noise_type;
  std::optional<double> variance, ar_coefficient, gamma, rho, tau, phase_floor;
  std::optional<long> samples, burn_in;
  std::optional<std::uint64_t> seed;
  std::optional<int> lag_order, grid_size;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path, "JSON run configuration");
    cmd->add_option("--network", flags.network_path, "network JSON file");
    cmd->add_option("--out", flags.out_dir, "output directory");
  };
  auto add_noise = [&](CLI::App* cmd) {
    cmd->add_option("--noise-type", noise_type, "white, ar1 or fir");
    cmd->add_option("--variance", variance, "innovation variance");
    cmd->add_option("--ar-coefficient", ar_coefficient, "AR(1) coloring coefficient");
    cmd->add_option("--seed", seed, "random seed");
  };
  auto add_learn = [&](CLI::App* cmd) {
    cmd->add_option("--lag-order", lag_order, "two-sided filter lag order");
    cmd->add_option("--gamma", gamma, "L1 weight for the filter fit");
    cmd->add_option("--rho", rho, "moral graph magnitude threshold");
    cmd->add_option("--tau", tau, "phase band width around pi");
    cmd->add_option("--phase-floor", phase_floor, "magnitude fraction below which phase is ignored");
    cmd->add_option("--grid-size", grid_size, "frequency grid size");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "simulate a temperature panel");
  add_common(simulate);
  add_noise(simulate);
  simulate->add_option("--samples", samples, "panel length after burn-in");
  simulate->add_option("--burn-in", burn_in, "steps dropped from the start");

  std::string panel_path, truth_path, method, pair_spec, estimate_path, oracle_out;
  bool gamma_auto = false, no_adapt_lags = false;

  CLI::App* learn = app.add_subcommand("learn", "estimate the topology from a panel");
  add_common(learn);
  add_learn(learn);
  learn->add_option("--panel", panel_path, "input panel CSV")->required();
  learn->add_option("--truth", truth_path, "network JSON to score against");
  learn->add_flag("--gamma-auto", gamma_auto, "use the low-sample L1 weight");
  learn->add_flag("--no-adapt-lags", no_adapt_lags, "fail instead of shrinking the lag window");

  CLI::App* baseline = app.add_subcommand("baseline", "run a comparison method");
  add_common(baseline);
  baseline->add_option("--method", method, "regression or glasso")->required();
  baseline->add_option("--panel", panel_path, "input panel CSV")->required();
  baseline->add_option("--truth", truth_path, "network JSON to score against");
  baseline->add_option("--gamma", gamma, "L1 weight (regression)");
  std::optional<double> lambda, threshold;
  baseline->add_option("--lambda", lambda, "L1 weight (glasso)");
  baseline->add_option("--threshold", threshold, "edge decision threshold");

  CLI::App* sweep = app.add_subcommand("sweep", "error curves over sample counts and seeds");
  add_common(sweep);

  CLI::App* oracle = app.add_subcommand("oracle", "analytic filter for one pair");
  add_common(oracle);
  add_noise(oracle);
  oracle->add_option("--pair", pair_spec, "target,source node ids")->required();
  oracle->add_option("--grid-size", grid_size, "frequency grid size");
  oracle->add_option("--table-out", oracle_out, "CSV path (default stdout)");

  CLI::App* eval = app.add_subcommand("eval", "score a stored estimate against a network");
  eval->add_option("--estimate", estimate_path, "estimate JSON")->required();
  eval->add_option("--truth", truth_path, "network JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    rcnet::RunConfig cfg = resolve_config(flags);
    if (noise_type) cfg.noise.type = *noise_type;
    if (variance) cfg.noise.variance = *variance;
    if (ar_coefficient) cfg.noise.ar_coefficient = *ar_coefficient;
    if (seed) cfg.noise.seed = *seed;
    if (samples) cfg.samples = *samples;
    if (burn_in) cfg.burn_in = *burn_in;
    if (lag_order) cfg.learn.lag_order = *lag_order;
    if (gamma) {
      cfg.learn.gamma = *gamma;
      cfg.regression_gamma = *gamma;
    }
    if (rho) cfg.learn.rho = *rho;
    if (tau) cfg.learn.tau = *tau;
    if (phase_floor) cfg.learn.phase_floor = *phase_floor;
    if (grid_size) cfg.learn.grid_size = *grid_size;
    if (lambda) cfg.glasso_lambda = *lambda;
    if (threshold) {
      cfg.regression_threshold = *threshold;
      cfg.glasso_threshold = *threshold;
    }
    cfg.gamma_auto = gamma_auto;

    if (simulate->parsed()) return cmd_simulate(flags, cfg);
    if (learn->parsed()) return cmd_learn(flags, cfg, panel_path, truth_path, !no_adapt_lags);
    if (baseline->parsed()) return cmd_baseline(flags, cfg, method, panel_path, truth_path);
    if (sweep->parsed()) return cmd_sweep(flags, cfg);
    if (oracle->parsed()) return cmd_oracle(cfg, pair_spec, oracle_out);
    if (eval->parsed()) return cmd_eval(estimate_path, truth_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
