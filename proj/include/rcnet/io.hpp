#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcnet/errors.hpp"
#include "rcnet/network.hpp"
#include "rcnet/topology.hpp"
#include "rcnet/wiener.hpp"

namespace rcnet {

using Json = nlohmann::json;

namespace detail {

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MalformedFile("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw MalformedFile("'" + path.string() + "': " + e.what());
  }
}

inline void write_json_file(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

/// FNV-1a over a string; used to fingerprint inputs in run manifests.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

// ===========================================================================
// Network files
// ===========================================================================

inline Json to_json(const RcNetwork& net) {
  Json nodes = Json::array();
  for (const RcNode& n : net.nodes()) {
    Json jn{{"id", n.id}, {"capacitance", n.capacitance}};
    if (n.ambient_resistance) jn["ambient_resistance"] = *n.ambient_resistance;
    nodes.push_back(jn);
  }
  Json edges = Json::array();
  for (const RcEdge& e : net.edges())
    edges.push_back({{"a", net.node(e.a).id}, {"b", net.node(e.b).id}, {"resistance", e.resistance}});
  return Json{{"nodes", nodes}, {"edges", edges}};
}

inline RcNetwork network_from_json(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("edges"))
    throw MalformedFile(where + ": expected an object with 'nodes' and 'edges'");
  RcNetwork net;
  std::map<std::string, int> index;
  for (const Json& jn : j.at("nodes")) {
    if (!jn.contains("id") || !jn.contains("capacitance"))
      throw MalformedFile(where + ": every node needs 'id' and 'capacitance'");
    const std::string id = jn.at("id").get<std::string>();
    std::optional<double> ambient;
    if (jn.contains("ambient_resistance")) ambient = jn.at("ambient_resistance").get<double>();
    index[id] = net.add_node(id, jn.at("capacitance").get<double>(), ambient);
  }
  for (const Json& je : j.at("edges")) {
    if (!je.contains("a") || !je.contains("b") || !je.contains("resistance"))
      throw MalformedFile(where + ": every edge needs 'a', 'b' and 'resistance'");
    const std::string a = je.at("a").get<std::string>();
    const std::string b = je.at("b").get<std::string>();
    if (!index.count(a) || !index.count(b))
      throw MalformedFile(where + ": edge (" + a + ", " + b + ") names an unknown node");
    net.add_edge(index.at(a), index.at(b), je.at("resistance").get<double>());
  }
  return net;
}

inline RcNetwork load_network(const std::filesystem::path& path) {
  return network_from_json(detail::read_json_file(path), "'" + path.string() + "'");
}

inline void save_network(const RcNetwork& net, const std::filesystem::path& path) {
  detail::write_json_file(to_json(net), path);
}

inline std::string network_fingerprint(const RcNetwork& net) {
  return detail::fnv1a_hex(to_json(net).dump());
}

// ===========================================================================
// Filter banks
// ===========================================================================

inline Json to_json(const FilterBank& bank, const std::vector<std::string>& labels = {}) {
  Json pairs = Json::array();
  const int m = bank.node_count();
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      const Eigen::VectorXd& h = bank.pair(j, i);
      pairs.push_back({{"target", j},
                       {"source", i},
                       {"coefficients", std::vector<double>(h.data(), h.data() + h.size())}});
    }
  Json out{{"node_count", m}, {"lag_order", bank.lag_order()}, {"pairs", pairs}};
  if (!labels.empty()) out["labels"] = labels;
  return out;
}

inline FilterBank filter_bank_from_json(const Json& j, const std::string& where) {
  if (!j.contains("node_count") || !j.contains("lag_order") || !j.contains("pairs"))
    throw MalformedFile(where + ": expected 'node_count', 'lag_order' and 'pairs'");
  FilterBank bank(j.at("node_count").get<int>(), j.at("lag_order").get<int>());
  const int span = 2 * bank.lag_order() + 1;
  for (const Json& jp : j.at("pairs")) {
    const auto coeffs = jp.at("coefficients").get<std::vector<double>>();
    if (static_cast<int>(coeffs.size()) != span)
      throw MalformedFile(where + ": coefficient run has wrong length");
    Eigen::VectorXd h(span);
    for (int t = 0; t < span; ++t) h(t) = coeffs[t];
    bank.pair(jp.at("target").get<int>(), jp.at("source").get<int>()) = h;
  }
  return bank;
}

inline void save_filter_bank(const FilterBank& bank, const std::filesystem::path& path,
                             const std::vector<std::string>& labels = {}) {
  detail::write_json_file(to_json(bank, labels), path);
}

inline FilterBank load_filter_bank(const std::filesystem::path& path) {
  return filter_bank_from_json(detail::read_json_file(path), "'" + path.string() + "'");
}

// ===========================================================================
// Graph estimates
// ===========================================================================

inline Json edges_to_json(const EdgeSet& edges, const std::vector<std::string>& labels) {
  Json out = Json::array();
  for (const auto& [a, b] : edges) out.push_back({labels.at(a), labels.at(b)});
  return out;
}

inline Json to_json(const GraphEstimate& est, const std::vector<std::string>& labels) {
  Json diags = Json::array();
  for (const PairDiagnostic& d : est.diagnostics)
    diags.push_back({{"target", labels.at(d.target)},
                     {"source", labels.at(d.source)},
                     {"h_inf", d.h_inf},
                     {"magnitude", d.magnitude},
                     {"abs_phase", d.abs_phase},
                     {"retained", d.retained},
                     {"min_abs_phase", d.min_abs_phase},
                     {"max_abs_phase", d.max_abs_phase},
                     {"phase_flat_pi", d.phase_flat_pi}});
  Json decisions = Json::array();
  for (const EdgeDecision& d : est.decisions)
    decisions.push_back({{"a", labels.at(d.edge.first)},
                         {"b", labels.at(d.edge.second)},
                         {"pruned", d.pruned},
                         {"reason", d.reason}});
  Json out{{"labels", labels},
           {"moral_edges", edges_to_json(est.moral_edges, labels)},
           {"pruned_edges", edges_to_json(est.pruned_edges, labels)},
           {"decisions", decisions},
           {"diagnostics", diags}};
  if (est.error) out["error"] = *est.error;
  return out;
}

inline void save_estimate(const GraphEstimate& est, const std::vector<std::string>& labels,
                          const std::filesystem::path& path) {
  detail::write_json_file(to_json(est, labels), path);
}

/// Read back the final edge set of a stored estimate, mapped onto the given
/// label order.
inline EdgeSet load_estimate_edges(const std::filesystem::path& path,
                                   const std::vector<std::string>& labels) {
  const Json j = detail::read_json_file(path);
  if (!j.contains("pruned_edges"))
    throw MalformedFile("'" + path.string() + "': no 'pruned_edges' field");
  std::map<std::string, int> index;
  for (std::size_t t = 0; t < labels.size(); ++t) index[labels[t]] = static_cast<int>(t);
  EdgeSet out;
  for (const Json& je : j.at("pruned_edges")) {
    const std::string a = je.at(0).get<std::string>();
    const std::string b = je.at(1).get<std::string>();
    if (!index.count(a) || !index.count(b))
      throw MalformedFile("'" + path.string() + "': edge (" + a + ", " + b +
                          ") names a node missing from the truth network");
    out.insert(index.at(a), index.at(b));
  }
  return out;
}

}  // namespace rcnet
