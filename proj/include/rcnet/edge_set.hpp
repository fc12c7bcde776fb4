#pragma once

#include <set>
#include <utility>
#include <vector>

#include "rcnet/errors.hpp"

namespace rcnet {

/// Unordered node pair, stored with first < second.
using Edge = std::pair<int, int>;

inline Edge make_edge(int a, int b) {
  if (a == b) throw Error("edge endpoints must differ");
  return a < b ? Edge{a, b} : Edge{b, a};
}

/// Set of undirected edges over nodes indexed 0..m-1.
class EdgeSet {
 public:
  EdgeSet() = default;

  void insert(int a, int b) { edges_.insert(make_edge(a, b)); }
  bool contains(int a, int b) const { return edges_.count(make_edge(a, b)) > 0; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }
  bool operator==(const EdgeSet&) const = default;

  std::size_t symmetric_difference_size(const EdgeSet& other) const {
    std::size_t n = 0;
    for (const Edge& e : edges_)
      if (!other.edges_.count(e)) ++n;
    for (const Edge& e : other.edges_)
      if (!edges_.count(e)) ++n;
    return n;
  }

 private:
  std::set<Edge> edges_;
};

inline std::vector<std::set<int>> neighbor_sets(const EdgeSet& edges, int node_count) {
  std::vector<std::set<int>> nb(node_count);
  for (const auto& [a, b] : edges) {
    if (a < 0 || b >= node_count)
      throw DimensionMismatch("edge endpoint out of range for node count");
    nb[a].insert(b);
    nb[b].insert(a);
  }
  return nb;
}

/// Two-hop reachability: i is in result[j] iff some k != i,j is adjacent to both.
inline std::vector<std::set<int>> two_hop_sets(const EdgeSet& edges, int node_count) {
  const auto nb = neighbor_sets(edges, node_count);
  std::vector<std::set<int>> th(node_count);
  for (int k = 0; k < node_count; ++k)
    for (int i : nb[k])
      for (int j : nb[k])
        if (i != j) th[j].insert(i);
  return th;
}

enum class PairKind {
  NonAdjacent,        // neither neighbors nor two-hop
  NeighborOnly,       // edge, no shared neighbor
  NeighborAndTwoHop,  // edge plus at least one shared neighbor
  StrictTwoHop        // no edge, at least one shared neighbor
};

inline PairKind classify_pair(const EdgeSet& edges, int node_count, int j, int i) {
  if (j == i) throw Error("pair endpoints must differ");
  const auto nb = neighbor_sets(edges, node_count);
  const auto th = two_hop_sets(edges, node_count);
  const bool adjacent = nb[j].count(i) > 0;
  const bool two_hop = th[j].count(i) > 0;
  if (adjacent && two_hop) return PairKind::NeighborAndTwoHop;
  if (adjacent) return PairKind::NeighborOnly;
  if (two_hop) return PairKind::StrictTwoHop;
  return PairKind::NonAdjacent;
}

}  // namespace rcnet
