#include "mappereeg/community.hpp"

#include <map>
#include <random>

namespace mappereeg {

CommunityAssignment node_communities(const std::vector<LabelCounts>& counts, std::uint64_t seed) {
  CommunityAssignment out;
  out.seed = seed;
  out.community_of.resize(counts.size());
  std::mt19937_64 rng(seed);
  for (std::size_t id = 0; id < counts.size(); ++id) {
    std::size_t best = 0;
    for (const auto& [label, n] : counts[id]) best = std::max(best, n);
    if (best == 0) throw Error("node " + std::to_string(id) + " has an empty label distribution");
    std::vector<int> tied;
    for (const auto& [label, n] : counts[id]) {
      if (n == best) tied.push_back(label);
    }
    if (tied.size() == 1) {
      out.community_of[id] = tied.front();
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
      out.community_of[id] = tied[pick(rng)];
      out.tie_nodes.insert(id);
    }
  }
  return out;
}

CommunityAssignment node_communities(const MapperGraph& graph, const std::string& track, std::uint64_t seed) {
  std::vector<LabelCounts> counts;
  counts.reserve(graph.nodes.size());
  for (const auto& node : graph.nodes) {
    const auto it = node.label_counts.find(track);
    if (it == node.label_counts.end()) throw Error("graph has no label counts for track " + track);
    counts.push_back(it->second);
  }
  return node_communities(counts, seed);
}

double qmod(std::size_t n_nodes, std::span<const std::pair<std::size_t, std::size_t>> edges,
            std::span<const int> community_of) {
  if (edges.empty()) throw Error("modularity undefined on edgeless graph");
  if (community_of.size() != n_nodes) throw Error("community assignment does not match node count");
  std::vector<long long> degree(n_nodes, 0);
  std::map<int, long long> internal_edges;
  for (const auto& [u, v] : edges) {
    if (u >= n_nodes || v >= n_nodes) throw Error("edge references a missing node");
    if (u == v) throw Error("self-loops are not allowed in a Mapper graph");
    ++degree[u];
    ++degree[v];
    if (community_of[u] == community_of[v]) ++internal_edges[community_of[u]];
  }
  std::map<int, long long> degree_sum;
  for (std::size_t i = 0; i < n_nodes; ++i) degree_sum[community_of[i]] += degree[i];

  const auto m = static_cast<double>(edges.size());
  double q = 0.0;
  for (const auto& [c, d] : degree_sum) {
    const auto it = internal_edges.find(c);
    const double inside = it == internal_edges.end() ? 0.0 : static_cast<double>(it->second);
    const double frac = static_cast<double>(d) / (2.0 * m);
    q += inside / m - frac * frac;
  }
  return q;
}

double qmod(const MapperGraph& graph, const CommunityAssignment& communities) {
  return qmod(graph.nodes.size(), graph.edges, communities.community_of);
}

}  // namespace mappereeg
