#pragma once

#include "mappereeg/mapper.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace mappereeg {

struct CommunityAssignment {
  /// Indexed by node id.
  std::vector<int> community_of;
  /// Nodes whose majority was an exact tie, resolved by a seeded draw.
  std::set<std::size_t> tie_nodes;
  std::uint64_t seed = 0;
};

/// Majority label per node from node.label_counts[track].
CommunityAssignment node_communities(const MapperGraph& graph, const std::string& track,
                                     std::uint64_t seed);
/// Same, from explicit per-node counts (indexed by node id).
CommunityAssignment node_communities(const std::vector<LabelCounts>& counts, std::uint64_t seed);

/// Newman modularity with unweighted degree as strength:
///   Q = 1/(2m) * sum_ij [A_ij - k_i k_j / (2m)] delta(c_i, c_j).
/// Throws Error on an edgeless graph.
double qmod(std::size_t n_nodes, std::span<const std::pair<std::size_t, std::size_t>> edges,
            std::span<const int> community_of);
double qmod(const MapperGraph& graph, const CommunityAssignment& communities);

}  // namespace mappereeg
