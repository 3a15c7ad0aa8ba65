#pragma once

#include "mappereeg/common.hpp"
#include "mappereeg/cover.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mappereeg {

struct DbscanParams {
  double eps = 1.0;
  std::size_t min_samples = 5;
};

inline constexpr std::size_t kDefaultMinSamples = 5;
inline constexpr std::size_t kAutoEpsNeighbor = 5;

/// Dense symmetric Euclidean distance matrix over the rows of X.
Matrix pairwise_distances(const Matrix& X);

/// DBSCAN over the rows of X. Labels are 0.. in discovery order, -1 noise.
Labels dbscan(const Matrix& X, const DbscanParams& params);
/// Same, reading distances from a precomputed matrix.
Labels dbscan_precomputed(const Matrix& distances, const DbscanParams& params);

/// Median over points of the distance to the k-th nearest other point.
double median_kth_neighbor_distance(const Matrix& X, std::size_t k = kAutoEpsNeighbor);
double median_kth_neighbor_distance_precomputed(const Matrix& distances,
                                                std::size_t k = kAutoEpsNeighbor);

using LabelCounts = std::map<int, std::size_t>;

struct MapperNode {
  std::size_t id = 0;
  BinIndex bin;
  /// Point indices, ascending.
  std::vector<std::size_t> members;
  /// Label counts over members, keyed by track name.
  std::map<std::string, LabelCounts> label_counts;
};

struct MapperGraph {
  std::vector<MapperNode> nodes;
  /// (u, v) with u < v, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> component_of;
  std::size_t n_components = 0;
  std::size_t n_noise_points = 0;
  std::size_t n_points = 0;

  /// E - V + C.
  long long cycle_rank() const;
};

/// Per-bin DBSCAN in the original feature space, one node per cluster,
/// edges between nodes sharing a point, then components.
MapperGraph build_mapper(const Matrix& X_high, const BinAssignment& assignment,
                         const DbscanParams& params);
/// Variant with a precomputed distance matrix over the rows of X_high.
MapperGraph build_mapper_precomputed(const Matrix& distances, const BinAssignment& assignment,
                                     const DbscanParams& params);

/// Component ids 0..C-1 ordered by smallest contained node id.
struct Components {
  std::size_t count = 0;
  std::vector<std::size_t> component_of;
};
Components connected_components(std::size_t n_nodes,
                                std::span<const std::pair<std::size_t, std::size_t>> edges);
Components connected_components(const MapperGraph& graph);

/// Fills each node's label_counts[track] from per-point labels.
void attach_labels(MapperGraph& graph, const std::string& track, std::span<const int> labels);

}  // namespace mappereeg
