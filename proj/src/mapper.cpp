#include "mappereeg/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace mappereeg {

namespace {

constexpr int kUnvisited = -2;
constexpr int kNoise = -1;

// DBSCAN given a symmetric distance accessor over n points.
template <typename Dist>
Labels dbscan_impl(std::size_t n, const DbscanParams& params, Dist&& dist) {
  if (!(params.eps > 0.0)) throw Error("DBSCAN eps must be positive");
  if (params.min_samples < 1) throw Error("DBSCAN min_samples must be at least 1");

  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    neighbors[i].push_back(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist(i, j) <= params.eps) {
        neighbors[i].push_back(j);
        neighbors[j].push_back(i);
      }
    }
  }
  for (auto& nb : neighbors) std::sort(nb.begin(), nb.end());
  auto is_core = [&](std::size_t i) { return neighbors[i].size() >= params.min_samples; };

  Labels labels(n, kUnvisited);
  int cluster = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (labels[p] != kUnvisited) continue;
    if (!is_core(p)) {
      labels[p] = kNoise;
      continue;
    }
    labels[p] = cluster;
    std::deque<std::size_t> queue(neighbors[p].begin(), neighbors[p].end());
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      if (labels[q] == kNoise) {
        labels[q] = cluster;  // border point
        continue;
      }
      if (labels[q] != kUnvisited) continue;
      labels[q] = cluster;
      if (is_core(q)) queue.insert(queue.end(), neighbors[q].begin(), neighbors[q].end());
    }
    ++cluster;
  }
  return labels;
}

double kth_smallest_other(std::vector<double>& row, std::size_t self, std::size_t k) {
  row.erase(row.begin() + static_cast<std::ptrdiff_t>(self));
  const std::size_t kk = std::min(k, row.size());
  std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kk - 1), row.end());
  return row[kk - 1];
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Matrix pairwise_distances(const Matrix& X) {
  const auto n = X.rows();
  Matrix D(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t iu) {
    const auto i = static_cast<Eigen::Index>(iu);
    for (Eigen::Index j = 0; j < n; ++j) D(i, j) = (X.row(i) - X.row(j)).norm();
  });
  return D;
}

Labels dbscan(const Matrix& X, const DbscanParams& params) {
  if (X.rows() == 0) throw Error("DBSCAN needs at least one point");
  return dbscan_impl(static_cast<std::size_t>(X.rows()), params, [&](std::size_t i, std::size_t j) {
    return (X.row(static_cast<Eigen::Index>(i)) - X.row(static_cast<Eigen::Index>(j))).norm();
  });
}

Labels dbscan_precomputed(const Matrix& distances, const DbscanParams& params) {
  if (distances.rows() == 0 || distances.rows() != distances.cols()) {
    throw Error("DBSCAN needs a non-empty square distance matrix");
  }
  return dbscan_impl(static_cast<std::size_t>(distances.rows()), params, [&](std::size_t i, std::size_t j) {
    return distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  });
}

double median_kth_neighbor_distance(const Matrix& X, std::size_t k) {
  if (X.rows() < 2) throw Error("k-NN distance needs at least two points");
  if (k < 1) throw Error("k must be at least 1");
  const auto n = X.rows();
  std::vector<double> kth(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t iu) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      row[static_cast<std::size_t>(j)] = (X.row(static_cast<Eigen::Index>(iu)) - X.row(j)).norm();
    }
    kth[iu] = kth_smallest_other(row, iu, k);
  });
  return median_of(std::move(kth));
}

double median_kth_neighbor_distance_precomputed(const Matrix& distances, std::size_t k) {
  if (distances.rows() < 2) throw Error("k-NN distance needs at least two points");
  if (k < 1) throw Error("k must be at least 1");
  const auto n = distances.rows();
  std::vector<double> kth(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> row(distances.row(i).data(), distances.row(i).data() + n);
    kth[static_cast<std::size_t>(i)] = kth_smallest_other(row, static_cast<std::size_t>(i), k);
  }
  return median_of(std::move(kth));
}

long long MapperGraph::cycle_rank() const {
  return static_cast<long long>(edges.size()) - static_cast<long long>(nodes.size()) +
         static_cast<long long>(n_components);
}

Components connected_components(std::size_t n_nodes, std::span<const std::pair<std::size_t, std::size_t>> edges) {
  std::vector<std::vector<std::size_t>> adj(n_nodes);
  for (const auto& [u, v] : edges) {
    if (u >= n_nodes || v >= n_nodes) throw Error("edge references a missing node");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  constexpr auto kNone = static_cast<std::size_t>(-1);
  Components out;
  out.component_of.assign(n_nodes, kNone);
  for (std::size_t start = 0; start < n_nodes; ++start) {
    if (out.component_of[start] != kNone) continue;
    const std::size_t id = out.count++;
    std::vector<std::size_t> stack{start};
    out.component_of[start] = id;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (auto v : adj[u]) {
        if (out.component_of[v] == kNone) {
          out.component_of[v] = id;
          stack.push_back(v);
        }
      }
    }
  }
  return out;
}

Components connected_components(const MapperGraph& graph) {
  return connected_components(graph.nodes.size(), graph.edges);
}

namespace {

template <typename BinDbscan>
MapperGraph build_mapper_impl(std::size_t n_points, const BinAssignment& assignment, BinDbscan&& run_bin) {
  if (assignment.point_count() != n_points) throw Error("cover does not match the number of feature rows");
  const auto members = assignment.bin_members();

  std::vector<Labels> bin_labels(members.size());
  parallel_for(members.size(), [&](std::size_t b) {
    if (!members[b].empty()) bin_labels[b] = run_bin(members[b]);
  });

  MapperGraph graph;
  graph.n_points = n_points;
  for (std::size_t b = 0; b < members.size(); ++b) {
    const auto& pts = members[b];
    if (pts.empty()) continue;
    const auto& labels = bin_labels[b];
    int n_clusters = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (labels[k] < 0) ++graph.n_noise_points;
      n_clusters = std::max(n_clusters, labels[k] + 1);
    }
    const std::size_t first_id = graph.nodes.size();
    for (int c = 0; c < n_clusters; ++c) {
      MapperNode node;
      node.id = first_id + static_cast<std::size_t>(c);
      node.bin = assignment.bins[b].index;
      graph.nodes.push_back(std::move(node));
    }
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (labels[k] >= 0) graph.nodes[first_id + static_cast<std::size_t>(labels[k])].members.push_back(pts[k]);
    }
  }

  std::vector<std::vector<std::size_t>> nodes_of_point(n_points);
  for (const auto& node : graph.nodes) {
    for (auto p : node.members) nodes_of_point[p].push_back(node.id);
  }
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& ids : nodes_of_point) {
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t c = a + 1; c < ids.size(); ++c) edges.emplace(std::min(ids[a], ids[c]), std::max(ids[a], ids[c]));
    }
  }
  graph.edges.assign(edges.begin(), edges.end());
  auto comps = connected_components(graph);
  graph.n_components = comps.count;
  graph.component_of = std::move(comps.component_of);
  return graph;
}

}  // namespace

MapperGraph build_mapper(const Matrix& X_high, const BinAssignment& assignment, const DbscanParams& params) {
  return build_mapper_impl(static_cast<std::size_t>(X_high.rows()), assignment,
                           [&](const std::vector<std::size_t>& pts) {
                             return dbscan_impl(pts.size(), params, [&](std::size_t i, std::size_t j) {
                               return (X_high.row(static_cast<Eigen::Index>(pts[i])) -
                                       X_high.row(static_cast<Eigen::Index>(pts[j])))
                                   .norm();
                             });
                           });
}

MapperGraph build_mapper_precomputed(const Matrix& distances, const BinAssignment& assignment,
                                     const DbscanParams& params) {
  return build_mapper_impl(static_cast<std::size_t>(distances.rows()), assignment,
                           [&](const std::vector<std::size_t>& pts) {
                             return dbscan_impl(pts.size(), params, [&](std::size_t i, std::size_t j) {
                               return distances(static_cast<Eigen::Index>(pts[i]), static_cast<Eigen::Index>(pts[j]));
                             });
                           });
}

void attach_labels(MapperGraph& graph, const std::string& track, std::span<const int> labels) {
  for (auto& node : graph.nodes) {
    auto& counts = node.label_counts[track];
    counts.clear();
    for (auto p : node.members) {
      if (p >= labels.size()) throw Error("label track shorter than the point cloud");
      ++counts[labels[p]];
    }
  }
}

}  // namespace mappereeg
