#pragma once

// Test data generators and reference implementations written directly from
// the textbook definitions. Nothing here calls into the library's algorithms.

#include "mappereeg/common.hpp"
#include "mappereeg/cover.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <set>
#include <utility>
#include <vector>

namespace testsupport {

using mappereeg::Matrix;
using Edge = std::pair<std::size_t, std::size_t>;

inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Matrix X(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) X(i, j) = n(rng);
  return X;
}

/// Two isotropic blobs in `dim` dimensions, centers `separation` apart on
/// the first axis. Labels are 1 and 2, first half then second half.
inline std::pair<Matrix, std::vector<int>> two_blobs(std::size_t per_blob, std::size_t dim, double separation,
                                                     double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, spread);
  Matrix X(2 * per_blob, dim);
  std::vector<int> y(2 * per_blob);
  for (std::size_t i = 0; i < 2 * per_blob; ++i) {
    const bool second = i >= per_blob;
    for (std::size_t j = 0; j < dim; ++j) X(i, j) = n(rng) + (second && j == 0 ? separation : 0.0);
    y[i] = second ? 2 : 1;
  }
  return {X, y};
}

/// Noisy unit circle in the plane.
inline Matrix jittered_circle(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, sigma);
  Matrix X(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    X(i, 0) = std::cos(t) + jitter(rng);
    X(i, 1) = std::sin(t) + jitter(rng);
  }
  return X;
}

inline std::vector<Edge> random_simple_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  return edges;
}

/// Q = 1/(2m) sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j), as a literal
/// double sum over the adjacency matrix.
inline double modularity_double_sum(std::size_t n, const std::vector<Edge>& edges, const std::vector<int>& c) {
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  for (const auto& [u, v] : edges) {
    A[u][v] += 1.0;
    A[v][u] += 1.0;
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += A[i][j];
    two_m += k[i];
  }
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (c[i] == c[j]) q += A[i][j] - k[i] * k[j] / two_m;
  return q / two_m;
}

/// Union-find with path halving; returns a canonical root per element.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Same-partition test: two labelings agree up to renaming.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto [it1, new1] = ab.emplace(a[i], b[i]);
    const auto [it2, new2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) return false;
  }
  return true;
}

inline double euclid(const Matrix& X, std::size_t i, std::size_t j) { return (X.row(i) - X.row(j)).norm(); }

/// DBSCAN clusters as the components of the core eps-graph plus border
/// attachments, computed without any scan-order logic. Returns, for every
/// point, the set of core components it is eps-reachable from (empty =
/// noise). A core point's set has exactly one element.
inline std::vector<std::set<std::size_t>> dbscan_reachability(const Matrix& X, double eps, std::size_t min_samples) {
  const std::size_t n = static_cast<std::size_t>(X.rows());
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) count += euclid(X, i, j) <= eps;
    core[i] = count >= min_samples;
  }
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (core[i] && core[j] && euclid(X, i, j) <= eps) uf.unite(i, j);
  std::vector<std::set<std::size_t>> reach(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      reach[i].insert(uf.find(i));
      continue;
    }
    for (std::size_t j = 0; j < n; ++j)
      if (core[j] && euclid(X, i, j) <= eps) reach[i].insert(uf.find(j));
  }
  return reach;
}

/// Per-class F1 from a confusion count over the union of classes.
struct F1Reference {
  double micro, macro, weighted;
};

inline F1Reference f1_reference(const std::vector<int>& t, const std::vector<int>& p) {
  std::set<int> classes(t.begin(), t.end());
  classes.insert(p.begin(), p.end());
  double macro = 0.0, weighted = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < t.size(); ++i) correct += t[i] == p[i];
  for (int c : classes) {
    double tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      tp += t[i] == c && p[i] == c;
      fp += t[i] != c && p[i] == c;
      fn += t[i] == c && p[i] != c;
      support += t[i] == c;
    }
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
    macro += f1;
    weighted += f1 * support;
  }
  const double n = static_cast<double>(t.size());
  return {static_cast<double>(correct) / n, macro / static_cast<double>(classes.size()), weighted / n};
}

inline double silhouette_reference(const Matrix& X, const std::vector<int>& labels) {
  const std::size_t n = labels.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::map<int, std::pair<double, std::size_t>> sums;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      auto& s = sums[labels[j]];
      s.first += euclid(X, i, j);
      s.second += 1;
    }
    const auto own = sums.find(labels[i]);
    if (own == sums.end()) continue;  // singleton cluster scores 0
    const double a = own->second.first / static_cast<double>(own->second.second);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, s] : sums)
      if (label != labels[i]) b = std::min(b, s.first / static_cast<double>(s.second));
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

inline double davies_bouldin_reference(const Matrix& X, const std::vector<int>& labels) {
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  std::vector<Eigen::RowVectorXd> centroid;
  std::vector<double> scatter;
  for (const auto& [label, idx] : members) {
    Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(X.cols());
    for (auto i : idx) c += X.row(i);
    c /= static_cast<double>(idx.size());
    double s = 0.0;
    for (auto i : idx) s += (X.row(i) - c).norm();
    centroid.push_back(c);
    scatter.push_back(s / static_cast<double>(idx.size()));
  }
  const std::size_t k = centroid.size();
  double total = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    double worst = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      worst = std::max(worst, (scatter[a] + scatter[b]) / (centroid[a] - centroid[b]).norm());
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

/// Fraction of points whose label equals the majority label of their
/// cluster, i.e. accuracy after mapping each cluster to its majority class.
inline double mapped_accuracy(const std::vector<int>& truth, const std::vector<int>& clusters) {
  std::map<int, std::map<int, std::size_t>> counts;
  for (std::size_t i = 0; i < truth.size(); ++i) counts[clusters[i]][truth[i]]++;
  std::size_t hit = 0;
  for (const auto& [c, per] : counts) {
    std::size_t best = 0;
    for (const auto& [t, n] : per) best = std::max(best, n);
    hit += best;
  }
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

/// Bins containing a 2-D point, recomputed from bin geometry.
inline std::vector<std::size_t> bins_containing(const mappereeg::BinAssignment& a, double x, double y) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < a.bins.size(); ++k) {
    const auto& b = a.bins[k];
    if (std::abs(x - b.center[0]) <= b.half_width[0] && std::abs(y - b.center[1]) <= b.half_width[1]) out.push_back(k);
  }
  return out;
}

}  // namespace testsupport
