#include "mappereeg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace mappereeg {

ClusterPrediction components_to_clusters(const MapperGraph& graph, std::span<const int> true_labels,
                                         std::size_t n_points) {
  if (true_labels.size() != n_points) throw Error("label count does not match point count");
  constexpr auto kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp_of_point(n_points, kNone);
  for (const auto& node : graph.nodes) {
    const auto comp = graph.component_of.at(node.id);
    for (auto p : node.members) {
      if (p >= n_points) throw Error("node member outside the point range");
      if (comp_of_point[p] != kNone && comp_of_point[p] != comp) {
        throw Error("point shared by nodes in different components");
      }
      comp_of_point[p] = comp;
    }
  }

  // counts[c][label] over distinct points.
  std::vector<std::map<int, std::size_t>> counts(graph.n_components);
  for (std::size_t p = 0; p < n_points; ++p) {
    if (comp_of_point[p] != kNone) ++counts[comp_of_point[p]][true_labels[p]];
  }
  const std::set<int> label_set(true_labels.begin(), true_labels.end());
  std::vector<int> remaining(label_set.begin(), label_set.end());

  ClusterPrediction out;
  out.component_label.assign(graph.n_components, kNoiseLabel);
  std::vector<bool> taken(graph.n_components, false);
  while (!remaining.empty()) {
    // Each label proposes its best free component.
    std::size_t best_label_pos = kNone;
    std::size_t best_comp = kNone;
    std::size_t best_count = 0;
    for (std::size_t li = 0; li < remaining.size(); ++li) {
      const int label = remaining[li];
      std::size_t comp = kNone;
      std::size_t count = 0;
      for (std::size_t c = 0; c < graph.n_components; ++c) {
        if (taken[c]) continue;
        const auto it = counts[c].find(label);
        const std::size_t n = it == counts[c].end() ? 0 : it->second;
        if (n > count) {
          comp = c;
          count = n;
        }
      }
      if (comp != kNone && count > best_count) {
        best_label_pos = li;
        best_comp = comp;
        best_count = count;
      }
    }
    if (best_label_pos == kNone) break;
    out.component_label[best_comp] = remaining[best_label_pos];
    taken[best_comp] = true;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_label_pos));
  }

  out.predicted.assign(n_points, kNoiseLabel);
  for (std::size_t p = 0; p < n_points; ++p) {
    if (comp_of_point[p] != kNone) out.predicted[p] = out.component_label[comp_of_point[p]];
  }
  return out;
}

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw Error("label sequences differ in length");
  if (truth.empty()) throw Error("accuracy of empty label sequences");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

F1Scores f1_scores(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw Error("label sequences differ in length");
  if (truth.empty()) throw Error("F1 of empty label sequences");
  std::map<int, std::size_t> tp, fp, fn, support;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++support[truth[i]];
    if (truth[i] == predicted[i]) {
      ++tp[truth[i]];
      ++hits;
    } else {
      ++fp[predicted[i]];
      ++fn[truth[i]];
    }
  }
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(predicted.begin(), predicted.end());

  F1Scores out;
  out.micro = static_cast<double>(hits) / static_cast<double>(truth.size());
  double macro = 0.0;
  double weighted = 0.0;
  for (int c : classes) {
    const double t = static_cast<double>(tp[c]);
    const double precision_den = t + static_cast<double>(fp[c]);
    const double recall_den = t + static_cast<double>(fn[c]);
    const double precision = precision_den > 0 ? t / precision_den : 0.0;
    const double recall = recall_den > 0 ? t / recall_den : 0.0;
    const double f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    macro += f1;
    weighted += f1 * static_cast<double>(support[c]);
  }
  out.macro = macro / static_cast<double>(classes.size());
  out.weighted = weighted / static_cast<double>(truth.size());
  return out;
}

namespace {

// Maps arbitrary labels to 0..K-1 in ascending label order.
std::vector<std::size_t> dense_clusters(std::span<const int> labels, std::size_t& k) {
  std::map<int, std::size_t> index;
  for (int l : labels) index.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [_, v] : index) v = next++;
  k = next;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = index[labels[i]];
  return out;
}

template <typename Dist>
double silhouette_impl(std::size_t n, std::span<const int> predicted, Dist&& dist) {
  if (predicted.size() != n) throw Error("label count does not match point count");
  std::size_t k = 0;
  const auto cluster = dense_clusters(predicted, k);
  if (k < 2) throw Error("silhouette undefined for fewer than two clusters");
  std::vector<std::size_t> size(k, 0);
  for (auto c : cluster) ++size[c];

  std::vector<double> score(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const auto own = cluster[i];
    if (size[own] <= 1) return;
    std::vector<double> sums(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sums[cluster[j]] += dist(i, j);
    }
    const double a = sums[own] / static_cast<double>(size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(size[c]));
    }
    const double denom = std::max(a, b);
    score[i] = denom > 0 ? (b - a) / denom : 0.0;
  });
  double total = 0.0;
  for (double s : score) total += s;
  return total / static_cast<double>(n);
}

}  // namespace

double silhouette(const Matrix& X, std::span<const int> predicted) {
  return silhouette_impl(static_cast<std::size_t>(X.rows()), predicted, [&](std::size_t i, std::size_t j) {
    return (X.row(static_cast<Eigen::Index>(i)) - X.row(static_cast<Eigen::Index>(j))).norm();
  });
}

double silhouette_precomputed(const Matrix& distances, std::span<const int> predicted) {
  return silhouette_impl(static_cast<std::size_t>(distances.rows()), predicted, [&](std::size_t i, std::size_t j) {
    return distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  });
}

double davies_bouldin(const Matrix& X, std::span<const int> predicted) {
  if (predicted.size() != static_cast<std::size_t>(X.rows())) throw Error("label count does not match point count");
  std::size_t k = 0;
  const auto cluster = dense_clusters(predicted, k);
  if (k < 2) throw Error("Davies-Bouldin undefined for fewer than two clusters");

  Matrix centroids = Matrix::Zero(static_cast<Eigen::Index>(k), X.cols());
  std::vector<double> size(k, 0.0);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    centroids.row(static_cast<Eigen::Index>(cluster[static_cast<std::size_t>(i)])) += X.row(i);
    size[cluster[static_cast<std::size_t>(i)]] += 1.0;
  }
  for (std::size_t c = 0; c < k; ++c) centroids.row(static_cast<Eigen::Index>(c)) /= size[c];
  std::vector<double> scatter(k, 0.0);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const auto c = cluster[static_cast<std::size_t>(i)];
    scatter[c] += (X.row(i) - centroids.row(static_cast<Eigen::Index>(c))).norm();
  }
  for (std::size_t c = 0; c < k; ++c) scatter[c] /= size[c];

  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double sep = (centroids.row(static_cast<Eigen::Index>(i)) - centroids.row(static_cast<Eigen::Index>(j))).norm();
      const double spread = scatter[i] + scatter[j];
      double ratio = 0.0;
      if (sep > 0) {
        ratio = spread / sep;
      } else if (spread > 0) {
        throw Error("degenerate centroid pair");
      }
      worst = std::max(worst, ratio);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

EvalReport evaluate_labels(const Matrix& X, std::span<const int> truth, std::span<const int> predicted,
                           const Matrix* distances) {
  EvalReport report;
  const auto f1 = f1_scores(truth, predicted);
  report.accuracy = f1.micro;
  report.f1_macro = f1.macro;
  report.f1_weighted = f1.weighted;
  try {
    report.silhouette = distances ? silhouette_precomputed(*distances, predicted) : silhouette(X, predicted);
  } catch (const Error&) {
    report.silhouette.reset();
  }
  try {
    report.davies_bouldin = davies_bouldin(X, predicted);
  } catch (const Error&) {
    report.davies_bouldin.reset();
  }
  return report;
}

}  // namespace mappereeg
