#pragma once

#include "mappereeg/mapper.hpp"

#include <map>
#include <optional>
#include <span>

namespace mappereeg {

inline constexpr int kNoiseLabel = 0;

struct ClusterPrediction {
  /// Per point; 0 is the noise cluster.
  Labels predicted;
  /// Indexed by component id; 0 for components left as noise.
  std::vector<int> component_label;
};

/// Turns Mapper components into per-point labels. Labels are handed out in
/// rounds: each still-unassigned label proposes the unassigned component
/// holding most of its points (ties to the smaller component id); among the
/// proposals, the label with the largest count inside its component wins
/// (ties to the smaller label). A label with no points in any remaining
/// component gets nothing. Leftover components and unclustered points are 0.
ClusterPrediction components_to_clusters(const MapperGraph& graph, std::span<const int> true_labels,
                                         std::size_t n_points);

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
  double weighted = 0.0;
};

/// Per-class F1 over the union of classes in both sequences.
F1Scores f1_scores(std::span<const int> truth, std::span<const int> predicted);

double accuracy(std::span<const int> truth, std::span<const int> predicted);

/// Mean silhouette with Euclidean distances; singleton clusters score 0.
double silhouette(const Matrix& X, std::span<const int> predicted);
double silhouette_precomputed(const Matrix& distances, std::span<const int> predicted);

/// Davies-Bouldin index with mean distance-to-centroid scatter.
double davies_bouldin(const Matrix& X, std::span<const int> predicted);

struct EvalReport {
  double accuracy = 0.0;
  double f1_macro = 0.0;
  double f1_weighted = 0.0;
  /// Empty when the index is undefined (e.g. a single predicted cluster).
  std::optional<double> silhouette;
  std::optional<double> davies_bouldin;
  std::optional<double> qmod;
  std::size_t n_components = 0;
};

/// Scores predicted labels against truth in the feature space X.
EvalReport evaluate_labels(const Matrix& X, std::span<const int> truth,
                           std::span<const int> predicted, const Matrix* distances = nullptr);

}  // namespace mappereeg
