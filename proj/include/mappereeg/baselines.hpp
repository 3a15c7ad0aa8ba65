#pragma once

#include "mappereeg/common.hpp"
#include "mappereeg/mapper.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mappereeg {

struct KMeansResult {
  Labels labels;
  Matrix centroids;
  /// Within-cluster SSE after each assignment step.
  std::vector<double> sse_trace;
  std::size_t iterations = 0;
};

inline constexpr std::size_t kKMeansMaxIter = 300;

/// Lloyd iterations from k-means++ seeding.
KMeansResult kmeans(const Matrix& X, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = kKMeansMaxIter);

enum class CovarianceType { full, tied, diag, spherical };

std::string to_string(CovarianceType c);
CovarianceType covariance_type_from_string(const std::string& s);

struct GmmResult {
  Labels labels;
  std::vector<double> weights;
  Matrix means;
  /// One d x d matrix per component (tied: the same matrix repeated).
  std::vector<Eigen::MatrixXd> covariances;
  std::vector<double> log_likelihood_trace;
  std::size_t iterations = 0;
};

inline constexpr double kGmmRegularization = 1e-6;
inline constexpr double kGmmTolerance = 1e-4;
inline constexpr std::size_t kGmmMaxIter = 200;

/// EM from a k-means start. Log-likelihoods are per-sample means.
GmmResult gmm_em(const Matrix& X, std::size_t n_components, CovarianceType type,
                 std::uint64_t seed);

struct HierarchicalResult {
  Labels labels;
  /// Ward merge costs in merge order.
  std::vector<double> merge_costs;
};

/// Ward agglomeration until n_clusters remain. Labels number clusters by
/// their smallest member index.
HierarchicalResult hierarchical(const Matrix& X, std::size_t n_clusters);

/// Full Ward merge tree; cut at any cluster count with cut_dendrogram.
struct Dendrogram {
  std::size_t n_points = 0;
  /// Merge t joins the clusters whose representatives are merges[t].first
  /// and merges[t].second (smallest member indices, first < second).
  std::vector<std::pair<std::size_t, std::size_t>> merges;
  std::vector<double> costs;
};
Dendrogram ward_dendrogram(const Matrix& X);
Labels cut_dendrogram(const Dendrogram& tree, std::size_t n_clusters);

/// Maps each raw cluster to the majority true label of its members (ties to
/// the smaller label); raw -1 maps to 0.
Labels baseline_predict_labels(std::span<const int> raw_labels, std::span<const int> true_labels);

enum class BaselineMethod { dbscan, kmeans, gmm, hierarchical };

std::string to_string(BaselineMethod m);

struct BaselineSpec {
  BaselineMethod method = BaselineMethod::kmeans;
  /// dbscan: eps, min_samples; kmeans/hierarchical: k; gmm: k, covariance.
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;

  /// "key=value;..." in key order.
  std::string params_text() const;
};

/// Raw cluster labels for one spec. Throws Error on invalid params.
Labels run_baseline(const Matrix& X, const BaselineSpec& spec, const Matrix* distances = nullptr);

/// Baseline grids: DBSCAN min_samples {4,8,...,64} x eps {0.5,...,10};
/// k in [2,10]; covariance in {full, tied, diag, spherical}.
struct BaselineGrid {
  std::vector<std::size_t> dbscan_min_samples;
  std::vector<double> dbscan_eps;
  std::vector<std::size_t> cluster_counts;
  std::vector<CovarianceType> covariance_types;
  std::vector<BaselineMethod> methods;
  std::uint64_t seed = 0;

  static BaselineGrid defaults();
  std::vector<BaselineSpec> expand() const;
};

BaselineGrid baseline_grid_from_json(const std::string& json_text);

}  // namespace mappereeg
