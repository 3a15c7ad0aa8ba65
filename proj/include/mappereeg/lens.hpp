#pragma once

#include "mappereeg/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mappereeg {

enum class LensMethod { pca, tsne, coords };

std::string to_string(LensMethod m);
LensMethod lens_method_from_string(const std::string& s);

/// N x 2 projection; row i is the image of input row i.
struct Embedding2D {
  Matrix points;
  LensMethod method = LensMethod::pca;
  std::uint64_t seed = 0;
};

struct PcaResult {
  Embedding2D embedding;
  /// Covariance eigenvalues, descending, all of them.
  std::vector<double> eigenvalues;
  /// Number of requested axes padded with zeros because the input had too
  /// few nonzero eigenvalues.
  std::size_t padded_axes = 0;
};

/// Projection onto the top out_dim covariance eigenvectors of the centered
/// data. Each eigenvector is signed so its largest-magnitude entry is positive.
PcaResult pca(const Matrix& X, std::size_t out_dim = 2);
Embedding2D pca_project(const Matrix& X, std::size_t out_dim = 2);

struct TsneParams {
  double perplexity = 30.0;
  std::size_t iters = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iters = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::size_t momentum_switch_iter = 250;
  std::uint64_t seed = 0;
};

struct TsneTrace {
  /// KL(P || Q) with unexaggerated P, after the last exaggerated iteration.
  double kl_after_exaggeration = 0.0;
  double kl_final = 0.0;
  /// Per-point entropy (bits) of the calibrated conditional affinities.
  std::vector<double> row_entropy_bits;
};

/// Conditional Gaussian affinities p_{j|i} (row-stochastic, zero diagonal)
/// with per-row precision bisected to hit the target perplexity.
Matrix conditional_affinities(const Matrix& X, double perplexity,
                              std::vector<double>* entropy_bits = nullptr);

/// Exact-gradient t-SNE to two dimensions.
Embedding2D tsne_project(const Matrix& X, const TsneParams& params, TsneTrace* trace = nullptr);

/// Embedding from selected input columns; with a single axis the second
/// coordinate is zero.
Embedding2D coords_project(const Matrix& X, const std::vector<std::size_t>& axes);

}  // namespace mappereeg
