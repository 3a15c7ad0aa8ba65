#include "mappereeg/lens.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>

namespace mappereeg {

std::string to_string(LensMethod m) {
  switch (m) {
    case LensMethod::pca: return "pca";
    case LensMethod::tsne: return "tsne";
    case LensMethod::coords: return "coords";
  }
  return "?";
}

LensMethod lens_method_from_string(const std::string& s) {
  if (s == "pca") return LensMethod::pca;
  if (s == "tsne") return LensMethod::tsne;
  if (s == "coords") return LensMethod::coords;
  throw Error("unknown lens method: " + s);
}

PcaResult pca(const Matrix& X, std::size_t out_dim) {
  const auto n = X.rows();
  const auto c = X.cols();
  if (n < 2) throw Error("PCA needs at least two rows");
  if (static_cast<Eigen::Index>(out_dim) > c) throw Error("PCA output dimension exceeds input columns");

  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("PCA eigendecomposition failed");

  PcaResult result;
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  for (Eigen::Index k = c - 1; k >= 0; --k) result.eigenvalues.push_back(std::max(evals(k), 0.0));
  const double top = result.eigenvalues.front();
  const double zero_tol = 1e-12 * std::max(top, std::numeric_limits<double>::min());

  result.embedding.method = LensMethod::pca;
  result.embedding.points = Matrix::Zero(n, static_cast<Eigen::Index>(out_dim));
  for (std::size_t d = 0; d < out_dim; ++d) {
    if (!(result.eigenvalues[d] > zero_tol)) {
      ++result.padded_axes;
      continue;
    }
    Eigen::VectorXd v = solver.eigenvectors().col(c - 1 - static_cast<Eigen::Index>(d));
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    result.embedding.points.col(static_cast<Eigen::Index>(d)) = centered * v;
  }
  return result;
}

Embedding2D pca_project(const Matrix& X, std::size_t out_dim) {
  auto result = pca(X, out_dim);
  if (result.padded_axes > 0) {
    std::cerr << "warning: PCA input has fewer than " << out_dim
              << " nonzero eigenvalues; padding with zero coordinates\n";
  }
  return std::move(result.embedding);
}

Matrix conditional_affinities(const Matrix& X, double perplexity, std::vector<double>* entropy_bits) {
  const auto n = X.rows();
  if (!(perplexity > 0.0)) throw Error("perplexity must be positive");
  if (!(3.0 * perplexity < static_cast<double>(n))) {
    throw Error("perplexity infeasible: need 3 * perplexity < number of points");
  }
  const double target = std::log(perplexity);
  constexpr double kTol = 1e-5;
  constexpr int kMaxSteps = 50;

  Matrix P = Matrix::Zero(n, n);
  std::vector<double> bits(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t iu) {
    const auto i = static_cast<Eigen::Index>(iu);
    Eigen::VectorXd d2(n);
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      d2(j) = (X.row(i) - X.row(j)).squaredNorm();
      if (j != i) dmin = std::min(dmin, d2(j));
    }
    double beta = 1.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    Eigen::VectorXd p(n);
    double entropy = 0.0;
    for (int step = 0; step < kMaxSteps; ++step) {
      double sum = 0.0;
      double weighted = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        // Shifting by the nearest distance leaves the normalized row unchanged.
        const double shifted = d2(j) - dmin;
        p(j) = j == i ? 0.0 : std::exp(-shifted * beta);
        sum += p(j);
        weighted += shifted * p(j);
      }
      entropy = std::log(sum) + beta * weighted / sum;
      p /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < kTol) break;
      if (diff > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = std::isinf(lo) ? beta / 2.0 : 0.5 * (beta + lo);
      }
    }
    P.row(i) = p.transpose();
    bits[iu] = entropy / std::numbers::ln2;
  });
  if (entropy_bits) *entropy_bits = std::move(bits);
  return P;
}

namespace {

double kl_divergence(const Matrix& P, const Matrix& Y) {
  const auto n = Y.rows();
  std::vector<double> row_z(static_cast<std::size_t>(n), 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t iu) {
    const auto i = static_cast<Eigen::Index>(iu);
    double z = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) z += 1.0 / (1.0 + (Y.row(i) - Y.row(j)).squaredNorm());
    }
    row_z[iu] = z;
  });
  double z = 0.0;
  for (double v : row_z) z += v;
  std::vector<double> row_kl(static_cast<std::size_t>(n), 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t iu) {
    const auto i = static_cast<Eigen::Index>(iu);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double q = 1.0 / (1.0 + (Y.row(i) - Y.row(j)).squaredNorm()) / z;
      const double p = P(i, j);
      acc += p * std::log(p / std::max(q, std::numeric_limits<double>::min()));
    }
    row_kl[iu] = acc;
  });
  double kl = 0.0;
  for (double v : row_kl) kl += v;
  return kl;
}

}  // namespace

Embedding2D tsne_project(const Matrix& X, const TsneParams& params, TsneTrace* trace) {
  const auto n = X.rows();
  std::vector<double> bits;
  const Matrix cond = conditional_affinities(X, params.perplexity, &bits);
  Matrix P = (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
  P = P.cwiseMax(1e-12);
  P.diagonal().setZero();

  Embedding2D emb;
  emb.method = LensMethod::tsne;
  emb.seed = params.seed;
  Matrix& Y = emb.points;
  Y.resize(n, 2);
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> init(0.0, 1e-4);
  for (Eigen::Index i = 0; i < n; ++i) {
    Y(i, 0) = init(rng);
    Y(i, 1) = init(rng);
  }

  Matrix update = Matrix::Zero(n, 2);
  Matrix gains = Matrix::Ones(n, 2);
  Matrix grad(n, 2);
  Matrix num(n, n);
  std::vector<double> row_z(static_cast<std::size_t>(n));
  double kl_after_exaggeration = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t iter = 0; iter < params.iters; ++iter) {
    const double exaggeration = iter < params.exaggeration_iters ? params.early_exaggeration : 1.0;
    const double momentum = iter < params.momentum_switch_iter ? params.initial_momentum : params.final_momentum;

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t iu) {
      const auto i = static_cast<Eigen::Index>(iu);
      const double yi0 = Y(i, 0);
      const double yi1 = Y(i, 1);
      double z = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d0 = yi0 - Y(j, 0);
        const double d1 = yi1 - Y(j, 1);
        const double q = j == i ? 0.0 : 1.0 / (1.0 + d0 * d0 + d1 * d1);
        num(i, j) = q;
        z += q;
      }
      row_z[iu] = z;
    });
    double z = 0.0;
    for (double v : row_z) z += v;
    const double inv_z = 1.0 / z;

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t iu) {
      const auto i = static_cast<Eigen::Index>(iu);
      const double yi0 = Y(i, 0);
      const double yi1 = Y(i, 1);
      double g0 = 0.0;
      double g1 = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double q = num(i, j);
        const double mult = (exaggeration * P(i, j) - q * inv_z) * q;
        g0 += mult * (yi0 - Y(j, 0));
        g1 += mult * (yi1 - Y(j, 1));
      }
      grad(i, 0) = 4.0 * g0;
      grad(i, 1) = 4.0 * g1;
    });

    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index d = 0; d < 2; ++d) {
        const bool same_sign = (grad(i, d) > 0) == (update(i, d) > 0);
        gains(i, d) = same_sign ? gains(i, d) * 0.8 : gains(i, d) + 0.2;
        gains(i, d) = std::max(gains(i, d), 0.01);
        update(i, d) = momentum * update(i, d) - params.learning_rate * gains(i, d) * grad(i, d);
        Y(i, d) += update(i, d);
      }
    }
    const Eigen::RowVector2d mean = Y.colwise().mean();
    Y.rowwise() -= mean;

    if (trace && iter + 1 == params.exaggeration_iters) kl_after_exaggeration = kl_divergence(P, Y);
  }

  if (trace) {
    trace->kl_after_exaggeration =
        std::isnan(kl_after_exaggeration) ? kl_divergence(P, Y) : kl_after_exaggeration;
    trace->kl_final = kl_divergence(P, Y);
    trace->row_entropy_bits = std::move(bits);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(Y(i, 0)) || !std::isfinite(Y(i, 1))) throw Error("t-SNE diverged to non-finite coordinates");
  }
  return emb;
}

Embedding2D coords_project(const Matrix& X, const std::vector<std::size_t>& axes) {
  if (axes.empty() || axes.size() > 2) throw Error("coords lens takes one or two axes");
  Embedding2D emb;
  emb.method = LensMethod::coords;
  emb.points = Matrix::Zero(X.rows(), 2);
  for (std::size_t d = 0; d < axes.size(); ++d) {
    if (static_cast<Eigen::Index>(axes[d]) >= X.cols()) throw Error("coords lens axis out of range");
    emb.points.col(static_cast<Eigen::Index>(d)) = X.col(static_cast<Eigen::Index>(axes[d]));
  }
  return emb;
}

}  // namespace mappereeg
