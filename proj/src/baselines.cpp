#include "mappereeg/baselines.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace mappereeg {

namespace {

double squared_distance(const Matrix& A, Eigen::Index i, const Matrix& B, Eigen::Index j) {
  return (A.row(i) - B.row(j)).squaredNorm();
}

// Index of the nearest centroid; ties go to the smaller index.
Eigen::Index nearest(const Matrix& X, Eigen::Index i, const Matrix& C, double* d2 = nullptr) {
  Eigen::Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < C.rows(); ++c) {
    const double d = squared_distance(X, i, C, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (d2) *d2 = best_d;
  return best;
}

Matrix kmeans_plus_plus(const Matrix& X, std::size_t k, std::mt19937_64& rng) {
  const auto n = X.rows();
  Matrix C(static_cast<Eigen::Index>(k), X.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  C.row(0) = X.row(first(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = squared_distance(X, i, C, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index chosen = n - 1;
    if (total > 0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (acc > target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = first(rng);
    }
    C.row(static_cast<Eigen::Index>(c)) = X.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& d = d2[static_cast<std::size_t>(i)];
      d = std::min(d, squared_distance(X, i, C, static_cast<Eigen::Index>(c)));
    }
  }
  return C;
}

}  // namespace

KMeansResult kmeans(const Matrix& X, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
  const auto n = X.rows();
  if (k < 1) throw Error("k-means needs k >= 1");
  if (static_cast<Eigen::Index>(k) > n) throw Error("k-means: k exceeds the number of points");
  std::mt19937_64 rng(seed);
  KMeansResult out;
  out.centroids = kmeans_plus_plus(X, k, rng);
  out.labels.assign(static_cast<std::size_t>(n), -1);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    double sse = 0.0;
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = static_cast<int>(nearest(X, i, out.centroids, &d2[static_cast<std::size_t>(i)]));
      sse += d2[static_cast<std::size_t>(i)];
      if (out.labels[static_cast<std::size_t>(i)] != c) {
        out.labels[static_cast<std::size_t>(i)] = c;
        changed = true;
      }
    }
    out.sse_trace.push_back(sse);
    out.iterations = iter + 1;
    if (!changed) break;

    Matrix sums = Matrix::Zero(static_cast<Eigen::Index>(k), X.cols());
    std::vector<std::size_t> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)]);
      sums.row(static_cast<Eigen::Index>(c)) += X.row(i);
      ++counts[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        out.centroids.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
        continue;
      }
      // Empty cluster: move it onto the point farthest from its centroid.
      Eigen::Index far = 0;
      for (Eigen::Index i = 1; i < n; ++i) {
        if (d2[static_cast<std::size_t>(i)] > d2[static_cast<std::size_t>(far)]) far = i;
      }
      out.centroids.row(static_cast<Eigen::Index>(c)) = X.row(far);
      d2[static_cast<std::size_t>(far)] = 0.0;
    }
  }
  return out;
}

std::string to_string(CovarianceType c) {
  switch (c) {
    case CovarianceType::full: return "full";
    case CovarianceType::tied: return "tied";
    case CovarianceType::diag: return "diag";
    case CovarianceType::spherical: return "spherical";
  }
  return "?";
}

CovarianceType covariance_type_from_string(const std::string& s) {
  if (s == "full") return CovarianceType::full;
  if (s == "tied") return CovarianceType::tied;
  if (s == "diag") return CovarianceType::diag;
  if (s == "spherical" || s == "sphere") return CovarianceType::spherical;
  throw Error("unknown covariance type: " + s);
}

namespace {

struct GmmState {
  std::vector<double> weights;
  Matrix means;
  std::vector<Eigen::MatrixXd> covariances;
};

GmmState m_step(const Matrix& X, const Eigen::MatrixXd& resp, CovarianceType type) {
  const auto n = X.rows();
  const auto d = X.cols();
  const auto k = resp.cols();
  GmmState s;
  s.means.resize(k, d);
  s.weights.resize(static_cast<std::size_t>(k));
  const Eigen::VectorXd nk = resp.colwise().sum().transpose().array() + 10.0 * std::numeric_limits<double>::epsilon();
  for (Eigen::Index c = 0; c < k; ++c) {
    s.weights[static_cast<std::size_t>(c)] = nk(c) / static_cast<double>(n);
    s.means.row(c) = (resp.col(c).transpose() * X) / nk(c);
  }
  std::vector<Eigen::MatrixXd> full(static_cast<std::size_t>(k));
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::MatrixXd centered = X.rowwise() - s.means.row(c);
    full[static_cast<std::size_t>(c)] =
        (centered.transpose() * resp.col(c).asDiagonal() * centered) / nk(c);
  }
  const Eigen::MatrixXd reg = kGmmRegularization * Eigen::MatrixXd::Identity(d, d);
  s.covariances.resize(static_cast<std::size_t>(k));
  switch (type) {
    case CovarianceType::full:
      for (Eigen::Index c = 0; c < k; ++c) s.covariances[static_cast<std::size_t>(c)] = full[static_cast<std::size_t>(c)] + reg;
      break;
    case CovarianceType::tied: {
      Eigen::MatrixXd tied = Eigen::MatrixXd::Zero(d, d);
      for (Eigen::Index c = 0; c < k; ++c) tied += full[static_cast<std::size_t>(c)] * nk(c);
      tied /= static_cast<double>(n);
      for (auto& cov : s.covariances) cov = tied + reg;
      break;
    }
    case CovarianceType::diag:
      for (Eigen::Index c = 0; c < k; ++c) {
        s.covariances[static_cast<std::size_t>(c)] = Eigen::MatrixXd(full[static_cast<std::size_t>(c)].diagonal().asDiagonal()) + reg;
      }
      break;
    case CovarianceType::spherical:
      for (Eigen::Index c = 0; c < k; ++c) {
        const double var = full[static_cast<std::size_t>(c)].diagonal().mean();
        s.covariances[static_cast<std::size_t>(c)] = (var + kGmmRegularization) * Eigen::MatrixXd::Identity(d, d);
      }
      break;
  }
  return s;
}

// Per-sample log(weight_c * N(x | c)); returns the mean log-likelihood and
// fills normalized responsibilities.
double e_step(const Matrix& X, const GmmState& s, Eigen::MatrixXd& resp) {
  const auto n = X.rows();
  const auto d = X.cols();
  const auto k = s.means.rows();
  Eigen::MatrixXd logp(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::LLT<Eigen::MatrixXd> llt(s.covariances[static_cast<std::size_t>(c)]);
    if (llt.info() != Eigen::Success) throw Error("singular covariance despite regularization");
    const Eigen::MatrixXd L = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) log_det += 2.0 * std::log(L(i, i));
    const Eigen::MatrixXd centered = (X.rowwise() - s.means.row(c)).transpose();
    const Eigen::MatrixXd solved = L.triangularView<Eigen::Lower>().solve(centered);
    const Eigen::VectorXd maha = solved.colwise().squaredNorm().transpose();
    const double w = s.weights[static_cast<std::size_t>(c)];
    logp.col(c) = (-0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det + maha.array())).matrix();
    logp.col(c).array() += std::log(w);
  }
  resp.resize(n, k);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mx = logp.row(i).maxCoeff();
    const double lse = mx + std::log((logp.row(i).array() - mx).exp().sum());
    resp.row(i) = (logp.row(i).array() - lse).exp().matrix();
    total += lse;
  }
  return total / static_cast<double>(n);
}

}  // namespace

GmmResult gmm_em(const Matrix& X, std::size_t n_components, CovarianceType type, std::uint64_t seed) {
  const auto n = X.rows();
  if (n_components < 1) throw Error("GMM needs at least one component");
  if (static_cast<Eigen::Index>(n_components) > n) throw Error("GMM: more components than points");
  const auto init = kmeans(X, n_components, seed);
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(n_components));
  for (Eigen::Index i = 0; i < n; ++i) resp(i, init.labels[static_cast<std::size_t>(i)]) = 1.0;

  GmmResult out;
  GmmState state = m_step(X, resp, type);
  for (std::size_t iter = 0; iter < kGmmMaxIter; ++iter) {
    const double ll = e_step(X, state, resp);
    out.log_likelihood_trace.push_back(ll);
    out.iterations = iter + 1;
    const bool converged = iter > 0 && std::abs(ll - out.log_likelihood_trace[iter - 1]) < kGmmTolerance;
    if (converged) break;
    state = m_step(X, resp, type);
  }
  out.labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index arg = 0;
    resp.row(i).maxCoeff(&arg);
    out.labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  out.weights = state.weights;
  out.means = state.means;
  out.covariances = state.covariances;
  return out;
}

Dendrogram ward_dendrogram(const Matrix& X) {
  const auto n = static_cast<std::size_t>(X.rows());
  if (n == 0) throw Error("hierarchical clustering needs at least one point");
  Dendrogram tree;
  tree.n_points = n;
  if (n == 1) return tree;

  // Lance-Williams on squared distances; D(a, b) equals twice the SSE
  // increase of merging a and b.
  Matrix D(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          squared_distance(X, static_cast<Eigen::Index>(i), X, static_cast<Eigen::Index>(j));
    }
  });
  std::vector<bool> active(n, true);
  std::vector<double> size(n, 1.0);
  std::vector<std::size_t> nn(n, 0);
  std::vector<double> nn_d(n, 0.0);
  auto d = [&](std::size_t a, std::size_t b) -> double& {
    return D(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  };
  auto refresh = [&](std::size_t a) {
    nn_d[a] = std::numeric_limits<double>::infinity();
    nn[a] = a;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a || !active[b]) continue;
      if (d(a, b) < nn_d[a]) {
        nn_d[a] = d(a, b);
        nn[a] = b;
      }
    }
  };
  for (std::size_t a = 0; a < n; ++a) refresh(a);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = n, bj = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
      if (!active[a]) continue;
      const std::size_t lo = std::min(a, nn[a]);
      const std::size_t hi = std::max(a, nn[a]);
      if (nn_d[a] < best || (nn_d[a] == best && std::pair(lo, hi) < std::pair(bi, bj))) {
        best = nn_d[a];
        bi = lo;
        bj = hi;
      }
    }
    tree.merges.emplace_back(bi, bj);
    tree.costs.push_back(best);

    const double ni = size[bi];
    const double nj = size[bj];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double nk = size[k];
      const double updated = ((ni + nk) * d(k, bi) + (nj + nk) * d(k, bj) - nk * best) / (ni + nj + nk);
      d(k, bi) = updated;
      d(bi, k) = updated;
    }
    active[bj] = false;
    size[bi] = ni + nj;

    refresh(bi);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi) continue;
      if (nn[k] == bi || nn[k] == bj) {
        refresh(k);
      } else if (d(k, bi) < nn_d[k] || (d(k, bi) == nn_d[k] && bi < nn[k])) {
        nn_d[k] = d(k, bi);
        nn[k] = bi;
      }
    }
  }
  return tree;
}

Labels cut_dendrogram(const Dendrogram& tree, std::size_t n_clusters) {
  const std::size_t n = tree.n_points;
  if (n_clusters < 1 || n_clusters > n) throw Error("cluster count must be in [1, N]");
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t t = 0; t < n - n_clusters; ++t) {
    const auto [a, b] = tree.merges[t];
    parent[find(b)] = find(a);
  }
  // Roots are smallest members; number clusters in ascending root order.
  std::vector<int> id(n, -1);
  int next = 0;
  Labels labels(n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto r = find(p);
    if (id[r] < 0) id[r] = next++;
    labels[p] = id[r];
  }
  return labels;
}

HierarchicalResult hierarchical(const Matrix& X, std::size_t n_clusters) {
  if (n_clusters < 1 || static_cast<Eigen::Index>(n_clusters) > X.rows()) {
    throw Error("hierarchical: cluster count must be in [1, N]");
  }
  const auto tree = ward_dendrogram(X);
  HierarchicalResult out;
  out.labels = cut_dendrogram(tree, n_clusters);
  out.merge_costs.assign(tree.costs.begin(),
                         tree.costs.begin() + static_cast<std::ptrdiff_t>(tree.n_points - n_clusters));
  return out;
}

Labels baseline_predict_labels(std::span<const int> raw_labels, std::span<const int> true_labels) {
  if (raw_labels.size() != true_labels.size()) throw Error("label sequences differ in length");
  std::map<int, std::map<int, std::size_t>> votes;
  for (std::size_t i = 0; i < raw_labels.size(); ++i) {
    if (raw_labels[i] >= 0) ++votes[raw_labels[i]][true_labels[i]];
  }
  std::map<int, int> mapping;
  for (const auto& [raw, counts] : votes) {
    int best = counts.begin()->first;
    std::size_t best_n = 0;
    for (const auto& [label, n] : counts) {
      if (n > best_n) {
        best = label;
        best_n = n;
      }
    }
    mapping[raw] = best;
  }
  Labels out(raw_labels.size());
  for (std::size_t i = 0; i < raw_labels.size(); ++i) {
    out[i] = raw_labels[i] < 0 ? 0 : mapping[raw_labels[i]];
  }
  return out;
}

std::string to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::dbscan: return "dbscan";
    case BaselineMethod::kmeans: return "kmeans";
    case BaselineMethod::gmm: return "gmm";
    case BaselineMethod::hierarchical: return "hierarchical";
  }
  return "?";
}

namespace {

BaselineMethod baseline_method_from_string(const std::string& s) {
  if (s == "dbscan") return BaselineMethod::dbscan;
  if (s == "kmeans") return BaselineMethod::kmeans;
  if (s == "gmm") return BaselineMethod::gmm;
  if (s == "hierarchical") return BaselineMethod::hierarchical;
  throw Error("unknown baseline method: " + s);
}

const std::string& require(const std::map<std::string, std::string>& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) throw Error("missing baseline parameter: " + key);
  return it->second;
}

std::size_t require_count(const std::map<std::string, std::string>& params, const std::string& key) {
  const auto& text = require(params, key);
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || text.empty() || text[0] == '-') throw Error("invalid " + key + ": " + text);
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string BaselineSpec::params_text() const {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += ";";
    out += k + "=" + v;
  }
  return out;
}

Labels run_baseline(const Matrix& X, const BaselineSpec& spec, const Matrix* distances) {
  switch (spec.method) {
    case BaselineMethod::dbscan: {
      DbscanParams p;
      const auto& eps_text = require(spec.params, "eps");
      try {
        p.eps = std::stod(eps_text);
      } catch (const std::exception&) {
        throw Error("invalid eps: " + eps_text);
      }
      p.min_samples = require_count(spec.params, "min_samples");
      return distances ? dbscan_precomputed(*distances, p) : dbscan(X, p);
    }
    case BaselineMethod::kmeans:
      return kmeans(X, require_count(spec.params, "k"), spec.seed).labels;
    case BaselineMethod::gmm:
      return gmm_em(X, require_count(spec.params, "k"), covariance_type_from_string(require(spec.params, "covariance")),
                    spec.seed)
          .labels;
    case BaselineMethod::hierarchical:
      return hierarchical(X, require_count(spec.params, "k")).labels;
  }
  throw Error("unknown baseline method");
}

BaselineGrid BaselineGrid::defaults() {
  BaselineGrid g;
  for (std::size_t ms = 4; ms <= 64; ms += 4) g.dbscan_min_samples.push_back(ms);
  for (int e = 1; e <= 20; ++e) g.dbscan_eps.push_back(0.5 * e);
  for (std::size_t k = 2; k <= 10; ++k) g.cluster_counts.push_back(k);
  g.covariance_types = {CovarianceType::full, CovarianceType::tied, CovarianceType::diag, CovarianceType::spherical};
  g.methods = {BaselineMethod::dbscan, BaselineMethod::kmeans, BaselineMethod::gmm, BaselineMethod::hierarchical};
  return g;
}

std::vector<BaselineSpec> BaselineGrid::expand() const {
  std::vector<BaselineSpec> out;
  for (auto method : methods) {
    switch (method) {
      case BaselineMethod::dbscan:
        for (auto ms : dbscan_min_samples) {
          for (double eps : dbscan_eps) {
            out.push_back({method, {{"eps", format_double(eps)}, {"min_samples", std::to_string(ms)}}, seed});
          }
        }
        break;
      case BaselineMethod::kmeans:
      case BaselineMethod::hierarchical:
        for (auto k : cluster_counts) out.push_back({method, {{"k", std::to_string(k)}}, seed});
        break;
      case BaselineMethod::gmm:
        for (auto k : cluster_counts) {
          for (auto cov : covariance_types) {
            out.push_back({method, {{"covariance", to_string(cov)}, {"k", std::to_string(k)}}, seed});
          }
        }
        break;
    }
  }
  return out;
}

BaselineGrid baseline_grid_from_json(const std::string& json_text) {
  using nlohmann::json;
  const json j = json::parse(json_text);
  BaselineGrid g = BaselineGrid::defaults();
  for (const auto& [key, value] : j.items()) {
    if (key == "methods") {
      g.methods.clear();
      for (const auto& m : value) g.methods.push_back(baseline_method_from_string(m.get<std::string>()));
    } else if (key == "dbscan_min_samples") {
      g.dbscan_min_samples = value.get<std::vector<std::size_t>>();
    } else if (key == "dbscan_eps") {
      g.dbscan_eps = value.get<std::vector<double>>();
    } else if (key == "clusters") {
      g.cluster_counts = value.get<std::vector<std::size_t>>();
    } else if (key == "covariance") {
      g.covariance_types.clear();
      for (const auto& c : value) g.covariance_types.push_back(covariance_type_from_string(c.get<std::string>()));
    } else if (key == "seed") {
      g.seed = value.get<std::uint64_t>();
    } else {
      throw Error("unknown baseline grid key: " + key);
    }
  }
  return g;
}

}  // namespace mappereeg
