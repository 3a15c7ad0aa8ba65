#include "mappereeg/baselines.hpp"
#include "mappereeg/metrics.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace mappereeg;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

double sse(const Matrix& X, const std::vector<std::size_t>& idx) {
  Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(X.cols());
  for (auto i : idx) c += X.row(i);
  c /= static_cast<double>(idx.size());
  double s = 0.0;
  for (auto i : idx) s += (X.row(i) - c).squaredNorm();
  return s;
}

double mapped(const Labels& raw, const std::vector<int>& truth) {
  return testsupport::mapped_accuracy(truth, baseline_predict_labels(raw, truth));
}

}  // namespace

TEST_CASE("every baseline recovers two separated blobs") {
  const auto [X, y] = testsupport::two_blobs(150, 8, 12.0, 1.0, 1);
  REQUIRE(mapped(kmeans(X, 2, 1).labels, y) >= 0.99);
  REQUIRE(mapped(gmm_em(X, 2, CovarianceType::full, 1).labels, y) >= 0.99);
  REQUIRE(mapped(hierarchical(X, 2).labels, y) >= 0.99);
  const auto db = dbscan(X, {median_kth_neighbor_distance(X) * 1.5, kDefaultMinSamples});
  REQUIRE(mapped(db, y) >= 0.99);
  // DBSCAN noise maps to 0, which is never a true label.
  const auto pred = baseline_predict_labels(db, y);
  REQUIRE(accuracy(y, pred) >= 0.99);
}

TEST_CASE("k-means SSE never increases and is reproducible") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix X = testsupport::gaussian_matrix(120, 3, rng);
    const auto r = kmeans(X, 2 + trial % 6, trial);
    REQUIRE(!r.sse_trace.empty());
    for (std::size_t t = 1; t < r.sse_trace.size(); ++t) REQUIRE(r.sse_trace[t] <= r.sse_trace[t - 1] * (1 + 1e-12));
    // The reported labels are the nearest-centroid assignment.
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < r.labels.size(); ++i) members[r.labels[i]].push_back(i);
    double total = 0.0;
    for (const auto& [_, idx] : members) total += sse(X, idx);
    REQUIRE(total <= r.sse_trace.back() * (1 + 1e-9));
    REQUIRE(kmeans(X, 2 + trial % 6, trial).labels == r.labels);
  }
  REQUIRE_THROWS_AS(kmeans(Matrix::Zero(3, 2), 4, 0), Error);
}

TEST_CASE("GMM log-likelihood never decreases for every covariance type") {
  std::mt19937_64 rng(3);
  for (auto type : {CovarianceType::full, CovarianceType::tied, CovarianceType::diag, CovarianceType::spherical}) {
    for (int trial = 0; trial < 8; ++trial) {
      const Matrix X = testsupport::gaussian_matrix(150, 3, rng);
      const auto r = gmm_em(X, 2 + trial % 4, type, trial);
      REQUIRE(r.log_likelihood_trace.size() >= 1);
      for (std::size_t t = 1; t < r.log_likelihood_trace.size(); ++t)
        REQUIRE(r.log_likelihood_trace[t] >= r.log_likelihood_trace[t - 1] - 1e-9);
      double wsum = 0.0;
      for (double w : r.weights) wsum += w;
      REQUIRE_THAT(wsum, WithinAbs(1.0, 1e-9));
    }
    REQUIRE(covariance_type_from_string(to_string(type)) == type);
  }
  REQUIRE_THROWS_AS(covariance_type_from_string("banded"), Error);
}

TEST_CASE("Ward merges match a brute-force SSE-increase oracle") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 25;
    const Matrix X = testsupport::gaussian_matrix(n, 2, rng);
    const auto tree = ward_dendrogram(X);
    REQUIRE(tree.merges.size() == n - 1);

    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
    for (std::size_t step = 0; step + 1 < n; ++step) {
      std::size_t ba = 0, bb = 1;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < clusters.size(); ++a) {
        for (std::size_t b = a + 1; b < clusters.size(); ++b) {
          auto u = clusters[a];
          u.insert(u.end(), clusters[b].begin(), clusters[b].end());
          const double inc = sse(X, u) - sse(X, clusters[a]) - sse(X, clusters[b]);
          if (inc < best) {
            best = inc;
            ba = a;
            bb = b;
          }
        }
      }
      REQUIRE_THAT(tree.costs[step], WithinAbs(2.0 * best, 1e-9));
      clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
      clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));

      const std::size_t k = clusters.size();
      std::vector<int> oracle(n);
      for (std::size_t c = 0; c < k; ++c)
        for (auto p : clusters[c]) oracle[p] = static_cast<int>(c);
      REQUIRE(testsupport::same_partition(cut_dendrogram(tree, k), oracle));
    }
  }
}

TEST_CASE("hierarchical labels number clusters by smallest member") {
  Matrix X(5, 1);
  X << 10.0, 0.0, 10.1, 0.1, 50.0;
  const auto r = hierarchical(X, 3);
  REQUIRE(r.labels == Labels{0, 1, 0, 1, 2});
  REQUIRE(r.merge_costs.size() == 2);
  REQUIRE(hierarchical(X, 5).labels == Labels{0, 1, 2, 3, 4});
  REQUIRE_THROWS_AS(hierarchical(X, 6), Error);
}

TEST_CASE("baseline label mapping uses majorities and sends noise to 0") {
  const std::vector<int> raw{0, 0, 0, 1, 1, -1, 2, 2};
  const std::vector<int> truth{5, 5, 6, 6, 7, 5, 9, 8};
  // Cluster 1 ties 6/7 -> 6; cluster 2 ties 8/9 -> 8.
  REQUIRE(baseline_predict_labels(raw, truth) == Labels{5, 5, 5, 6, 6, 0, 8, 8});
}

TEST_CASE("baseline grid expansion and specs") {
  const auto g = BaselineGrid::defaults();
  REQUIRE(g.dbscan_min_samples.size() == 16);
  REQUIRE(g.dbscan_eps.size() == 20);
  REQUIRE(g.dbscan_eps.front() == 0.5);
  REQUIRE(g.dbscan_eps.back() == 10.0);
  REQUIRE(g.expand().size() == 16 * 20 + 9 + 9 * 4 + 9);

  const auto small = baseline_grid_from_json(R"({"methods":["kmeans","gmm"],"clusters":[2,3],"covariance":["diag"],"seed":5})");
  const auto specs = small.expand();
  REQUIRE(specs.size() == 4);
  REQUIRE(specs[0].params_text() == "k=2");
  REQUIRE(specs[2].params_text() == "covariance=diag;k=2");
  REQUIRE(specs[3].seed == 5);
  REQUIRE_THROWS_WITH(baseline_grid_from_json(R"({"colour":1})"), ContainsSubstring("unknown baseline grid key"));

  const auto [X, y] = testsupport::two_blobs(20, 2, 10.0, 1.0, 6);
  REQUIRE(run_baseline(X, specs[0]) == kmeans(X, 2, 5).labels);
  BaselineSpec bad{BaselineMethod::dbscan, {{"eps", "-1"}, {"min_samples", "4"}}, 0};
  REQUIRE_THROWS_AS(run_baseline(X, bad), Error);
  BaselineSpec missing{BaselineMethod::kmeans, {}, 0};
  REQUIRE_THROWS_WITH(run_baseline(X, missing), ContainsSubstring("missing baseline parameter"));
}
