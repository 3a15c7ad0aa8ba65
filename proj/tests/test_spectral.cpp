#include "mappereeg/recording.hpp"
#include "mappereeg/spectral.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace mappereeg;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> sinusoid(double f, double rate, std::size_t n, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * std::numbers::pi * f * i / rate + phase);
  return x;
}

double variance(std::span<const double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / static_cast<double>(x.size());
}

Recording single_channel(std::vector<double> x, double rate) {
  Recording rec;
  rec.name = "s";
  rec.sample_rate_hz = rate;
  rec.label_tracks["condition"] = std::vector<int>(x.size(), 1);
  rec.channels.push_back({"c0", std::move(x)});
  return rec;
}

}  // namespace

TEST_CASE("canonical band table") {
  const auto& b = canonical_bands();
  REQUIRE(b[0] == Band{"delta", 1, 4});
  REQUIRE(b[1] == Band{"theta", 4, 8});
  REQUIRE(b[2] == Band{"alpha", 8, 13});
  REQUIRE(b[3] == Band{"beta", 13, 30});
  REQUIRE(b[4] == Band{"gamma", 30, 50});
  REQUIRE(band_by_name("gamma").center_hz() == 40.0);
  REQUIRE(band_rank("gamma") > band_rank("delta"));
  REQUIRE_THROWS_AS(band_by_name("mu"), Error);
}

TEST_CASE("zero signal has zero density") {
  const std::vector<double> x(256, 0.0);
  const auto psd = windowed_psd(x, 100, 256);
  for (double d : psd.density) REQUIRE(d == 0.0);
  REQUIRE(band_power(psd, band_by_name("alpha")) == 0.0);
}

TEST_CASE("PSD frequency grid") {
  const std::vector<double> x(1000, 1.0);
  const auto psd = windowed_psd(x, 100, 1000);
  REQUIRE(psd.freqs_hz.size() == 501);
  REQUIRE(psd.resolution_hz() == Catch::Approx(0.1));
  REQUIRE(psd.freqs_hz.back() == Catch::Approx(50.0));
  REQUIRE_THROWS_AS(windowed_psd(x, 100, 1001), Error);
}

TEST_CASE("unit 10 Hz sinusoid: total power 0.5 and alpha holds 95 percent") {
  const auto x = sinusoid(10, 100, 1000);
  const auto psd = windowed_psd(x, 100, 1000);
  REQUIRE_THAT(total_power(psd), WithinRel(0.5, 0.05));
  REQUIRE(band_power(psd, band_by_name("alpha")) >= 0.95 * total_power(psd));
}

TEST_CASE("white noise total power matches variance on average") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 2.0);
  double mean_total = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    std::vector<double> x(1000);
    for (auto& v : x) v = n(rng);
    mean_total += total_power(windowed_psd(x, 250, 1000));
  }
  mean_total /= 100.0;
  REQUIRE_THAT(mean_total, WithinRel(4.0, 0.10));
}

TEST_CASE("band powers of disjoint bands sum to at most the total") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(1000);
  for (auto& v : x) v = n(rng);
  const auto psd = windowed_psd(x, 200, 1000);
  double sum = 0.0;
  for (const auto& b : canonical_bands()) {
    const double p = band_power(psd, b);
    REQUIRE(p >= 0.0);
    sum += p;
  }
  REQUIRE(sum <= total_power(psd) + 1e-9);
  REQUIRE_THROWS_WITH(band_power(psd, Band{"x", 150, 160}), ContainsSubstring("empty band"));
}

TEST_CASE("scaling a channel by c scales band power by c squared") {
  auto x = sinusoid(40, 250, 1000, 1.0, 0.3);
  const auto p1 = band_power(windowed_psd(x, 250, 1000), band_by_name("gamma"));
  for (auto& v : x) v *= 3.0;
  const auto p3 = band_power(windowed_psd(x, 250, 1000), band_by_name("gamma"));
  REQUIRE_THAT(p3, WithinRel(9.0 * p1, 1e-12));
}

TEST_CASE("window layout") {
  REQUIRE(window_starts(5000, 1000, 0.5).size() == 9);
  REQUIRE_THROWS_AS(window_starts(999, 1000, 0.5), Error);
  const auto starts = window_starts(5000, 1000, 0.5);
  for (std::size_t i = 0; i < starts.size(); ++i) REQUIRE(starts[i] == 500 * i);

  // Prepending k hops of zeros adds exactly k windows.
  auto x = sinusoid(10, 100, 3700);
  const auto base = power_sequence(single_channel(x, 100), band_by_name("alpha"), 1000, 0.5);
  x.insert(x.begin(), 3 * 500, 0.0);
  const auto shifted = power_sequence(single_channel(x, 100), band_by_name("alpha"), 1000, 0.5);
  REQUIRE(shifted.window_count() == base.window_count() + 3);
  REQUIRE_THROWS_AS(power_sequence(single_channel(std::vector<double>(10, 0.0), 100), band_by_name("alpha"), 1000, 0.5),
                    Error);
}

TEST_CASE("majority label ties go to the smaller label") {
  const std::vector<int> a{2, 2, 1, 1};
  REQUIRE(majority_label(a) == 1);
  const std::vector<int> b{3, 3, 3, 1};
  REQUIRE(majority_label(b) == 3);
}

TEST_CASE("window labels are per-window majorities") {
  Recording rec = single_channel(std::vector<double>(2000, 0.0), 100);
  auto& lab = rec.label_tracks["condition"];
  for (std::size_t i = 0; i < 2000; ++i) lab[i] = i < 1200 ? 1 : 2;
  const auto seq = power_sequence(rec, band_by_name("alpha"), 1000, 0.5);
  // Windows: [0,1000) -> 1, [500,1500) -> 700 vs 300 -> 1, [1000,2000) -> 200 vs 800 -> 2.
  REQUIRE(seq.window_labels.at("condition") == std::vector<int>{1, 1, 2});
}

TEST_CASE("power_sequences matches per-band power_sequence") {
  SynthSpec spec;
  spec.n_channels = 4;
  spec.duration_s = 30;
  spec.sample_rate_hz = 200;
  spec.noise_std = 0.1;
  spec.states.push_back({1, band_by_name("gamma"), {0, 1}, 1.0, 5.0});
  spec.states.push_back({2, band_by_name("theta"), {2, 3}, 1.0, 5.0});
  const auto rec = generate_synthetic(spec, 4);
  const auto& bands = canonical_bands();
  const auto all = power_sequences(rec, bands, 1000, 0.5);
  REQUIRE(all.size() == 5);
  for (std::size_t b = 0; b < 5; ++b) {
    const auto one = power_sequence(rec, bands[b], 1000, 0.5);
    REQUIRE(one.values.rows() == all[b].values.rows());
    REQUIRE((one.values - all[b].values).cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, one.values.maxCoeff()));
    REQUIRE(one.window_labels == all[b].window_labels);
  }
}

TEST_CASE("synthetic gamma states: boosted channels carry at least 5x the gamma power") {
  SynthSpec spec;
  spec.n_channels = 8;
  spec.duration_s = 40;
  spec.sample_rate_hz = 250;
  spec.noise_std = 0.1;
  spec.states.push_back({1, band_by_name("gamma"), {0, 1, 2, 3}, 1.0, 10.0});
  spec.states.push_back({2, band_by_name("gamma"), {4, 5, 6, 7}, 1.0, 10.0});
  const auto rec = generate_synthetic(spec, 2);
  const auto seq = power_sequence(rec, band_by_name("gamma"));
  const auto& labels = seq.window_labels.at("condition");
  double boosted = 0.0, quiet = 0.0;
  std::size_t nb = 0, nq = 0;
  for (Eigen::Index w = 0; w < seq.values.rows(); ++w) {
    // Skip windows straddling a state change.
    const std::size_t start = seq.window_start_sample[w];
    if (rec.labels("condition")[start] != rec.labels("condition")[start + 999]) continue;
    for (Eigen::Index c = 0; c < 8; ++c) {
      const bool is_boosted = (labels[w] == 1) == (c < 4);
      (is_boosted ? boosted : quiet) += seq.values(w, c);
      ++(is_boosted ? nb : nq);
    }
  }
  REQUIRE(boosted / nb >= 5.0 * quiet / nq);
}

TEST_CASE("integrated PSD tracks variance for sinusoid plus noise") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> freq(2.0, 45.0), amp(0.2, 3.0), ph(0.0, 6.28);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = amp(rng);
    auto x = sinusoid(freq(rng), 100, 1000, a, ph(rng));
    const double sd = 0.1 * a;
    for (auto& v : x) v += sd * n(rng);
    REQUIRE_THAT(total_power(windowed_psd(x, 100, 1000)), WithinRel(variance(x), 0.05));
  }
}
