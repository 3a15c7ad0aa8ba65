#pragma once

#include "mappereeg/common.hpp"
#include "mappereeg/recording.hpp"
#include "mappereeg/spectral_band.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace mappereeg {

/// One-sided power spectral density, power per Hz.
struct PsdEstimate {
  std::vector<double> freqs_hz;
  std::vector<double> density;

  double resolution_hz() const { return freqs_hz.size() > 1 ? freqs_hz[1] - freqs_hz[0] : 0.0; }
};

/// Band power per window and channel. Rows are windows, columns channels.
struct BandPowerSequence {
  Band band;
  Matrix values;
  std::vector<std::size_t> window_start_sample;
  std::vector<std::string> channel_names;
  /// Majority label per window, keyed by track name.
  std::map<std::string, std::vector<int>> window_labels;

  std::size_t window_count() const { return window_start_sample.size(); }
};

/// Modified periodogram of the first window_len samples: mean removed, Hann
/// taper (periodic), one-sided, density scaling.
PsdEstimate windowed_psd(std::span<const double> samples, double sample_rate_hz,
                         std::size_t window_len);

/// Trapezoidal integral of the density over bins with lo <= f < hi.
double band_power(const PsdEstimate& psd, const Band& band);

/// Trapezoidal integral over every bin.
double total_power(const PsdEstimate& psd);

inline constexpr std::size_t kDefaultWindowLen = 1000;
inline constexpr double kDefaultWindowOverlap = 0.5;

/// Window starts at 0, hop, 2*hop, ... while start + window_len <= N,
/// hop = round(window_len * (1 - overlap)).
std::vector<std::size_t> window_starts(std::size_t n_samples, std::size_t window_len,
                                       double overlap_fraction);

/// Most frequent value in labels; ties go to the smaller value.
int majority_label(std::span<const int> labels);

BandPowerSequence power_sequence(const Recording& rec, const Band& band,
                                 std::size_t window_len = kDefaultWindowLen,
                                 double overlap_fraction = kDefaultWindowOverlap);

/// Same as calling power_sequence once per band, but each window's
/// periodogram is computed once and integrated over every band.
std::vector<BandPowerSequence> power_sequences(const Recording& rec, std::span<const Band> bands,
                                               std::size_t window_len = kDefaultWindowLen,
                                               double overlap_fraction = kDefaultWindowOverlap);

}  // namespace mappereeg
