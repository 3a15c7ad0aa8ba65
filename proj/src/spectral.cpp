#include "mappereeg/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace mappereeg {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex g_plan_mutex;

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::lock_guard lock(g_plan_mutex);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard lock(g_plan_mutex);
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  void execute() { fftw_execute(plan_); }
  double power(std::size_t k) const { return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1]; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

std::vector<double> hann_periodic(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

void periodogram_into(RealFft& fft, std::span<const double> x, double fs, const std::vector<double>& window,
                      double window_power, PsdEstimate& psd) {
  const std::size_t n = fft.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i];
  mean /= static_cast<double>(n);
  double* in = fft.input();
  for (std::size_t i = 0; i < n; ++i) in[i] = (x[i] - mean) * window[i];
  fft.execute();
  const std::size_t bins = n / 2 + 1;
  psd.freqs_hz.resize(bins);
  psd.density.resize(bins);
  const double scale = 1.0 / (fs * window_power);
  for (std::size_t k = 0; k < bins; ++k) {
    psd.freqs_hz[k] = static_cast<double>(k) * fs / static_cast<double>(n);
    double p = fft.power(k) * scale;
    const bool nyquist = (n % 2 == 0) && k == n / 2;
    if (k != 0 && !nyquist) p *= 2.0;
    psd.density[k] = p;
  }
}

double sum_of_squares(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

}  // namespace

const std::array<Band, 5>& canonical_bands() {
  static const std::array<Band, 5> bands{{
      {"delta", 1.0, 4.0},
      {"theta", 4.0, 8.0},
      {"alpha", 8.0, 13.0},
      {"beta", 13.0, 30.0},
      {"gamma", 30.0, 50.0},
  }};
  return bands;
}

const Band& band_by_name(std::string_view name) {
  for (const auto& b : canonical_bands()) {
    if (b.name == name) return b;
  }
  throw Error("unknown band: " + std::string(name));
}

std::size_t band_rank(std::string_view name) {
  const auto& bands = canonical_bands();
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (bands[i].name == name) return i;
  }
  throw Error("unknown band: " + std::string(name));
}

PsdEstimate windowed_psd(std::span<const double> samples, double sample_rate_hz, std::size_t window_len) {
  if (window_len < 8) throw Error("PSD window must be at least 8 samples");
  if (window_len > samples.size()) throw Error("PSD window longer than signal");
  if (!(sample_rate_hz > 0.0)) throw Error("sample rate must be positive");
  RealFft fft(window_len);
  const auto window = hann_periodic(window_len);
  PsdEstimate psd;
  periodogram_into(fft, samples.first(window_len), sample_rate_hz, window, sum_of_squares(window), psd);
  return psd;
}

double band_power(const PsdEstimate& psd, const Band& band) {
  if (!(band.lo_hz >= 0.0 && band.lo_hz < band.hi_hz)) throw Error("invalid band " + band.name);
  std::size_t first = psd.freqs_hz.size();
  std::size_t last = 0;
  for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k) {
    const double f = psd.freqs_hz[k];
    if (f >= band.lo_hz && f < band.hi_hz) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first == psd.freqs_hz.size()) throw Error("empty band: no frequency bins in " + band.name);
  const double df = psd.resolution_hz();
  double acc = 0.0;
  for (std::size_t k = first; k < last; ++k) acc += 0.5 * (psd.density[k] + psd.density[k + 1]) * df;
  return std::max(acc, 0.0);
}

double total_power(const PsdEstimate& psd) {
  const double df = psd.resolution_hz();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < psd.density.size(); ++k) acc += 0.5 * (psd.density[k] + psd.density[k + 1]) * df;
  return acc;
}

std::vector<std::size_t> window_starts(std::size_t n_samples, std::size_t window_len, double overlap_fraction) {
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) throw Error("window overlap must be in [0, 1)");
  const auto hop = static_cast<long long>(std::llround(static_cast<double>(window_len) * (1.0 - overlap_fraction)));
  if (hop < 1) throw Error("window hop must be at least one sample");
  if (window_len == 0 || n_samples < window_len) throw Error("recording shorter than one window");
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + window_len <= n_samples; s += static_cast<std::size_t>(hop)) starts.push_back(s);
  return starts;
}

int majority_label(std::span<const int> labels) {
  if (labels.empty()) throw Error("majority of an empty label span");
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  int best = counts.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {  // ascending map order: ties keep the smaller label
      best = label;
      best_count = count;
    }
  }
  return best;
}

std::vector<BandPowerSequence> power_sequences(const Recording& rec, std::span<const Band> bands,
                                               std::size_t window_len, double overlap_fraction) {
  validate(rec);
  if (window_len < 8) throw Error("PSD window must be at least 8 samples");
  const auto starts = window_starts(rec.sample_count(), window_len, overlap_fraction);
  const auto n_windows = static_cast<Eigen::Index>(starts.size());
  const auto n_channels = static_cast<Eigen::Index>(rec.channels.size());

  std::vector<BandPowerSequence> out(bands.size());
  for (std::size_t b = 0; b < bands.size(); ++b) {
    auto& seq = out[b];
    seq.band = bands[b];
    seq.values = Matrix::Zero(n_windows, n_channels);
    seq.window_start_sample = starts;
    for (const auto& ch : rec.channels) seq.channel_names.push_back(ch.name);
    for (const auto& [track, labels] : rec.label_tracks) {
      auto& wl = seq.window_labels[track];
      wl.reserve(starts.size());
      for (auto s : starts) wl.push_back(majority_label(std::span<const int>(labels).subspan(s, window_len)));
    }
  }

  const auto window = hann_periodic(window_len);
  const double window_power = sum_of_squares(window);
  parallel_for(rec.channels.size(), [&](std::size_t c) {
    RealFft fft(window_len);
    PsdEstimate psd;
    const std::span<const double> x(rec.channels[c].samples);
    for (Eigen::Index w = 0; w < n_windows; ++w) {
      periodogram_into(fft, x.subspan(starts[static_cast<std::size_t>(w)], window_len), rec.sample_rate_hz,
                       window, window_power, psd);
      for (std::size_t b = 0; b < bands.size(); ++b) {
        out[b].values(w, static_cast<Eigen::Index>(c)) = band_power(psd, bands[b]);
      }
    }
  });
  return out;
}

BandPowerSequence power_sequence(const Recording& rec, const Band& band, std::size_t window_len,
                                 double overlap_fraction) {
  const Band bands[] = {band};
  return std::move(power_sequences(rec, bands, window_len, overlap_fraction).front());
}

}  // namespace mappereeg
