#pragma once

#include "mappereeg/common.hpp"
#include "mappereeg/spectral_band.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mappereeg {

struct ChannelSeries {
  std::string name;
  std::vector<double> samples;  // microvolts
};

/// Multichannel sampled signal plus integer label tracks sharing its time
/// base. Construct through make_recording() so the invariants are checked.
struct Recording {
  std::string name;
  double sample_rate_hz = 0.0;
  std::vector<ChannelSeries> channels;
  std::map<std::string, std::vector<int>> label_tracks;

  std::size_t sample_count() const;
  const std::vector<int>& labels(const std::string& track) const;
};

/// Throws Error unless every channel and track has the same length >= 1,
/// the rate is positive, channel names are unique and samples are finite.
void validate(const Recording& rec);

struct SynthState {
  int label = 0;
  Band band;
  std::vector<std::size_t> boosted_channels;
  double oscillation_amplitude = 1.0;
  double segment_length_s = 1.0;
};

struct SynthSpec {
  std::size_t n_channels = 1;
  double duration_s = 1.0;
  double sample_rate_hz = 100.0;
  std::vector<SynthState> states;
  double noise_std = 0.0;
};

/// Segments cycle through spec.states in order, each lasting its
/// segment_length_s, until duration_s is filled (the last segment is cut
/// short). Boosted channels carry a sinusoid at the band center; every
/// channel gets white Gaussian noise. Labels go to the "condition" track.
Recording generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

/// Manifest + wide CSV. The CSV path in the manifest is relative to the
/// manifest's directory.
Recording load_recording(const std::filesystem::path& manifest_path);
void write_recording(const Recording& rec, const std::filesystem::path& manifest_path,
                     const std::filesystem::path& csv_path);

/// Hamming-windowed sinc low-pass with unit DC gain. cutoff is a fraction
/// of the sample rate.
std::vector<double> design_lowpass(std::size_t taps, double cutoff_fraction);

inline constexpr std::size_t kLowpassTaps = 201;

/// Zero-padded, delay-compensated FIR low-pass followed by keeping every
/// k-th sample, k = sample_rate / target_rate. Label tracks are subsampled.
Recording lowpass_downsample(const Recording& rec, double cutoff_hz, double target_rate_hz);

SynthSpec synth_spec_from_json(const std::string& json_text);

}  // namespace mappereeg
