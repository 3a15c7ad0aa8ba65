#include "mappereeg/recording.hpp"

#include "mappereeg/csv.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace mappereeg {

using nlohmann::json;

std::size_t Recording::sample_count() const {
  if (!channels.empty()) return channels.front().samples.size();
  if (!label_tracks.empty()) return label_tracks.begin()->second.size();
  return 0;
}

const std::vector<int>& Recording::labels(const std::string& track) const {
  const auto it = label_tracks.find(track);
  if (it == label_tracks.end()) throw Error("label track not found: " + track);
  return it->second;
}

void validate(const Recording& rec) {
  if (!(rec.sample_rate_hz > 0.0) || !std::isfinite(rec.sample_rate_hz)) {
    throw Error("sample_rate_hz must be positive");
  }
  const std::size_t n = rec.sample_count();
  if (n == 0) throw Error("recording has no samples");
  std::set<std::string> names;
  for (const auto& ch : rec.channels) {
    if (!names.insert(ch.name).second) throw Error("duplicate channel name: " + ch.name);
    if (ch.samples.size() != n) throw Error("channel " + ch.name + " has a different sample count");
    for (double v : ch.samples) {
      if (!std::isfinite(v)) throw Error("non-finite sample in channel " + ch.name);
    }
  }
  for (const auto& [track, labels] : rec.label_tracks) {
    if (labels.size() != n) throw Error("label track " + track + " has a different sample count");
  }
}

Recording generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.states.empty()) throw Error("synthetic spec has an empty state list");
  if (spec.n_channels == 0) throw Error("synthetic spec needs at least one channel");
  if (!(spec.sample_rate_hz > 0.0)) throw Error("synthetic sample rate must be positive");
  if (spec.noise_std < 0.0) throw Error("noise_std must be non-negative");
  std::set<int> labels;
  for (const auto& s : spec.states) {
    if (!labels.insert(s.label).second) throw Error("synthetic state labels must be distinct");
    if (!(s.segment_length_s > 0.0)) throw Error("segment_length_s must be positive");
    for (auto c : s.boosted_channels) {
      if (c >= spec.n_channels) throw Error("boosted channel index out of range");
    }
  }
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate_hz));
  if (n == 0) throw Error("synthetic duration yields no samples");

  // State index per sample.
  std::vector<std::size_t> state_of(n);
  {
    std::size_t t = 0;
    std::size_t s = 0;
    while (t < n) {
      const auto len = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(spec.states[s].segment_length_s * spec.sample_rate_hz)));
      for (std::size_t k = 0; k < len && t < n; ++k, ++t) state_of[t] = s;
      s = (s + 1) % spec.states.size();
    }
  }

  Recording rec;
  rec.name = "synthetic";
  rec.sample_rate_hz = spec.sample_rate_hz;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spec.noise_std > 0.0 ? spec.noise_std : 1.0);
  rec.channels.resize(spec.n_channels);
  for (std::size_t c = 0; c < spec.n_channels; ++c) {
    auto& ch = rec.channels[c];
    ch.name = "ch" + std::to_string(c);
    ch.samples.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      const auto& st = spec.states[state_of[t]];
      double v = 0.0;
      if (std::find(st.boosted_channels.begin(), st.boosted_channels.end(), c) != st.boosted_channels.end()) {
        const double time_s = static_cast<double>(t) / spec.sample_rate_hz;
        v = st.oscillation_amplitude * std::sin(2.0 * std::numbers::pi * st.band.center_hz() * time_s);
      }
      if (spec.noise_std > 0.0) v += noise(rng);
      ch.samples[t] = v;
    }
  }
  auto& track = rec.label_tracks["condition"];
  track.resize(n);
  for (std::size_t t = 0; t < n; ++t) track[t] = spec.states[state_of[t]].label;
  return rec;
}

SynthSpec synth_spec_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  SynthSpec spec;
  spec.n_channels = j.at("n_channels").get<std::size_t>();
  spec.duration_s = j.at("duration_s").get<double>();
  spec.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  spec.noise_std = j.value("noise_std", 0.0);
  for (const auto& s : j.at("states")) {
    SynthState st;
    st.label = s.at("label").get<int>();
    st.band = band_by_name(s.at("band").get<std::string>());
    st.boosted_channels = s.at("boosted_channels").get<std::vector<std::size_t>>();
    st.oscillation_amplitude = s.at("amplitude").get<double>();
    st.segment_length_s = s.at("segment_length_s").get<double>();
    spec.states.push_back(std::move(st));
  }
  return spec;
}

Recording load_recording(const std::filesystem::path& manifest_path) {
  if (!std::filesystem::exists(manifest_path)) {
    throw Error("manifest not found: " + manifest_path.string());
  }
  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw Error(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!manifest.contains("version") || manifest.at("version") != 1) {
    throw Error("unknown manifest schema version");
  }
  Recording rec;
  try {
    rec.name = manifest.at("name").get<std::string>();
    rec.sample_rate_hz = manifest.at("sample_rate_hz").get<double>();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed manifest: ") + e.what());
  }
  const auto csv_path = manifest_path.parent_path() / manifest.at("data_csv").get<std::string>();
  if (!std::filesystem::exists(csv_path)) throw Error("data CSV not found: " + csv_path.string());
  const CsvTable table = parse_csv(read_text_file(csv_path));

  for (const auto& name : manifest.at("channel_columns").get<std::vector<std::string>>()) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw Error("channel column not found: " + name);
    const auto col = static_cast<std::size_t>(it - table.header.begin());
    ChannelSeries ch{name, {}};
    ch.samples.reserve(table.rows.size());
    for (const auto& row : table.rows) ch.samples.push_back(parse_real(row[col]));
    rec.channels.push_back(std::move(ch));
  }
  for (const auto& name : manifest.at("label_columns").get<std::vector<std::string>>()) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw Error("label track not found: " + name);
    const auto col = static_cast<std::size_t>(it - table.header.begin());
    auto& track = rec.label_tracks[name];
    track.reserve(table.rows.size());
    for (const auto& row : table.rows) track.push_back(static_cast<int>(parse_integer(row[col])));
  }
  validate(rec);
  return rec;
}

void write_recording(const Recording& rec, const std::filesystem::path& manifest_path,
                     const std::filesystem::path& csv_path) {
  validate(rec);
  std::string csv;
  std::vector<std::string> header;
  for (const auto& ch : rec.channels) header.push_back(ch.name);
  for (const auto& [track, _] : rec.label_tracks) header.push_back(track);
  for (std::size_t i = 0; i < header.size(); ++i) csv += (i ? "," : "") + header[i];
  csv += "\n";
  const std::size_t n = rec.sample_count();
  for (std::size_t t = 0; t < n; ++t) {
    bool first = true;
    for (const auto& ch : rec.channels) {
      if (!first) csv += ",";
      csv += format_double(ch.samples[t]);
      first = false;
    }
    for (const auto& [_, labels] : rec.label_tracks) {
      if (!first) csv += ",";
      csv += std::to_string(labels[t]);
      first = false;
    }
    csv += "\n";
  }
  write_text_file(csv_path, csv);

  json manifest;
  manifest["version"] = 1;
  manifest["name"] = rec.name;
  manifest["sample_rate_hz"] = rec.sample_rate_hz;
  // Relative when the CSV sits beside the manifest.
  auto rel = std::filesystem::relative(csv_path, manifest_path.parent_path().empty()
                                                     ? std::filesystem::path(".")
                                                     : manifest_path.parent_path());
  manifest["data_csv"] = rel.empty() ? csv_path.string() : rel.generic_string();
  std::vector<std::string> channel_names;
  for (const auto& ch : rec.channels) channel_names.push_back(ch.name);
  manifest["channel_columns"] = channel_names;
  std::vector<std::string> label_names;
  for (const auto& [track, _] : rec.label_tracks) label_names.push_back(track);
  manifest["label_columns"] = label_names;
  write_text_file(manifest_path, manifest.dump(2) + "\n");
}

std::vector<double> design_lowpass(std::size_t taps, double cutoff_fraction) {
  if (taps == 0 || taps % 2 == 0) throw Error("low-pass tap count must be odd");
  if (!(cutoff_fraction > 0.0 && cutoff_fraction <= 0.5)) {
    throw Error("low-pass cutoff must be in (0, 0.5] of the sample rate");
  }
  const std::size_t mid = (taps - 1) / 2;
  std::vector<double> h(taps);
  // Only the first half is evaluated and then mirrored, so the taps are
  // exactly symmetric (linear phase).
  for (std::size_t n = 0; n <= mid; ++n) {
    const double x = static_cast<double>(n) - static_cast<double>(mid);
    const double sinc = x == 0.0 ? 2.0 * cutoff_fraction
                                 : std::sin(2.0 * std::numbers::pi * cutoff_fraction * x) / (std::numbers::pi * x);
    const double window =
        taps == 1 ? 1.0
                  : 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(taps - 1));
    h[n] = h[taps - 1 - n] = sinc * window;
  }
  double sum = 0.0;
  for (double v : h) sum += v;
  for (auto& v : h) v /= sum;
  return h;
}

Recording lowpass_downsample(const Recording& rec, double cutoff_hz, double target_rate_hz) {
  validate(rec);
  if (!(target_rate_hz > 0.0)) throw Error("target rate must be positive");
  const double ratio = rec.sample_rate_hz / target_rate_hz;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw Error("non-integer decimation factor: " + format_double(ratio));
  }
  if (!(cutoff_hz > 0.0) || cutoff_hz > target_rate_hz / 2.0 * (1.0 + 1e-12)) {
    throw Error("cutoff above target Nyquist");
  }
  const auto k = static_cast<std::size_t>(rounded);
  const auto h = design_lowpass(kLowpassTaps, cutoff_hz / rec.sample_rate_hz);
  const auto delay = static_cast<std::ptrdiff_t>((h.size() - 1) / 2);
  const std::size_t n = rec.sample_count();
  const std::size_t n_out = (n + k - 1) / k;

  Recording out;
  out.name = rec.name;
  out.sample_rate_hz = target_rate_hz;
  out.channels.resize(rec.channels.size());
  parallel_for(rec.channels.size(), [&](std::size_t c) {
    const auto& x = rec.channels[c].samples;
    auto& y = out.channels[c];
    y.name = rec.channels[c].name;
    y.samples.resize(n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
      // y[t] = sum_m h[m] x[t + delay - m], zero outside the signal.
      const auto t = static_cast<std::ptrdiff_t>(o * k);
      double acc = 0.0;
      for (std::size_t m = 0; m < h.size(); ++m) {
        const auto idx = t + delay - static_cast<std::ptrdiff_t>(m);
        if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n)) continue;
        acc += h[m] * x[static_cast<std::size_t>(idx)];
      }
      y.samples[o] = acc;
    }
  });
  for (const auto& [track, labels] : rec.label_tracks) {
    auto& dst = out.label_tracks[track];
    dst.reserve(n_out);
    for (std::size_t t = 0; t < n; t += k) dst.push_back(labels[t]);
  }
  return out;
}

}  // namespace mappereeg
