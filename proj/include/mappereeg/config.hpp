#pragma once

#include "mappereeg/cover.hpp"
#include "mappereeg/lens.hpp"
#include "mappereeg/mapper.hpp"
#include "mappereeg/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mappereeg {

struct LensConfig {
  LensMethod method = LensMethod::tsne;
  double perplexity = 30.0;
  std::size_t iters = 1000;
  double learning_rate = 200.0;
  /// Only for LensMethod::coords.
  std::vector<std::size_t> axes;
};

struct DbscanConfig {
  /// Empty means "auto": median distance to the 5th nearest neighbour.
  std::optional<double> eps;
  std::size_t min_samples = kDefaultMinSamples;
};

struct OutputPaths {
  std::string graph;
  std::string dot;
  std::string graphml;
  std::string report;
};

/// One MapperEEG run. Input is either a recording manifest (band powers are
/// computed from it) or a feature CSV in the power-sequence format.
struct RunConfig {
  std::string manifest;
  std::string features_csv;
  std::string band = "gamma";
  std::size_t window_len = kDefaultWindowLen;
  double overlap = kDefaultWindowOverlap;
  LensConfig lens;
  CoverConfig cover;
  DbscanConfig dbscan;
  std::string label_track = "condition";
  std::uint64_t seed = 0;
  OutputPaths outputs;
};

/// Strict parse: unknown keys and wrong types throw Error. Missing keys keep
/// their defaults.
RunConfig run_config_from_json(const std::string& json_text);

/// Canonical JSON with every field present and keys sorted.
std::string run_config_to_json(const RunConfig& cfg);

/// FNV-1a-64 of the canonical JSON, as 16 lowercase hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace mappereeg
