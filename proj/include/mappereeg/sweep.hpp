#pragma once

#include "mappereeg/config.hpp"
#include "mappereeg/pipeline.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mappereeg {

struct SweepGrid {
  std::vector<Band> bands;
  std::vector<std::size_t> cubes;
  std::vector<double> overlaps;
  DbscanConfig dbscan;
  LensConfig lens;
  std::size_t window_len = kDefaultWindowLen;
  double window_overlap = kDefaultWindowOverlap;
  std::uint64_t base_seed = 0;
  /// Fill runtime_s; off by default so result files are reproducible.
  bool record_runtime = false;

  /// Five bands x cubes {10,...,40} x overlaps {0.05,...,0.5}.
  static SweepGrid defaults();
  std::size_t cell_count() const { return bands.size() * cubes.size() * overlaps.size(); }
};

SweepGrid sweep_grid_from_json(const std::string& json_text);

struct SweepRecord {
  std::string band;
  std::size_t cubes = 0;
  double overlap = 0.0;
  std::string status = "ok";
  std::optional<double> qmod;
  std::size_t n_components = 0;
  double accuracy = 0.0;
  double f1_macro = 0.0;
  double f1_weighted = 0.0;
  std::optional<double> silhouette;
  std::optional<double> davies_bouldin;
  std::optional<double> runtime_s;
};

struct SweepResult {
  /// Sorted by (band rank, cubes, overlap).
  std::vector<SweepRecord> records;
  /// Best Q_mod per band name; absent when every cell of the band failed.
  std::map<std::string, double> best_qmod;
  std::map<std::string, std::size_t> best_record;
};

/// Recomputes best_qmod / best_record from records.
void summarize(SweepResult& result);

SweepResult run_sweep(const Recording& rec, const SweepGrid& grid, const std::string& label_track);
/// Sweep over precomputed band-power sequences (one per grid band, same order).
SweepResult run_sweep(std::span<const BandPowerSequence> features, const SweepGrid& grid,
                      const std::string& label_track);

struct BandSelection {
  Band band;
  std::map<std::string, double> mean_best_qmod;
  std::vector<std::string> warnings;
};

/// Averages each subject's best Q_mod per band and returns the argmax; ties
/// go to the higher-frequency band. Bands with no successful cell for some
/// subject are dropped with a warning.
BandSelection select_band(std::span<const SweepResult> subjects);

std::string sweep_to_csv(const SweepResult& result);
SweepResult sweep_from_csv(const std::string& csv_text);
std::string sweep_summary_json(std::span<const SweepResult> subjects);

}  // namespace mappereeg
