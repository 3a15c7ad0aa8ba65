#pragma once

#include "mappereeg/community.hpp"
#include "mappereeg/config.hpp"
#include "mappereeg/metrics.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace mappereeg {

/// Mapper stage over fixed features and a fixed embedding: cover, per-bin
/// DBSCAN, communities, Q_mod and the evaluation metrics.
struct CoverOutcome {
  MapperGraph graph;
  std::optional<CommunityAssignment> communities;
  ClusterPrediction prediction;
  EvalReport report;
  /// "ok", or the first error met while scoring.
  std::string status = "ok";
};

struct CoverInputs {
  const Matrix* features = nullptr;
  /// Optional precomputed pairwise distances over features.
  const Matrix* distances = nullptr;
  const Embedding2D* embedding = nullptr;
  std::string label_track;
  const std::vector<int>* labels = nullptr;
};

CoverOutcome analyze_cover(const CoverInputs& in, const CoverConfig& cover,
                           const DbscanParams& dbscan, std::uint64_t community_seed);

/// Seed for a sweep cell or single run: base XOR FNV-1a-64 of
/// "band=<name>;b=<cubes>;ov=<overlap with 2 decimals>".
std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& band, std::size_t cubes,
                        double overlap);

Embedding2D project(const Matrix& X, const LensConfig& lens, std::uint64_t seed);

struct PipelineResult {
  BandPowerSequence features;
  Embedding2D embedding;
  double eps = 0.0;
  CoverOutcome outcome;
};

/// Steps 0-6 in memory. Stage errors are rethrown as Error tagged with the
/// stage name.
PipelineResult run_pipeline(const RunConfig& cfg);

/// run_pipeline plus the graph JSON / DOT / GraphML / report JSON outputs
/// named in cfg.outputs.
PipelineResult run_pipeline_and_write(const RunConfig& cfg);

std::string report_to_json(const EvalReport& report, const std::string& config_hash = "");

}  // namespace mappereeg
