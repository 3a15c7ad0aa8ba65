#include "mappereeg/pipeline.hpp"

#include "mappereeg/csv.hpp"
#include "mappereeg/export.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>

namespace mappereeg {

namespace {

// Above this many points the dense distance matrix is skipped.
constexpr Eigen::Index kDenseDistanceLimit = 20000;

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw Error(std::string("[") + stage + "] " + e.what());
  }
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& band, std::size_t cubes, double overlap) {
  char ov[32];
  std::snprintf(ov, sizeof ov, "%.2f", overlap);
  const std::string key = "band=" + band + ";b=" + std::to_string(cubes) + ";ov=" + ov;
  return base_seed ^ fnv1a64(key);
}

Embedding2D project(const Matrix& X, const LensConfig& lens, std::uint64_t seed) {
  switch (lens.method) {
    case LensMethod::pca: return pca_project(X, 2);
    case LensMethod::coords: return coords_project(X, lens.axes);
    case LensMethod::tsne: {
      TsneParams p;
      p.perplexity = lens.perplexity;
      p.iters = lens.iters;
      p.learning_rate = lens.learning_rate;
      p.seed = seed;
      return tsne_project(X, p);
    }
  }
  throw Error("unknown lens method");
}

CoverOutcome analyze_cover(const CoverInputs& in, const CoverConfig& cover, const DbscanParams& dbscan,
                           std::uint64_t community_seed) {
  const Matrix& X = *in.features;
  const auto& labels = *in.labels;
  CoverOutcome out;
  const auto assignment = build_cover(*in.embedding, cover);
  out.graph = in.distances ? build_mapper_precomputed(*in.distances, assignment, dbscan)
                           : build_mapper(X, assignment, dbscan);
  attach_labels(out.graph, in.label_track, labels);

  try {
    out.communities = node_communities(out.graph, in.label_track, community_seed);
    out.report.qmod = qmod(out.graph, *out.communities);
  } catch (const Error& e) {
    out.status = std::string("qmod: ") + e.what();
  }
  out.prediction = components_to_clusters(out.graph, labels, labels.size());
  const auto qm = out.report.qmod;
  out.report = evaluate_labels(X, labels, out.prediction.predicted, in.distances);
  out.report.qmod = qm;
  out.report.n_components = out.graph.n_components;
  return out;
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  PipelineResult result;
  result.features = in_stage("power", [&] {
    if (!cfg.features_csv.empty()) {
      auto seq = power_from_csv(read_text_file(cfg.features_csv));
      seq.band = band_by_name(cfg.band);
      return seq;
    }
    const auto rec = load_recording(cfg.manifest);
    return power_sequence(rec, band_by_name(cfg.band), cfg.window_len, cfg.overlap);
  });
  const Matrix& X = result.features.values;
  const auto& labels = in_stage("labels", [&]() -> const std::vector<int>& {
    const auto it = result.features.window_labels.find(cfg.label_track);
    if (it == result.features.window_labels.end()) throw Error("label track not found: " + cfg.label_track);
    return it->second;
  });

  result.embedding = in_stage("project", [&] { return project(X, cfg.lens, cfg.seed); });

  Matrix distances;
  if (X.rows() <= kDenseDistanceLimit) distances = pairwise_distances(X);
  const Matrix* dist = distances.size() ? &distances : nullptr;
  result.eps = in_stage("mapper", [&] {
    if (cfg.dbscan.eps) return *cfg.dbscan.eps;
    const double eps = dist ? median_kth_neighbor_distance_precomputed(*dist) : median_kth_neighbor_distance(X);
    return eps > 0.0 ? eps : 1e-12;
  });

  result.outcome = in_stage("mapper", [&] {
    CoverInputs in{&X, dist, &result.embedding, cfg.label_track, &labels};
    return analyze_cover(in, cfg.cover, DbscanParams{result.eps, cfg.dbscan.min_samples},
                         cell_seed(cfg.seed, cfg.band, cfg.cover.cubes, cfg.cover.overlap));
  });
  return result;
}

std::string report_to_json(const EvalReport& report, const std::string& hash) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j{{"accuracy", report.accuracy},
         {"f1_micro", report.accuracy},
         {"f1_macro", report.f1_macro},
         {"f1_weighted", report.f1_weighted},
         {"silhouette", opt(report.silhouette)},
         {"davies_bouldin", opt(report.davies_bouldin)},
         {"qmod", opt(report.qmod)},
         {"n_components", report.n_components}};
  if (!hash.empty()) j["config_hash"] = hash;
  return j.dump(2) + "\n";
}

PipelineResult run_pipeline_and_write(const RunConfig& cfg) {
  auto result = run_pipeline(cfg);
  const auto hash = config_hash(cfg);
  in_stage("export", [&] {
    const auto& graph = result.outcome.graph;
    if (!cfg.outputs.graph.empty()) {
      write_text_file(cfg.outputs.graph, graph_to_json(graph, {hash, cfg.seed, result.outcome.report.qmod, cfg.label_track}));
    }
    if (!cfg.outputs.dot.empty()) write_text_file(cfg.outputs.dot, export_dot(graph, cfg.label_track));
    if (!cfg.outputs.graphml.empty()) write_text_file(cfg.outputs.graphml, export_graphml(graph, cfg.label_track));
    if (!cfg.outputs.report.empty()) write_text_file(cfg.outputs.report, report_to_json(result.outcome.report, hash));
  });
  return result;
}

}  // namespace mappereeg
