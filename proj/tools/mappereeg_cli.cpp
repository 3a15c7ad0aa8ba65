#include "mappereeg/baselines.hpp"
#include "mappereeg/community.hpp"
#include "mappereeg/config.hpp"
#include "mappereeg/csv.hpp"
#include "mappereeg/export.hpp"
#include "mappereeg/metrics.hpp"
#include "mappereeg/pipeline.hpp"
#include "mappereeg/recording.hpp"
#include "mappereeg/spectral.hpp"
#include "mappereeg/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace mappereeg;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string config;
};

template <typename F>
void stage(const char* name, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    if (!msg.empty() && msg.front() == '[') throw;
    throw Error(std::string("[") + name + "] " + msg);
  }
}

// Data CSV goes next to the manifest: out.json -> out.csv.
fs::path sibling_csv(const fs::path& manifest) {
  auto csv = manifest;
  csv.replace_extension(".csv");
  return csv;
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

const std::vector<int>& track_labels(const BandPowerSequence& seq, const std::string& track) {
  const auto it = seq.window_labels.find(track);
  if (it == seq.window_labels.end()) throw Error("label track not found: " + track);
  return it->second;
}

struct CompareRow {
  std::string method;
  std::string params;
  EvalReport report;
  bool ok = false;
};

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::string out = "method,params,accuracy,f1_macro,f1_weighted,silhouette,davies_bouldin\n";
  for (const auto& r : rows) {
    out += r.method + "," + r.params + "," + format_double(r.report.accuracy) + "," +
           format_double(r.report.f1_macro) + "," + format_double(r.report.f1_weighted) + "," +
           opt_text(r.report.silhouette) + "," + opt_text(r.report.davies_bouldin) + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MapperEEG: Mapper graphs over EEG band-power sequences"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed (overrides config)");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_option("--config", g.config, "Run configuration JSON");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic recording");
  std::string synth_spec, synth_out;
  synth->add_option("--spec", synth_spec, "Synthesis spec JSON")->required();
  synth->add_option("--out", synth_out, "Output manifest path")->required();

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Low-pass filter and downsample a recording");
  std::string pre_manifest, pre_out;
  double pre_cutoff = 50.0, pre_rate = 100.0;
  pre->add_option("--manifest", pre_manifest)->required();
  pre->add_option("--cutoff", pre_cutoff, "Cutoff frequency in Hz")->capture_default_str();
  pre->add_option("--rate", pre_rate, "Target sample rate in Hz")->capture_default_str();
  pre->add_option("--out", pre_out, "Output manifest path")->required();

  // power
  auto* power = app.add_subcommand("power", "Band-power sequence of a recording");
  std::string pw_manifest, pw_band = "gamma", pw_out;
  std::size_t pw_window = kDefaultWindowLen;
  double pw_overlap = kDefaultWindowOverlap;
  power->add_option("--manifest", pw_manifest)->required();
  power->add_option("--band", pw_band)->capture_default_str();
  power->add_option("--window", pw_window)->capture_default_str();
  power->add_option("--overlap", pw_overlap)->capture_default_str();
  power->add_option("--out", pw_out)->required();

  // project
  auto* proj = app.add_subcommand("project", "Project a power CSV to 2-D");
  std::string pj_in, pj_out, pj_method = "tsne";
  LensConfig pj_lens;
  proj->add_option("--in", pj_in)->required();
  proj->add_option("--method", pj_method, "tsne, pca or coords")->capture_default_str();
  proj->add_option("--perplexity", pj_lens.perplexity)->capture_default_str();
  proj->add_option("--iters", pj_lens.iters)->capture_default_str();
  proj->add_option("--learning-rate", pj_lens.learning_rate)->capture_default_str();
  proj->add_option("--axes", pj_lens.axes, "Feature columns for the coords lens");
  proj->add_option("--out", pj_out)->required();

  // mapper / run
  auto* mapper = app.add_subcommand("mapper", "Run the full pipeline from --config and write its outputs");
  mapper->alias("run");

  // qmod
  auto* qm = app.add_subcommand("qmod", "Modularity of a graph under its node label communities");
  std::string qm_graph, qm_track = "condition";
  qm->add_option("--graph", qm_graph)->required();
  qm->add_option("--label-track", qm_track)->capture_default_str();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Score graph components as clusters");
  std::string ev_graph, ev_power, ev_track = "condition", ev_out;
  ev->add_option("--graph", ev_graph)->required();
  ev->add_option("--power", ev_power)->required();
  ev->add_option("--label-track", ev_track)->capture_default_str();
  ev->add_option("--out", ev_out)->required();

  // compare
  auto* cmp = app.add_subcommand("compare", "Baseline clustering table");
  std::string cp_power, cp_track = "condition", cp_grid, cp_out, cp_graph;
  bool cp_all = false;
  cmp->add_option("--power", cp_power)->required();
  cmp->add_option("--label-track", cp_track)->capture_default_str();
  cmp->add_option("--grid", cp_grid, "Baseline grid JSON (defaults if omitted)");
  cmp->add_option("--graph", cp_graph, "Also score this Mapper graph as a MapperEEG row");
  cmp->add_flag("--all", cp_all, "One row per grid setting instead of the best per method");
  cmp->add_option("--out", cp_out)->required();

  // sweep
  auto* sw = app.add_subcommand("sweep", "Grid search over band, cubes and overlap");
  std::string sw_manifest, sw_grid, sw_track = "condition", sw_out, sw_summary;
  bool sw_timing = false;
  sw->add_option("--manifest", sw_manifest)->required();
  sw->add_option("--grid", sw_grid, "Sweep grid JSON (defaults if omitted)");
  sw->add_option("--label-track", sw_track)->capture_default_str();
  sw->add_option("--out", sw_out)->required();
  sw->add_option("--summary", sw_summary);
  sw->add_flag("--timing", sw_timing, "Record per-cell runtime (makes output non-reproducible)");

  CLI11_PARSE(app, argc, argv);
  set_thread_count(g.threads);
  const std::uint64_t seed = g.seed.value_or(0);

  try {
    if (*synth) {
      stage("synth", [&] {
        const auto spec = synth_spec_from_json(read_text_file(synth_spec));
        const auto rec = generate_synthetic(spec, seed);
        write_recording(rec, synth_out, sibling_csv(synth_out));
      });
    } else if (*pre) {
      Recording rec;
      stage("load", [&] { rec = load_recording(pre_manifest); });
      stage("preprocess", [&] {
        const auto out = lowpass_downsample(rec, pre_cutoff, pre_rate);
        write_recording(out, pre_out, sibling_csv(pre_out));
      });
    } else if (*power) {
      Recording rec;
      stage("load", [&] { rec = load_recording(pw_manifest); });
      stage("power", [&] {
        const auto seq = power_sequence(rec, band_by_name(pw_band), pw_window, pw_overlap);
        write_text_file(pw_out, power_to_csv(seq));
      });
    } else if (*proj) {
      BandPowerSequence seq;
      stage("load", [&] { seq = power_from_csv(read_text_file(pj_in)); });
      stage("project", [&] {
        pj_lens.method = lens_method_from_string(pj_method);
        write_text_file(pj_out, embedding_to_csv(project(seq.values, pj_lens, seed)));
      });
    } else if (*mapper) {
      RunConfig cfg;
      stage("config", [&] {
        if (g.config.empty()) throw Error("--config is required");
        cfg = run_config_from_json(read_text_file(g.config));
        // Relative input and output paths resolve against the config file.
        const auto base = fs::path(g.config).parent_path();
        auto resolve = [&](std::string& p) {
          if (!p.empty() && fs::path(p).is_relative()) p = (base / p).string();
        };
        resolve(cfg.manifest);
        resolve(cfg.features_csv);
        resolve(cfg.outputs.graph);
        resolve(cfg.outputs.dot);
        resolve(cfg.outputs.graphml);
        resolve(cfg.outputs.report);
        if (g.seed) cfg.seed = *g.seed;
      });
      const auto result = run_pipeline_and_write(cfg);
      if (result.outcome.status != "ok") throw Error("[qmod] " + result.outcome.status);
      std::printf("components=%zu qmod=%.6f accuracy=%.6f\n", result.outcome.graph.n_components,
                  *result.outcome.report.qmod, result.outcome.report.accuracy);
    } else if (*qm) {
      GraphDocument doc;
      stage("load", [&] { doc = graph_from_json(read_text_file(qm_graph)); });
      stage("qmod", [&] {
        const auto communities = node_communities(doc.graph, qm_track, seed);
        std::printf("%.6f\n", qmod(doc.graph, communities));
      });
    } else if (*ev) {
      GraphDocument doc;
      BandPowerSequence seq;
      stage("load", [&] {
        doc = graph_from_json(read_text_file(ev_graph));
        seq = power_from_csv(read_text_file(ev_power));
      });
      stage("evaluate", [&] {
        const auto& labels = track_labels(seq, ev_track);
        if (labels.size() != doc.graph.n_points) throw Error("graph and power CSV disagree on the point count");
        const auto pred = components_to_clusters(doc.graph, labels, labels.size());
        auto report = evaluate_labels(seq.values, labels, pred.predicted);
        report.n_components = doc.graph.n_components;
        try {
          report.qmod = qmod(doc.graph, node_communities(doc.graph, ev_track, seed));
        } catch (const Error&) {
          report.qmod.reset();
        }
        write_text_file(ev_out, report_to_json(report, doc.meta.config_hash));
      });
    } else if (*cmp) {
      BandPowerSequence seq;
      BaselineGrid grid = BaselineGrid::defaults();
      std::optional<GraphDocument> doc;
      stage("load", [&] {
        seq = power_from_csv(read_text_file(cp_power));
        if (!cp_grid.empty()) grid = baseline_grid_from_json(read_text_file(cp_grid));
        if (g.seed) grid.seed = *g.seed;
        if (!cp_graph.empty()) doc = graph_from_json(read_text_file(cp_graph));
      });
      stage("compare", [&] {
        const auto& labels = track_labels(seq, cp_track);
        const Matrix distances = pairwise_distances(seq.values);
        const auto specs = grid.expand();
        std::vector<CompareRow> rows(specs.size());
        parallel_for(specs.size(), [&](std::size_t k) {
          auto& row = rows[k];
          row.method = to_string(specs[k].method);
          row.params = specs[k].params_text();
          try {
            const auto raw = run_baseline(seq.values, specs[k], &distances);
            const auto pred = baseline_predict_labels(raw, labels);
            row.report = evaluate_labels(seq.values, labels, pred, &distances);
            row.ok = true;
          } catch (const Error&) {
            row.ok = false;
          }
        });
        std::vector<CompareRow> out;
        if (doc) {
          if (labels.size() != doc->graph.n_points) throw Error("graph and power CSV disagree on the point count");
          CompareRow row;
          row.method = "mappereeg";
          row.params = "config_hash=" + doc->meta.config_hash;
          const auto pred = components_to_clusters(doc->graph, labels, labels.size());
          row.report = evaluate_labels(seq.values, labels, pred.predicted, &distances);
          row.ok = true;
          out.push_back(row);
        }
        std::size_t failed = 0;
        std::map<std::string, std::size_t> best;
        for (const auto& row : rows) {
          if (!row.ok) {
            ++failed;
            continue;
          }
          if (cp_all) {
            out.push_back(row);
            continue;
          }
          const auto it = best.find(row.method);
          if (it == best.end()) {
            best[row.method] = out.size();
            out.push_back(row);
          } else if (row.report.accuracy > out[it->second].report.accuracy) {
            out[it->second] = row;
          }
        }
        if (failed) std::fprintf(stderr, "compare: %zu grid settings failed and were skipped\n", failed);
        write_text_file(cp_out, compare_csv(out));
      });
    } else if (*sw) {
      Recording rec;
      SweepGrid grid = SweepGrid::defaults();
      stage("load", [&] {
        rec = load_recording(sw_manifest);
        if (!sw_grid.empty()) grid = sweep_grid_from_json(read_text_file(sw_grid));
        if (g.seed) grid.base_seed = *g.seed;
        if (sw_timing) grid.record_runtime = true;
      });
      stage("sweep", [&] {
        const auto result = run_sweep(rec, grid, sw_track);
        write_text_file(sw_out, sweep_to_csv(result));
        if (!sw_summary.empty()) {
          const std::vector<SweepResult> subjects{result};
          write_text_file(sw_summary, sweep_summary_json(subjects));
        }
      });
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
