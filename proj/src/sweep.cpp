#include "mappereeg/sweep.hpp"

#include "json_fields.hpp"
#include "mappereeg/csv.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>

namespace mappereeg {

using detail::json;

SweepGrid SweepGrid::defaults() {
  SweepGrid g;
  g.bands.assign(canonical_bands().begin(), canonical_bands().end());
  for (std::size_t b = 10; b <= 40; b += 5) g.cubes.push_back(b);
  for (int k = 1; k <= 10; ++k) g.overlaps.push_back(0.05 * k);
  // 0.05 * k drifts in the last bits; pin to the two-decimal values.
  for (auto& ov : g.overlaps) ov = std::round(ov * 100.0) / 100.0;
  return g;
}

SweepGrid sweep_grid_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("grid is not valid JSON: ") + e.what());
  }
  detail::require_object(j, "grid");
  detail::reject_unknown(j,
                         {"bands", "cubes", "overlaps", "dbscan", "lens", "window_len", "window_overlap", "base_seed",
                          "record_runtime"},
                         "grid");
  SweepGrid g = SweepGrid::defaults();
  if (j.contains("bands")) {
    g.bands.clear();
    for (const auto& name : detail::get_field<std::vector<std::string>>(j, "bands", "grid")) {
      g.bands.push_back(band_by_name(name));
    }
  }
  if (j.contains("cubes")) g.cubes = detail::get_field<std::vector<std::size_t>>(j, "cubes", "grid");
  if (j.contains("overlaps")) g.overlaps = detail::get_field<std::vector<double>>(j, "overlaps", "grid");
  if (j.contains("dbscan")) g.dbscan = detail::dbscan_from_json(j.at("dbscan"));
  if (j.contains("lens")) g.lens = detail::lens_from_json(j.at("lens"));
  if (j.contains("window_len")) g.window_len = detail::get_field<std::size_t>(j, "window_len", "grid");
  if (j.contains("window_overlap")) g.window_overlap = detail::get_field<double>(j, "window_overlap", "grid");
  if (j.contains("base_seed")) g.base_seed = detail::get_field<std::uint64_t>(j, "base_seed", "grid");
  if (j.contains("record_runtime")) g.record_runtime = detail::get_field<bool>(j, "record_runtime", "grid");
  return g;
}

void summarize(SweepResult& result) {
  result.best_qmod.clear();
  result.best_record.clear();
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    if (!r.qmod) continue;
    const auto it = result.best_qmod.find(r.band);
    if (it == result.best_qmod.end() || *r.qmod > it->second) {
      result.best_qmod[r.band] = *r.qmod;
      result.best_record[r.band] = i;
    }
  }
}

namespace {

void sort_records(std::vector<SweepRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    const auto ra = band_rank(a.band);
    const auto rb = band_rank(b.band);
    if (ra != rb) return ra < rb;
    if (a.cubes != b.cubes) return a.cubes < b.cubes;
    return a.overlap < b.overlap;
  });
}

struct BandContext {
  const Matrix* features = nullptr;
  const std::vector<int>* labels = nullptr;
  Matrix distances;
  Embedding2D embedding;
  double eps = 0.0;
  std::string error;
};

}  // namespace

SweepResult run_sweep(std::span<const BandPowerSequence> features, const SweepGrid& grid,
                      const std::string& label_track) {
  if (features.size() != grid.bands.size()) throw Error("one feature sequence per grid band is required");

  std::vector<BandContext> bands(grid.bands.size());
  for (std::size_t b = 0; b < grid.bands.size(); ++b) {
    auto& ctx = bands[b];
    try {
      ctx.features = &features[b].values;
      const auto it = features[b].window_labels.find(label_track);
      if (it == features[b].window_labels.end()) throw Error("label track not found: " + label_track);
      ctx.labels = &it->second;
      ctx.distances = pairwise_distances(*ctx.features);
      if (grid.dbscan.eps) {
        ctx.eps = *grid.dbscan.eps;
      } else {
        ctx.eps = median_kth_neighbor_distance_precomputed(ctx.distances);
        if (!(ctx.eps > 0.0)) ctx.eps = 1e-12;
      }
      ctx.embedding = project(*ctx.features, grid.lens, grid.base_seed);
    } catch (const std::exception& e) {
      ctx.error = std::string("lens: ") + e.what();
    }
  }

  struct Cell {
    std::size_t band;
    std::size_t cubes;
    double overlap;
  };
  std::vector<Cell> cells;
  for (std::size_t b = 0; b < grid.bands.size(); ++b) {
    for (auto c : grid.cubes) {
      for (auto ov : grid.overlaps) cells.push_back({b, c, ov});
    }
  }

  SweepResult result;
  result.records.resize(cells.size());
  parallel_for(cells.size(), [&](std::size_t k) {
    const auto& cell = cells[k];
    const auto& ctx = bands[cell.band];
    auto& rec = result.records[k];
    rec.band = grid.bands[cell.band].name;
    rec.cubes = cell.cubes;
    rec.overlap = cell.overlap;
    if (!ctx.error.empty()) {
      rec.status = ctx.error;
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      CoverInputs in{ctx.features, &ctx.distances, &ctx.embedding, label_track, ctx.labels};
      const auto outcome = analyze_cover(in, CoverConfig{cell.cubes, cell.overlap},
                                         DbscanParams{ctx.eps, grid.dbscan.min_samples},
                                         cell_seed(grid.base_seed, rec.band, cell.cubes, cell.overlap));
      rec.status = outcome.status;
      rec.qmod = outcome.report.qmod;
      rec.n_components = outcome.report.n_components;
      rec.accuracy = outcome.report.accuracy;
      rec.f1_macro = outcome.report.f1_macro;
      rec.f1_weighted = outcome.report.f1_weighted;
      rec.silhouette = outcome.report.silhouette;
      rec.davies_bouldin = outcome.report.davies_bouldin;
    } catch (const std::exception& e) {
      rec.status = std::string("mapper: ") + e.what();
    }
    if (grid.record_runtime) {
      rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  });
  sort_records(result.records);
  summarize(result);
  return result;
}

SweepResult run_sweep(const Recording& rec, const SweepGrid& grid, const std::string& label_track) {
  const auto features = power_sequences(rec, grid.bands, grid.window_len, grid.window_overlap);
  return run_sweep(features, grid, label_track);
}

BandSelection select_band(std::span<const SweepResult> subjects) {
  if (subjects.empty()) throw Error("band selection needs at least one subject");
  std::set<std::string> names;
  for (const auto& s : subjects) {
    for (const auto& r : s.records) names.insert(r.band);
  }
  BandSelection out;
  std::optional<std::string> best;
  double best_mean = 0.0;
  for (const auto& name : names) {
    double sum = 0.0;
    bool complete = true;
    for (const auto& s : subjects) {
      const auto it = s.best_qmod.find(name);
      if (it == s.best_qmod.end()) {
        complete = false;
        break;
      }
      sum += it->second;
    }
    if (!complete) {
      out.warnings.push_back("band " + name + " excluded: every cell failed for some subject");
      continue;
    }
    const double mean = sum / static_cast<double>(subjects.size());
    out.mean_best_qmod[name] = mean;
    if (!best || mean > best_mean || (mean == best_mean && band_rank(name) > band_rank(*best))) {
      best = name;
      best_mean = mean;
    }
  }
  if (!best) throw Error("no band has a successful cell for every subject");
  out.band = band_by_name(*best);
  return out;
}

namespace {

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::optional<double> opt_parse(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_real(s);
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

std::string sweep_to_csv(const SweepResult& result) {
  std::string out =
      "band,b,ov,status,qmod,n_components,accuracy,f1_macro,f1_weighted,silhouette,davies_bouldin,runtime_s\n";
  for (const auto& r : result.records) {
    out += r.band + "," + std::to_string(r.cubes) + "," + format_double(r.overlap) + "," + sanitize(r.status) + "," +
           opt_text(r.qmod) + "," + std::to_string(r.n_components) + "," + format_double(r.accuracy) + "," +
           format_double(r.f1_macro) + "," + format_double(r.f1_weighted) + "," + opt_text(r.silhouette) + "," +
           opt_text(r.davies_bouldin) + "," + opt_text(r.runtime_s) + "\n";
  }
  return out;
}

SweepResult sweep_from_csv(const std::string& csv_text) {
  const auto table = parse_csv(csv_text);
  SweepResult result;
  for (const auto& row : table.rows) {
    SweepRecord r;
    r.band = row[table.column("band")];
    r.cubes = static_cast<std::size_t>(parse_integer(row[table.column("b")]));
    r.overlap = parse_real(row[table.column("ov")]);
    r.status = row[table.column("status")];
    r.qmod = opt_parse(row[table.column("qmod")]);
    r.n_components = static_cast<std::size_t>(parse_integer(row[table.column("n_components")]));
    r.accuracy = parse_real(row[table.column("accuracy")]);
    r.f1_macro = parse_real(row[table.column("f1_macro")]);
    r.f1_weighted = parse_real(row[table.column("f1_weighted")]);
    r.silhouette = opt_parse(row[table.column("silhouette")]);
    r.davies_bouldin = opt_parse(row[table.column("davies_bouldin")]);
    r.runtime_s = opt_parse(row[table.column("runtime_s")]);
    result.records.push_back(std::move(r));
  }
  summarize(result);
  return result;
}

std::string sweep_summary_json(std::span<const SweepResult> subjects) {
  json doc;
  json subj = json::array();
  for (const auto& s : subjects) {
    json best = json::object();
    for (const auto& [band, q] : s.best_qmod) {
      const auto& r = s.records[s.best_record.at(band)];
      best[band] = json{{"qmod", q}, {"b", r.cubes}, {"ov", r.overlap}};
    }
    std::size_t failed = 0;
    for (const auto& r : s.records) failed += r.status != "ok";
    subj.push_back(json{{"cells", s.records.size()}, {"failed_cells", failed}, {"best", best}});
  }
  doc["subjects"] = subj;
  try {
    const auto sel = select_band(subjects);
    doc["selected_band"] = sel.band.name;
    doc["mean_best_qmod"] = sel.mean_best_qmod;
    doc["warnings"] = sel.warnings;
  } catch (const Error& e) {
    doc["selected_band"] = nullptr;
    doc["mean_best_qmod"] = json::object();
    doc["warnings"] = json::array({e.what()});
  }
  return doc.dump(2) + "\n";
}

}  // namespace mappereeg
