#include "mappereeg/config.hpp"

#include "json_fields.hpp"

#include <cstdio>

namespace mappereeg {

namespace detail {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw Error(where + " must be a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error("unknown key in " + where + ": " + key);
  }
}

LensConfig lens_from_json(const json& j) {
  require_object(j, "lens");
  reject_unknown(j, {"method", "perplexity", "iters", "learning_rate", "axes"}, "lens");
  LensConfig lens;
  if (j.contains("method")) lens.method = lens_method_from_string(get_field<std::string>(j, "method", "lens"));
  if (j.contains("perplexity")) lens.perplexity = get_field<double>(j, "perplexity", "lens");
  if (j.contains("iters")) lens.iters = get_field<std::size_t>(j, "iters", "lens");
  if (j.contains("learning_rate")) lens.learning_rate = get_field<double>(j, "learning_rate", "lens");
  if (j.contains("axes")) lens.axes = get_field<std::vector<std::size_t>>(j, "axes", "lens");
  return lens;
}

json lens_to_json(const LensConfig& lens) {
  return json{{"method", to_string(lens.method)},
              {"perplexity", lens.perplexity},
              {"iters", lens.iters},
              {"learning_rate", lens.learning_rate},
              {"axes", lens.axes}};
}

DbscanConfig dbscan_from_json(const json& j) {
  require_object(j, "dbscan");
  reject_unknown(j, {"eps", "min_samples"}, "dbscan");
  DbscanConfig cfg;
  if (j.contains("eps")) {
    const auto& eps = j.at("eps");
    if (eps.is_string()) {
      if (eps.get<std::string>() != "auto") throw Error("dbscan.eps must be a number or \"auto\"");
    } else if (eps.is_number()) {
      cfg.eps = eps.get<double>();
      if (!(*cfg.eps > 0.0)) throw Error("dbscan.eps must be positive");
    } else {
      throw Error("dbscan.eps must be a number or \"auto\"");
    }
  }
  if (j.contains("min_samples")) cfg.min_samples = get_field<std::size_t>(j, "min_samples", "dbscan");
  if (cfg.min_samples < 1) throw Error("dbscan.min_samples must be at least 1");
  return cfg;
}

json dbscan_to_json(const DbscanConfig& cfg) {
  json j;
  if (cfg.eps) {
    j["eps"] = *cfg.eps;
  } else {
    j["eps"] = "auto";
  }
  j["min_samples"] = cfg.min_samples;
  return j;
}

}  // namespace detail

using detail::get_field;
using detail::json;

RunConfig run_config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }
  detail::require_object(j, "config");
  detail::reject_unknown(j,
                         {"manifest", "features_csv", "band", "window_len", "overlap", "lens", "cover", "dbscan",
                          "label_track", "seed", "outputs"},
                         "config");
  RunConfig cfg;
  if (j.contains("manifest")) cfg.manifest = get_field<std::string>(j, "manifest", "config");
  if (j.contains("features_csv")) cfg.features_csv = get_field<std::string>(j, "features_csv", "config");
  if (j.contains("band")) cfg.band = get_field<std::string>(j, "band", "config");
  if (j.contains("window_len")) cfg.window_len = get_field<std::size_t>(j, "window_len", "config");
  if (j.contains("overlap")) cfg.overlap = get_field<double>(j, "overlap", "config");
  if (j.contains("lens")) cfg.lens = detail::lens_from_json(j.at("lens"));
  if (j.contains("cover")) {
    const auto& c = j.at("cover");
    detail::require_object(c, "cover");
    detail::reject_unknown(c, {"cubes", "overlap"}, "cover");
    if (c.contains("cubes")) cfg.cover.cubes = get_field<std::size_t>(c, "cubes", "cover");
    if (c.contains("overlap")) cfg.cover.overlap = get_field<double>(c, "overlap", "cover");
  }
  if (j.contains("dbscan")) cfg.dbscan = detail::dbscan_from_json(j.at("dbscan"));
  if (j.contains("label_track")) cfg.label_track = get_field<std::string>(j, "label_track", "config");
  if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed", "config");
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    detail::require_object(o, "outputs");
    detail::reject_unknown(o, {"graph", "dot", "graphml", "report"}, "outputs");
    if (o.contains("graph")) cfg.outputs.graph = get_field<std::string>(o, "graph", "outputs");
    if (o.contains("dot")) cfg.outputs.dot = get_field<std::string>(o, "dot", "outputs");
    if (o.contains("graphml")) cfg.outputs.graphml = get_field<std::string>(o, "graphml", "outputs");
    if (o.contains("report")) cfg.outputs.report = get_field<std::string>(o, "report", "outputs");
  }

  if (cfg.manifest.empty() == cfg.features_csv.empty()) {
    throw Error("config needs exactly one of manifest or features_csv");
  }
  band_by_name(cfg.band);
  if (cfg.cover.cubes < 1) throw Error("cover.cubes must be at least 1");
  if (!(cfg.cover.overlap >= 0.0 && cfg.cover.overlap < 1.0)) throw Error("cover.overlap must be in [0, 1)");
  if (!(cfg.overlap >= 0.0 && cfg.overlap < 1.0)) throw Error("overlap must be in [0, 1)");
  return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j;
  j["manifest"] = cfg.manifest;
  j["features_csv"] = cfg.features_csv;
  j["band"] = cfg.band;
  j["window_len"] = cfg.window_len;
  j["overlap"] = cfg.overlap;
  j["lens"] = detail::lens_to_json(cfg.lens);
  j["cover"] = json{{"cubes", cfg.cover.cubes}, {"overlap", cfg.cover.overlap}};
  j["dbscan"] = detail::dbscan_to_json(cfg.dbscan);
  j["label_track"] = cfg.label_track;
  j["seed"] = cfg.seed;
  j["outputs"] = json{{"graph", cfg.outputs.graph},
                      {"dot", cfg.outputs.dot},
                      {"graphml", cfg.outputs.graphml},
                      {"report", cfg.outputs.report}};
  return j.dump();
}

std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(run_config_to_json(cfg))));
  return buf;
}

}  // namespace mappereeg
