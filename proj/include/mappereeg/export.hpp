#pragma once

#include "mappereeg/mapper.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace mappereeg {

struct GraphMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::optional<double> qmod;
  std::string label_track;
};

struct GraphDocument {
  MapperGraph graph;
  GraphMeta meta;
};

std::string graph_to_json(const MapperGraph& graph, const GraphMeta& meta);
GraphDocument graph_from_json(const std::string& json_text);

/// Undirected DOT; node width scales with member count, label shows the
/// dominant label and its fraction for the given track.
std::string export_dot(const MapperGraph& graph, const std::string& label_track = "");
std::string export_graphml(const MapperGraph& graph, const std::string& label_track = "");

}  // namespace mappereeg
