#include "mappereeg/export.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace mappereeg {

using nlohmann::json;

namespace {

struct Dominant {
  int label = 0;
  double fraction = 0.0;
  bool valid = false;
};

Dominant dominant_label(const MapperNode& node, const std::string& track) {
  const auto it = node.label_counts.find(track);
  if (track.empty() || it == node.label_counts.end() || it->second.empty()) return {};
  std::size_t best = 0;
  std::size_t total = 0;
  int label = 0;
  for (const auto& [l, n] : it->second) {
    total += n;
    if (n > best) {
      best = n;
      label = l;
    }
  }
  return {label, total ? static_cast<double>(best) / static_cast<double>(total) : 0.0, true};
}

std::string counts_text(const LabelCounts& counts) {
  std::string out;
  for (const auto& [l, n] : counts) {
    if (!out.empty()) out += ";";
    out += std::to_string(l) + ":" + std::to_string(n);
  }
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string graph_to_json(const MapperGraph& graph, const GraphMeta& meta) {
  json nodes = json::array();
  for (const auto& node : graph.nodes) {
    json counts = json::object();
    for (const auto& [track, c] : node.label_counts) {
      json per = json::object();
      for (const auto& [label, n] : c) per[std::to_string(label)] = n;
      counts[track] = per;
    }
    nodes.push_back(json{{"id", node.id},
                         {"bin", json::array({node.bin.i, node.bin.j})},
                         {"size", node.members.size()},
                         {"members", node.members},
                         {"label_counts", counts}});
  }
  json edges = json::array();
  for (const auto& [u, v] : graph.edges) edges.push_back(json::array({u, v}));
  json components = json::object();
  for (std::size_t id = 0; id < graph.component_of.size(); ++id) components[std::to_string(id)] = graph.component_of[id];

  json m{{"config_hash", meta.config_hash},
         {"seed", meta.seed},
         {"label_track", meta.label_track},
         {"n_points", graph.n_points},
         {"n_noise_points", graph.n_noise_points},
         {"n_components", graph.n_components}};
  m["qmod"] = meta.qmod ? json(*meta.qmod) : json(nullptr);
  json doc{{"nodes", nodes}, {"edges", edges}, {"components", components}, {"meta", m}};
  return doc.dump(2) + "\n";
}

GraphDocument graph_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("graph is not valid JSON: ") + e.what());
  }
  GraphDocument out;
  try {
    for (const auto& n : doc.at("nodes")) {
      MapperNode node;
      node.id = n.at("id").get<std::size_t>();
      const auto bin = n.at("bin").get<std::vector<std::size_t>>();
      if (bin.size() != 2) throw Error("node bin must have two indices");
      node.bin = {bin[0], bin[1]};
      node.members = n.at("members").get<std::vector<std::size_t>>();
      if (n.at("size").get<std::size_t>() != node.members.size()) throw Error("node size does not match members");
      for (const auto& [track, counts] : n.at("label_counts").items()) {
        auto& dst = node.label_counts[track];
        for (const auto& [label, count] : counts.items()) dst[std::stoi(label)] = count.get<std::size_t>();
      }
      if (node.id != out.graph.nodes.size()) throw Error("node ids must be 0..n-1 in order");
      out.graph.nodes.push_back(std::move(node));
    }
    for (const auto& e : doc.at("edges")) {
      const auto uv = e.get<std::vector<std::size_t>>();
      if (uv.size() != 2) throw Error("edge must have two endpoints");
      out.graph.edges.emplace_back(uv[0], uv[1]);
    }
    const auto& m = doc.at("meta");
    out.meta.config_hash = m.at("config_hash").get<std::string>();
    out.meta.seed = m.at("seed").get<std::uint64_t>();
    out.meta.label_track = m.at("label_track").get<std::string>();
    if (!m.at("qmod").is_null()) out.meta.qmod = m.at("qmod").get<double>();
    out.graph.n_points = m.at("n_points").get<std::size_t>();
    out.graph.n_noise_points = m.at("n_noise_points").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed graph JSON: ") + e.what());
  }
  auto comps = connected_components(out.graph);
  out.graph.n_components = comps.count;
  out.graph.component_of = std::move(comps.component_of);
  const auto& stored = doc.at("components");
  for (std::size_t id = 0; id < out.graph.component_of.size(); ++id) {
    const auto key = std::to_string(id);
    if (!stored.contains(key) || stored.at(key).get<std::size_t>() != out.graph.component_of[id]) {
      throw Error("stored components disagree with the edge list");
    }
  }
  return out;
}

std::string export_dot(const MapperGraph& graph, const std::string& label_track) {
  std::size_t largest = 1;
  for (const auto& node : graph.nodes) largest = std::max(largest, node.members.size());
  std::ostringstream out;
  out << "graph mapper {\n";
  out << "  node [shape=circle, fixedsize=true];\n";
  for (const auto& node : graph.nodes) {
    const double width = static_cast<double>(node.members.size()) / static_cast<double>(largest);
    const auto dom = dominant_label(node, label_track);
    std::string label = dom.valid ? std::to_string(dom.label) + " (" + format_double(dom.fraction) + ")"
                                  : std::to_string(node.id);
    out << "  n" << node.id << " [width=" << format_double(width) << ", size=" << node.members.size()
        << ", component=" << (node.id < graph.component_of.size() ? graph.component_of[node.id] : 0)
        << ", label=\"" << label << "\"];\n";
  }
  for (const auto& [u, v] : graph.edges) out << "  n" << u << " -- n" << v << ";\n";
  out << "}\n";
  return out.str();
}

std::string export_graphml(const MapperGraph& graph, const std::string& label_track) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
  out << "  <key id=\"size\" for=\"node\" attr.name=\"size\" attr.type=\"int\"/>\n";
  out << "  <key id=\"bin_i\" for=\"node\" attr.name=\"bin_i\" attr.type=\"int\"/>\n";
  out << "  <key id=\"bin_j\" for=\"node\" attr.name=\"bin_j\" attr.type=\"int\"/>\n";
  out << "  <key id=\"component\" for=\"node\" attr.name=\"component\" attr.type=\"int\"/>\n";
  out << "  <key id=\"dominant_label\" for=\"node\" attr.name=\"dominant_label\" attr.type=\"int\"/>\n";
  out << "  <key id=\"dominant_fraction\" for=\"node\" attr.name=\"dominant_fraction\" attr.type=\"double\"/>\n";
  out << "  <key id=\"label_counts\" for=\"node\" attr.name=\"label_counts\" attr.type=\"string\"/>\n";
  out << "  <graph id=\"mapper\" edgedefault=\"undirected\">\n";
  for (const auto& node : graph.nodes) {
    out << "    <node id=\"n" << node.id << "\">\n";
    out << "      <data key=\"size\">" << node.members.size() << "</data>\n";
    out << "      <data key=\"bin_i\">" << node.bin.i << "</data>\n";
    out << "      <data key=\"bin_j\">" << node.bin.j << "</data>\n";
    if (node.id < graph.component_of.size()) {
      out << "      <data key=\"component\">" << graph.component_of[node.id] << "</data>\n";
    }
    const auto dom = dominant_label(node, label_track);
    if (dom.valid) {
      out << "      <data key=\"dominant_label\">" << dom.label << "</data>\n";
      out << "      <data key=\"dominant_fraction\">" << format_double(dom.fraction) << "</data>\n";
      out << "      <data key=\"label_counts\">" << xml_escape(counts_text(node.label_counts.at(label_track)))
          << "</data>\n";
    }
    out << "    </node>\n";
  }
  std::size_t e = 0;
  for (const auto& [u, v] : graph.edges) {
    out << "    <edge id=\"e" << e++ << "\" source=\"n" << u << "\" target=\"n" << v << "\"/>\n";
  }
  out << "  </graph>\n";
  out << "</graphml>\n";
  return out.str();
}

}  // namespace mappereeg
