#include "mappereeg/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mappereeg {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string trim_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error("column not found: " + name);
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV");
  table.header = split_line(trim_cr(line));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim_cr(line);
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      throw Error("ragged CSV: line " + std::to_string(line_no) + " has " +
                  std::to_string(cells.size()) + " columns, header has " +
                  std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

double parse_real(const std::string& cell) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw Error("non-numeric sample: '" + cell + "'");
  return value;
}

long long parse_integer(const std::string& cell) {
  long long value = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw Error("non-integer label: '" + cell + "'");
  return value;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string power_to_csv(const BandPowerSequence& seq) {
  std::string out = "window_start";
  for (const auto& name : seq.channel_names) out += "," + name;
  for (const auto& [track, _] : seq.window_labels) {
    out += ",";
    out += kLabelColumnPrefix;
    out += track;
  }
  out += "\n";
  for (std::size_t w = 0; w < seq.window_count(); ++w) {
    out += std::to_string(seq.window_start_sample[w]);
    for (Eigen::Index c = 0; c < seq.values.cols(); ++c) {
      out += "," + format_double(seq.values(static_cast<Eigen::Index>(w), c));
    }
    for (const auto& [_, labels] : seq.window_labels) out += "," + std::to_string(labels[w]);
    out += "\n";
  }
  return out;
}

BandPowerSequence power_from_csv(const std::string& text) {
  const CsvTable table = parse_csv(text);
  if (table.header.empty() || table.header.front() != "window_start") {
    throw Error("feature CSV must start with a window_start column");
  }
  BandPowerSequence seq;
  std::vector<std::size_t> feature_cols;
  std::vector<std::pair<std::string, std::size_t>> label_cols;
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    const auto& h = table.header[c];
    if (h.starts_with(kLabelColumnPrefix)) {
      label_cols.emplace_back(h.substr(kLabelColumnPrefix.size()), c);
    } else {
      feature_cols.push_back(c);
      seq.channel_names.push_back(h);
    }
  }
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  seq.values.resize(n, static_cast<Eigen::Index>(feature_cols.size()));
  for (const auto& [track, _] : label_cols) seq.window_labels[track].resize(table.rows.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = table.rows[static_cast<std::size_t>(r)];
    seq.window_start_sample.push_back(static_cast<std::size_t>(parse_integer(row[0])));
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      seq.values(r, static_cast<Eigen::Index>(k)) = parse_real(row[feature_cols[k]]);
    }
    for (const auto& [track, col] : label_cols) {
      seq.window_labels[track][static_cast<std::size_t>(r)] = static_cast<int>(parse_integer(row[col]));
    }
  }
  return seq;
}

std::string embedding_to_csv(const Embedding2D& emb) {
  std::string out = "x,y\n";
  for (Eigen::Index r = 0; r < emb.points.rows(); ++r) {
    out += format_double(emb.points(r, 0)) + "," + format_double(emb.points(r, 1)) + "\n";
  }
  return out;
}

Embedding2D embedding_from_csv(const std::string& text) {
  const CsvTable table = parse_csv(text);
  const std::size_t xc = table.column("x");
  const std::size_t yc = table.column("y");
  Embedding2D emb;
  emb.points.resize(static_cast<Eigen::Index>(table.rows.size()), 2);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    emb.points(static_cast<Eigen::Index>(r), 0) = parse_real(table.rows[r][xc]);
    emb.points(static_cast<Eigen::Index>(r), 1) = parse_real(table.rows[r][yc]);
  }
  return emb;
}

}  // namespace mappereeg
