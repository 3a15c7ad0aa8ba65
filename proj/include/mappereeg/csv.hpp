#pragma once

#include "mappereeg/lens.hpp"
#include "mappereeg/spectral.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mappereeg {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws Error when the column is absent.
  std::size_t column(const std::string& name) const;
};

/// Comma-separated, header row, no quoting. Throws Error on ragged rows.
CsvTable parse_csv(const std::string& text);

double parse_real(const std::string& cell);
long long parse_integer(const std::string& cell);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Label track columns in feature CSVs are named "label:<track>".
inline constexpr std::string_view kLabelColumnPrefix = "label:";

/// window_start, one column per channel, one "label:<track>" column per track.
std::string power_to_csv(const BandPowerSequence& seq);
BandPowerSequence power_from_csv(const std::string& text);

/// x,y per row.
std::string embedding_to_csv(const Embedding2D& emb);
Embedding2D embedding_from_csv(const std::string& text);

}  // namespace mappereeg
