#pragma once

#include "mappereeg/lens.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace mappereeg {

struct CoverConfig {
  std::size_t cubes = 10;  // bins per axis
  double overlap = 0.35;   // adjacent-bin overlap fraction in [0, 1)
};

struct BinIndex {
  std::size_t i = 0;  // x axis
  std::size_t j = 0;  // y axis
  auto operator<=>(const BinIndex&) const = default;
};

struct Bin {
  BinIndex index;
  std::array<double, 2> center{};
  std::array<double, 2> half_width{};
};

struct BinAssignment {
  std::size_t cubes = 0;
  /// All b*b bins, ordered by (i, j).
  std::vector<Bin> bins;
  /// Per point, the flat indices (i * b + j) of the bins containing it,
  /// ascending.
  std::vector<std::vector<std::size_t>> memberships;

  std::size_t point_count() const { return memberships.size(); }
  /// Points of each bin, ascending; indexed like bins.
  std::vector<std::vector<std::size_t>> bin_members() const;
};

/// Tiles the padded bounding rectangle of the embedding with b x b closed
/// square bins. Bin width is step / (1 - overlap).
BinAssignment build_cover(const Embedding2D& embedding, const CoverConfig& cfg);

}  // namespace mappereeg
