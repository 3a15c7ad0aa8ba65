#include "mappereeg/cover.hpp"

#include <algorithm>
#include <cmath>

namespace mappereeg {

namespace {

struct AxisTiling {
  double lo = 0.0;
  double step = 0.0;
  double width = 0.0;

  double center(std::size_t i) const { return lo + step * (static_cast<double>(i) + 0.5); }

  // Bins along this axis whose closed interval contains x.
  std::vector<std::size_t> bins_containing(double x, std::size_t b) const {
    std::vector<std::size_t> out;
    const double half = width / 2.0;
    const double first = std::floor((x - lo - half) / step - 0.5) - 1.0;
    const double last = std::ceil((x - lo + half) / step - 0.5) + 1.0;
    const auto i0 = static_cast<long long>(std::max(first, 0.0));
    const auto i1 = static_cast<long long>(std::min(last, static_cast<double>(b) - 1.0));
    for (long long i = i0; i <= i1; ++i) {
      if (std::abs(x - center(static_cast<std::size_t>(i))) <= half) out.push_back(static_cast<std::size_t>(i));
    }
    return out;
  }
};

AxisTiling tile_axis(const Matrix& pts, Eigen::Index axis, const CoverConfig& cfg) {
  double lo = pts.col(axis).minCoeff();
  double hi = pts.col(axis).maxCoeff();
  const double pad = std::max(1e-9, 1e-9 * std::abs(hi - lo));
  lo -= pad;
  hi += pad;
  AxisTiling t;
  t.lo = lo;
  t.step = (hi - lo) / static_cast<double>(cfg.cubes);
  t.width = t.step / (1.0 - cfg.overlap);
  return t;
}

}  // namespace

std::vector<std::vector<std::size_t>> BinAssignment::bin_members() const {
  std::vector<std::vector<std::size_t>> out(bins.size());
  for (std::size_t p = 0; p < memberships.size(); ++p) {
    for (auto b : memberships[p]) out[b].push_back(p);
  }
  return out;
}

BinAssignment build_cover(const Embedding2D& embedding, const CoverConfig& cfg) {
  const Matrix& pts = embedding.points;
  if (pts.rows() == 0) throw Error("cannot cover an empty embedding");
  if (pts.cols() != 2) throw Error("cover expects a two-dimensional embedding");
  if (cfg.cubes < 1) throw Error("cover needs at least one bin per axis");
  if (!(cfg.overlap >= 0.0 && cfg.overlap < 1.0)) throw Error("cover overlap must be in [0, 1)");

  const AxisTiling tx = tile_axis(pts, 0, cfg);
  const AxisTiling ty = tile_axis(pts, 1, cfg);
  const std::size_t b = cfg.cubes;

  BinAssignment out;
  out.cubes = b;
  out.bins.reserve(b * b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      out.bins.push_back(Bin{{i, j}, {tx.center(i), ty.center(j)}, {tx.width / 2.0, ty.width / 2.0}});
    }
  }
  out.memberships.resize(static_cast<std::size_t>(pts.rows()));
  for (Eigen::Index p = 0; p < pts.rows(); ++p) {
    const auto xs = tx.bins_containing(pts(p, 0), b);
    const auto ys = ty.bins_containing(pts(p, 1), b);
    auto& m = out.memberships[static_cast<std::size_t>(p)];
    for (auto i : xs) {
      for (auto j : ys) m.push_back(i * b + j);
    }
  }
  return out;
}

}  // namespace mappereeg
