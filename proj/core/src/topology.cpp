#include "mosaic/topology.hpp"

#include <cmath>
#include <cstdlib>

namespace mosaic {

void GridConfig::validate() const {
  if (nt_rows < 1 || nt_cols < 1)
    throw std::invalid_argument("GridConfig: nt_rows and nt_cols must be >= 1");
  if (neurons_per_tile < 1)
    throw std::invalid_argument("GridConfig: neurons_per_tile must be >= 1");
  if (nt_input_size < neurons_per_tile)
    throw std::invalid_argument(
        "GridConfig: nt_input_size must be >= neurons_per_tile (a tile holds "
        "its own recurrent fan-in)");
  if (rt_size < 1)
    throw std::invalid_argument("GridConfig: rt_size must be >= 1");
}

const char* to_string(TileKind kind) {
  switch (kind) {
    case TileKind::NT: return "NT";
    case TileKind::RT0: return "RT0";
    case TileKind::RT1: return "RT1";
  }
  return "?";
}

Placement Placement::blocked(const GridConfig& config) {
  std::vector<int> map(static_cast<std::size_t>(config.total_neurons()));
  for (int n = 0; n < config.total_neurons(); ++n)
    map[static_cast<std::size_t>(n)] = n / config.neurons_per_tile;
  return Placement(std::move(map));
}

void Placement::validate(const GridConfig& config) const {
  if (size() != config.total_neurons())
    throw std::invalid_argument("Placement: neuron count does not match grid");
  std::vector<int> per_tile(static_cast<std::size_t>(config.nt_count()), 0);
  for (int t : neuron_to_tile_) {
    if (t < 0 || t >= config.nt_count())
      throw std::invalid_argument("Placement: tile index out of grid");
    ++per_tile[static_cast<std::size_t>(t)];
  }
  for (int c : per_tile)
    if (c != config.neurons_per_tile)
      throw std::invalid_argument(
          "Placement: every tile must hold exactly neurons_per_tile neurons");
}

TileLattice::TileLattice(GridConfig config) : config_(config) {
  config_.validate();

  // Hop distance in NT-grid units: straight paths cost one router per tile
  // stepped over; turning paths run through the routing row/column and cost
  // 2*dx + 2*dy - 1.
  const int w = config_.nt_cols, h = config_.nt_rows;
  if (w == 1 && h == 1) {
    max_hop_ = 0;
  } else if (w == 1 || h == 1) {
    max_hop_ = std::max(w, h) - 1;
  } else {
    max_hop_ = 2 * (w - 1) + 2 * (h - 1) - 1;
  }

  bucket_sizes_.assign(static_cast<std::size_t>(max_hop_) + 1, 0);
  const std::int64_t npt2 =
      static_cast<std::int64_t>(config_.neurons_per_tile) *
      config_.neurons_per_tile;
  for (int a = 0; a < config_.nt_count(); ++a)
    for (int b = 0; b < config_.nt_count(); ++b)
      bucket_sizes_[static_cast<std::size_t>(hop_distance(a, b))] += npt2;
}

TileKind TileLattice::kind_of(int x, int y) {
  const bool ox = (x % 2) != 0, oy = (y % 2) != 0;
  if (ox && oy) return TileKind::RT1;
  if (ox || oy) return TileKind::RT0;
  return TileKind::NT;
}

TileId TileLattice::tile_at(int x, int y) const {
  if (!in_bounds(x, y))
    throw std::invalid_argument("TileLattice: tile (" + std::to_string(x) +
                                "," + std::to_string(y) + ") out of bounds");
  return TileId{x, y, kind_of(x, y)};
}

std::vector<TileId> TileLattice::tiles() const {
  std::vector<TileId> out;
  out.reserve(static_cast<std::size_t>(width()) * height());
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x) out.push_back(TileId{x, y, kind_of(x, y)});
  return out;
}

int TileLattice::count(TileKind kind) const {
  int n = 0;
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x)
      if (kind_of(x, y) == kind) ++n;
  return n;
}

int TileLattice::nt_index(int row, int col) const {
  if (row < 0 || row >= config_.nt_rows || col < 0 || col >= config_.nt_cols)
    throw std::invalid_argument("TileLattice: NT coordinates out of grid");
  return row * config_.nt_cols + col;
}

std::pair<int, int> TileLattice::nt_coords(int nt) const {
  if (!nt_in_bounds(nt))
    throw std::invalid_argument("TileLattice: NT index out of grid");
  return {nt / config_.nt_cols, nt % config_.nt_cols};
}

TileId TileLattice::nt_tile(int nt) const {
  auto [row, col] = nt_coords(nt);
  return TileId{2 * col, 2 * row, TileKind::NT};
}

int TileLattice::hop_distance(int src_nt, int dst_nt) const {
  auto [sr, sc] = nt_coords(src_nt);
  auto [dr, dc] = nt_coords(dst_nt);
  const int dx = std::abs(dc - sc);
  const int dy = std::abs(dr - sr);
  if (dx == 0 && dy == 0) return 0;
  if (dy == 0) return dx;
  if (dx == 0) return dy;
  return 2 * dx + 2 * dy - 1;
}

std::int64_t TileLattice::bucket_size(int d) const {
  if (d < 0) throw std::invalid_argument("bucket_size: negative hop distance");
  if (d > max_hop_) return 0;
  return bucket_sizes_[static_cast<std::size_t>(d)];
}

}  // namespace mosaic
