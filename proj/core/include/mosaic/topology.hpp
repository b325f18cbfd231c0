#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mosaic {

/// Geometry and capacities of the tiled fabric.
///
/// The fabric is a checkerboard lattice of neuron tiles (NT) interleaved
/// with routing tiles. `nt_input_size` and `rt_size` are the input sizes of
/// the square crossbar arrays inside an NT and an RT respectively.
struct GridConfig {
  int nt_rows = 1;
  int nt_cols = 1;
  int neurons_per_tile = 1;
  int nt_input_size = 1;
  int rt_size = 1;

  /// Throws std::invalid_argument if the configuration is malformed.
  void validate() const;

  int nt_count() const { return nt_rows * nt_cols; }
  int total_neurons() const { return nt_count() * neurons_per_tile; }
};

enum class TileKind : std::uint8_t {
  NT,   ///< neuron tile, lattice position (even, even)
  RT0,  ///< straight-through router, exactly one odd coordinate
  RT1,  ///< turning router, lattice position (odd, odd)
};

const char* to_string(TileKind kind);

/// A position on the lattice. x is the column, y the row; kind is redundant
/// with the coordinate parity but kept for convenience.
struct TileId {
  int x = 0;
  int y = 0;
  TileKind kind = TileKind::NT;

  friend bool operator==(const TileId& a, const TileId& b) {
    return a.x == b.x && a.y == b.y;
  }
  friend auto operator<=>(const TileId& a, const TileId& b) {
    if (a.y != b.y) return a.y <=> b.y;
    return a.x <=> b.x;
  }
};

/// A neuron addressed by its NT (flat row-major index) and its slot within
/// the tile's crossbar.
struct NeuronId {
  int tile = 0;
  int local_index = 0;
};

/// Assignment of flat neuron indices to NTs. The default placement packs
/// neurons_per_tile consecutive neurons per tile, row-major over the grid.
class Placement {
 public:
  Placement() = default;
  explicit Placement(std::vector<int> neuron_to_tile)
      : neuron_to_tile_(std::move(neuron_to_tile)) {}

  static Placement blocked(const GridConfig& config);

  int tile_of(int neuron) const { return neuron_to_tile_[neuron]; }
  int size() const { return static_cast<int>(neuron_to_tile_.size()); }

  /// Throws if the placement does not put exactly neurons_per_tile neurons
  /// on every tile of the grid.
  void validate(const GridConfig& config) const;

 private:
  std::vector<int> neuron_to_tile_;
};

/// The immutable tile lattice. An nt_cols x nt_rows grid of NTs expands to a
/// (2*nt_cols-1) x (2*nt_rows-1) lattice with routers in between: RT0 on the
/// sides of each NT, RT1 in the middle of each 2x2 NT block.
///
/// Safe to share read-only across threads.
class TileLattice {
 public:
  explicit TileLattice(GridConfig config);

  const GridConfig& config() const { return config_; }
  int width() const { return 2 * config_.nt_cols - 1; }
  int height() const { return 2 * config_.nt_rows - 1; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width() && y >= 0 && y < height();
  }
  static TileKind kind_of(int x, int y);
  TileId tile_at(int x, int y) const;

  std::vector<TileId> tiles() const;
  int count(TileKind kind) const;

  // NT addressing: flat index is row-major over the NT grid.
  int nt_index(int row, int col) const;
  std::pair<int, int> nt_coords(int nt) const;  ///< (row, col)
  TileId nt_tile(int nt) const;                 ///< lattice coordinates
  bool nt_in_bounds(int nt) const { return nt >= 0 && nt < config_.nt_count(); }

  /// Number of routing tiles traversed between two NTs under 1-turn
  /// x-then-y routing. Zero for src == dst (within-tile crossbar).
  int hop_distance(int src_nt, int dst_nt) const;

  /// Largest hop distance realised by any NT pair on this grid.
  int max_hop_distance() const { return max_hop_; }

  /// Number of ordered neuron pairs whose tiles are at hop distance d.
  /// Zero for empty buckets (some d below max_hop have no pairs).
  std::int64_t bucket_size(int d) const;

 private:
  GridConfig config_;
  int max_hop_ = 0;
  std::vector<std::int64_t> bucket_sizes_;  // indexed by hop distance
};

}  // namespace mosaic
