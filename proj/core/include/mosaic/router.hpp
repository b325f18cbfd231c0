#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include "mosaic/mask.hpp"
#include "mosaic/topology.hpp"

namespace mosaic {

enum class Direction : std::uint8_t { East, West, North, South, Deliver };

const char* to_string(Direction d);

/// Multicast routing tree for one source axon.
///
/// Every root-to-destination path routes along x first, then y, with at most
/// one 90-degree turn, taken only at an RT1. Straight segments of turning
/// paths run through the routing row adjacent to the source; destinations
/// sharing a path prefix share those tiles.
struct RouteTree {
  NeuronId source;
  std::vector<int> destinations;  ///< NT indices, deduplicated
  /// Per-destination ordered RT tile sequence (empty for the source's own
  /// NT). Index-aligned with `destinations`.
  std::vector<std::vector<TileId>> paths;
  /// Union of all path tiles; each tile appears once.
  std::set<TileId> tiles;
  /// Outgoing directions per tile (successors in the tree, plus Deliver for
  /// tiles that hand a spike into a destination NT).
  std::map<TileId, std::set<Direction>> branches;
};

/// The deterministic 1-turn path from one NT to another; empty if equal.
std::vector<TileId> route_single(int src_nt, int dst_nt,
                                 const TileLattice& lattice);

/// Build the shared-path multicast tree for `source` towards `destinations`.
/// Throws std::invalid_argument on an empty destination set or out-of-grid
/// indices.
RouteTree route_axon(const NeuronId& source, std::span<const int> destinations,
                     const TileLattice& lattice);

/// Per-tile crossbar row usage of a mapped network.
///
/// NT rows split into: local rows (local neurons with at least one in-tile
/// target), remote rows (one per distinct remote source axon delivering into
/// the tile), and input rows (dataset channels injected at the tile). The
/// local crossbar structurally reserves one row per local neuron, so the
/// fan-in that counts against nt_input_size is
/// neurons_per_tile + remote + input.
struct OccupancyMap {
  std::map<TileId, int> rt_load;
  std::vector<int> nt_local_rows;
  std::vector<int> nt_remote_rows;
  std::vector<int> nt_input_rows;

  int nt_fanin(int nt, const GridConfig& config) const {
    return config.neurons_per_tile + nt_remote_rows[static_cast<std::size_t>(nt)] +
           nt_input_rows[static_cast<std::size_t>(nt)];
  }
  /// Rows actually holding a value; the memory-element contribution of an NT.
  int nt_occupied_rows(int nt) const {
    const auto i = static_cast<std::size_t>(nt);
    return nt_local_rows[i] + nt_remote_rows[i] + nt_input_rows[i];
  }
};

/// Exact per-tile occupancy of `mask` routed onto `lattice`.
/// `input_rows_per_nt`, when non-empty, adds dataset-input rows per NT
/// (input axons consume NT rows but no RT resources).
OccupancyMap compute_occupancy(const Mask& mask, const Placement& placement,
                               const TileLattice& lattice,
                               std::span<const int> input_rows_per_nt = {});

struct MappabilityReport {
  struct Violation {
    TileId tile;
    int required = 0;
    int capacity = 0;
  };
  bool mappable = false;
  std::vector<Violation> violations;
  int peak_nt_fanin = 0;
  int peak_rt_load = 0;
};

MappabilityReport check_mappable(const OccupancyMap& occupancy,
                                 const TileLattice& lattice);

MappabilityReport check_mappable(const Mask& mask, const Placement& placement,
                                 const TileLattice& lattice,
                                 std::span<const int> input_rows_per_nt = {});

/// Total occupied crossbar rows across all tiles (NT rows + RT entries).
std::int64_t memory_element_count(const OccupancyMap& occupancy,
                                  const GridConfig& config);

}  // namespace mosaic
