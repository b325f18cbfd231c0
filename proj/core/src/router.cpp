#include "mosaic/router.hpp"

#include <algorithm>

namespace mosaic {

const char* to_string(Direction d) {
  switch (d) {
    case Direction::East: return "E";
    case Direction::West: return "W";
    case Direction::North: return "N";
    case Direction::South: return "S";
    case Direction::Deliver: return "D";
  }
  return "?";
}

namespace {

int sign(int v) { return (v > 0) - (v < 0); }

Direction step_direction(const TileId& from, const TileId& to) {
  if (to.x > from.x) return Direction::East;
  if (to.x < from.x) return Direction::West;
  if (to.y > from.y) return Direction::South;
  return Direction::North;
}

}  // namespace

std::vector<TileId> route_single(int src_nt, int dst_nt,
                                 const TileLattice& lattice) {
  auto [sr, sc] = lattice.nt_coords(src_nt);
  auto [dr, dc] = lattice.nt_coords(dst_nt);
  std::vector<TileId> path;
  if (src_nt == dst_nt) return path;

  const int s = sign(dc - sc);  // horizontal travel
  const int t = sign(dr - sr);  // vertical travel
  const int sx = 2 * sc, sy = 2 * sr, dx = 2 * dc, dy = 2 * dr;

  if (t == 0) {
    // Straight along the source row: RT0s at odd x, stepping over NTs.
    for (int x = sx + s; x != dx + s; x += 2 * s)
      path.push_back(lattice.tile_at(x, sy));
  } else if (s == 0) {
    // Straight along the source column.
    for (int y = sy + t; y != dy + t; y += 2 * t)
      path.push_back(lattice.tile_at(sx, y));
  } else {
    // x-then-y with the single turn at RT1 (dx - s, sy + t): inject into the
    // vertical RT0, run the x-segment through the adjacent routing row, turn,
    // then descend the routing column next to the destination.
    path.push_back(lattice.tile_at(sx, sy + t));
    for (int x = sx + s; x != dx; x += s) path.push_back(lattice.tile_at(x, sy + t));
    for (int y = sy + 2 * t; y != dy + t; y += t)
      path.push_back(lattice.tile_at(dx - s, y));
  }
  return path;
}

RouteTree route_axon(const NeuronId& source, std::span<const int> destinations,
                     const TileLattice& lattice) {
  if (destinations.empty())
    throw std::invalid_argument("route_axon: empty destination set");
  if (!lattice.nt_in_bounds(source.tile))
    throw std::invalid_argument("route_axon: source tile out of grid");

  RouteTree tree;
  tree.source = source;
  tree.destinations.assign(destinations.begin(), destinations.end());
  std::sort(tree.destinations.begin(), tree.destinations.end());
  tree.destinations.erase(
      std::unique(tree.destinations.begin(), tree.destinations.end()),
      tree.destinations.end());

  for (int dst : tree.destinations) {
    if (!lattice.nt_in_bounds(dst))
      throw std::invalid_argument("route_axon: destination tile out of grid");
    auto path = route_single(source.tile, dst, lattice);
    for (std::size_t i = 0; i < path.size(); ++i) {
      tree.tiles.insert(path[i]);
      if (i + 1 < path.size())
        tree.branches[path[i]].insert(step_direction(path[i], path[i + 1]));
      else
        tree.branches[path[i]].insert(Direction::Deliver);
    }
    tree.paths.push_back(std::move(path));
  }
  return tree;
}

OccupancyMap compute_occupancy(const Mask& mask, const Placement& placement,
                               const TileLattice& lattice,
                               std::span<const int> input_rows_per_nt) {
  const GridConfig& config = lattice.config();
  placement.validate(config);
  if (mask.rows() != config.total_neurons() ||
      mask.cols() != config.total_neurons())
    throw std::invalid_argument("compute_occupancy: mask shape does not match grid");
  if (!input_rows_per_nt.empty() &&
      static_cast<int>(input_rows_per_nt.size()) != config.nt_count())
    throw std::invalid_argument("compute_occupancy: input row vector size mismatch");

  OccupancyMap occ;
  const auto nts = static_cast<std::size_t>(config.nt_count());
  occ.nt_local_rows.assign(nts, 0);
  occ.nt_remote_rows.assign(nts, 0);
  occ.nt_input_rows.assign(nts, 0);
  for (std::size_t i = 0; i < input_rows_per_nt.size(); ++i)
    occ.nt_input_rows[i] = input_rows_per_nt[i];

  const int n = config.total_neurons();
  std::vector<int> remote;
  for (int pre = 0; pre < n; ++pre) {
    const int src_tile = placement.tile_of(pre);
    bool local = false;
    remote.clear();
    for (int post = 0; post < n; ++post) {
      if (!mask.at(pre, post)) continue;
      const int dst_tile = placement.tile_of(post);
      if (dst_tile == src_tile) {
        local = true;
      } else {
        remote.push_back(dst_tile);
      }
    }
    if (local) ++occ.nt_local_rows[static_cast<std::size_t>(src_tile)];
    if (remote.empty()) continue;

    std::sort(remote.begin(), remote.end());
    remote.erase(std::unique(remote.begin(), remote.end()), remote.end());
    const RouteTree tree =
        route_axon(NeuronId{src_tile, pre % config.neurons_per_tile}, remote, lattice);
    for (const TileId& tile : tree.tiles) ++occ.rt_load[tile];
    for (int dst : tree.destinations)
      ++occ.nt_remote_rows[static_cast<std::size_t>(dst)];
  }
  return occ;
}

MappabilityReport check_mappable(const OccupancyMap& occupancy,
                                 const TileLattice& lattice) {
  const GridConfig& config = lattice.config();
  MappabilityReport report;
  for (int nt = 0; nt < config.nt_count(); ++nt) {
    const int required = occupancy.nt_fanin(nt, config);
    report.peak_nt_fanin = std::max(report.peak_nt_fanin, required);
    if (required > config.nt_input_size)
      report.violations.push_back({lattice.nt_tile(nt), required, config.nt_input_size});
  }
  for (const auto& [tile, load] : occupancy.rt_load) {
    report.peak_rt_load = std::max(report.peak_rt_load, load);
    if (load > config.rt_size)
      report.violations.push_back({tile, load, config.rt_size});
  }
  report.mappable = report.violations.empty();
  return report;
}

MappabilityReport check_mappable(const Mask& mask, const Placement& placement,
                                 const TileLattice& lattice,
                                 std::span<const int> input_rows_per_nt) {
  return check_mappable(
      compute_occupancy(mask, placement, lattice, input_rows_per_nt), lattice);
}

std::int64_t memory_element_count(const OccupancyMap& occupancy,
                                  const GridConfig& config) {
  std::int64_t total = 0;
  for (int nt = 0; nt < config.nt_count(); ++nt)
    total += occupancy.nt_occupied_rows(nt);
  for (const auto& [tile, load] : occupancy.rt_load) total += load;
  return total;
}

}  // namespace mosaic
