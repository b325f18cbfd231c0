#include "mosaic/profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mosaic/rng.hpp"

namespace mosaic {

void SparsityProfile::validate() const {
  for (double d : p)
    if (!(d >= 0.0 && d <= 1.0))
      throw std::invalid_argument("SparsityProfile: densities must be in [0,1]");
}

BucketIndex::BucketIndex(const Placement& placement, const TileLattice& lattice,
                         bool allow_self)
    : lattice_(&lattice), placement_(&placement), allow_self_(allow_self) {
  placement.validate(lattice.config());
  pairs_.resize(static_cast<std::size_t>(lattice.max_hop_distance()) + 1);
  const int n = lattice.config().total_neurons();
  for (int pre = 0; pre < n; ++pre) {
    for (int post = 0; post < n; ++post) {
      if (pre == post && !allow_self) continue;
      const int d =
          lattice.hop_distance(placement.tile_of(pre), placement.tile_of(post));
      pairs_[static_cast<std::size_t>(d)].emplace_back(pre, post);
    }
  }
}

int BucketIndex::bucket_of(int pre, int post) const {
  return lattice_->hop_distance(placement_->tile_of(pre),
                                placement_->tile_of(post));
}

std::int64_t round_count(double density, std::int64_t bucket_size) {
  const double x = density * static_cast<double>(bucket_size);
  const double fl = std::floor(x);
  const double frac = x - fl;
  auto lo = static_cast<std::int64_t>(fl);
  if (frac > 0.5) return lo + 1;
  if (frac < 0.5) return lo;
  return (lo % 2 == 0) ? lo : lo + 1;  // half to even
}

std::vector<std::int64_t> bucket_counts(const Mask& mask,
                                        const Placement& placement,
                                        const TileLattice& lattice) {
  placement.validate(lattice.config());
  const int n = lattice.config().total_neurons();
  if (mask.rows() != n || mask.cols() != n)
    throw std::invalid_argument("bucket_counts: mask shape does not match grid");
  std::vector<std::int64_t> counts(
      static_cast<std::size_t>(lattice.max_hop_distance()) + 1, 0);
  for (int pre = 0; pre < n; ++pre)
    for (int post = 0; post < n; ++post)
      if (mask.at(pre, post))
        ++counts[static_cast<std::size_t>(lattice.hop_distance(
            placement.tile_of(pre), placement.tile_of(post)))];
  return counts;
}

SparsityProfile measure_profile(const Mask& mask, const Placement& placement,
                                const TileLattice& lattice) {
  const auto counts = bucket_counts(mask, placement, lattice);
  SparsityProfile profile;
  profile.p.resize(counts.size(), 0.0);
  for (std::size_t d = 0; d < counts.size(); ++d) {
    const std::int64_t size = lattice.bucket_size(static_cast<int>(d));
    profile.p[d] = size > 0 ? static_cast<double>(counts[d]) / static_cast<double>(size)
                            : 0.0;
  }
  return profile;
}

Mask sample_mask_with_profile(const SparsityProfile& target,
                              const Placement& placement,
                              const TileLattice& lattice, std::uint64_t seed,
                              bool allow_self) {
  target.validate();
  const BucketIndex buckets(placement, lattice, allow_self);
  const int n = lattice.config().total_neurons();
  Mask mask(n, n);
  Rng rng(seed);
  std::vector<std::size_t> order;
  for (int d = 0; d < buckets.n_buckets(); ++d) {
    const auto& eligible = buckets.pairs(d);
    const std::int64_t want = round_count(target.at(d), lattice.bucket_size(d));
    if (want > static_cast<std::int64_t>(eligible.size()))
      throw std::invalid_argument(
          "sample_mask_with_profile: bucket " + std::to_string(d) + " needs " +
          std::to_string(want) + " pairs but only " +
          std::to_string(eligible.size()) + " are eligible");
    // Partial Fisher-Yates over pair indices.
    order.resize(eligible.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::int64_t i = 0; i < want; ++i) {
      std::uniform_int_distribution<std::size_t> pick(
          static_cast<std::size_t>(i), order.size() - 1);
      std::swap(order[static_cast<std::size_t>(i)], order[pick(rng)]);
      const auto& [pre, post] = eligible[order[static_cast<std::size_t>(i)]];
      mask.set(pre, post);
    }
  }
  return mask;
}

namespace {

struct Welford {
  double sum = 0.0, sumsq = 0.0;
  int max = 0, n = 0;
  void add(int v) {
    sum += v;
    sumsq += static_cast<double>(v) * v;
    max = std::max(max, v);
    ++n;
  }
  ResourceEstimate::Stat stat() const {
    ResourceEstimate::Stat s;
    if (n == 0) return s;
    s.mean = sum / n;
    const double var = std::max(0.0, sumsq / n - s.mean * s.mean);
    s.stddev = std::sqrt(var);
    s.max = max;
    return s;
  }
};

}  // namespace

ResourceEstimate estimate_required_resources(const SparsityProfile& target,
                                             const Placement& placement,
                                             const TileLattice& lattice,
                                             int n_samples, std::uint64_t seed,
                                             bool allow_self) {
  if (n_samples < 1)
    throw std::invalid_argument("estimate_required_resources: n_samples >= 1");
  Welford nt, rt0, rt1;
  for (int k = 0; k < n_samples; ++k) {
    const Mask mask = sample_mask_with_profile(
        target, placement, lattice, derive_seed(seed, static_cast<std::uint64_t>(k)),
        allow_self);
    const OccupancyMap occ = compute_occupancy(mask, placement, lattice);
    int nt_req = 0;
    for (int i = 0; i < lattice.config().nt_count(); ++i)
      nt_req = std::max(nt_req, occ.nt_fanin(i, lattice.config()));
    int rt0_req = 0, rt1_req = 0;
    for (const auto& [tile, load] : occ.rt_load) {
      if (tile.kind == TileKind::RT0) rt0_req = std::max(rt0_req, load);
      else rt1_req = std::max(rt1_req, load);
    }
    nt.add(nt_req);
    rt0.add(rt0_req);
    rt1.add(rt1_req);
  }
  ResourceEstimate est;
  est.nt = nt.stat();
  est.rt0 = rt0.stat();
  est.rt1 = rt1.stat();
  est.n_samples = n_samples;
  return est;
}

}  // namespace mosaic
