#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mosaic/mask.hpp"
#include "mosaic/router.hpp"
#include "mosaic/topology.hpp"

namespace mosaic {

/// Per-hop-distance connection density, p[d] in [0,1], d = 0..max_hop.
struct SparsityProfile {
  std::vector<double> p;

  int max_hop() const { return static_cast<int>(p.size()) - 1; }
  double at(int d) const {
    return (d >= 0 && d < static_cast<int>(p.size())) ? p[static_cast<std::size_t>(d)]
                                                      : 0.0;
  }
  void validate() const;
};

/// Eligible (pre, post) neuron pairs grouped by hop distance. Shared by the
/// profile sampler and the rewiring bookkeeping.
class BucketIndex {
 public:
  BucketIndex(const Placement& placement, const TileLattice& lattice,
              bool allow_self);

  int n_buckets() const { return static_cast<int>(pairs_.size()); }
  const std::vector<std::pair<int, int>>& pairs(int d) const {
    return pairs_[static_cast<std::size_t>(d)];
  }
  /// Hop-distance bucket of a neuron pair (self pairs land in d = 0 even
  /// when excluded from eligibility).
  int bucket_of(int pre, int post) const;
  bool allow_self() const { return allow_self_; }

 private:
  const TileLattice* lattice_;
  const Placement* placement_;
  bool allow_self_;
  std::vector<std::vector<std::pair<int, int>>> pairs_;
};

/// Rounding used to turn densities into integer bucket counts
/// (round half to even).
std::int64_t round_count(double density, std::int64_t bucket_size);

/// Measured profile of a mask: active pairs per bucket / bucket_size(d).
SparsityProfile measure_profile(const Mask& mask, const Placement& placement,
                                const TileLattice& lattice);

/// Per-bucket active connection counts of a mask (numerators of the profile).
std::vector<std::int64_t> bucket_counts(const Mask& mask,
                                        const Placement& placement,
                                        const TileLattice& lattice);

/// Draw a uniformly random mask whose per-bucket counts equal
/// round_count(target.p[d], bucket_size(d)). Deterministic given seed.
/// Throws std::invalid_argument for infeasible targets.
Mask sample_mask_with_profile(const SparsityProfile& target,
                              const Placement& placement,
                              const TileLattice& lattice, std::uint64_t seed,
                              bool allow_self = false);

/// Minimum required crossbar input sizes, per tile kind, over Monte-Carlo
/// samples of masks with a common target profile.
struct ResourceEstimate {
  struct Stat {
    double mean = 0.0;
    double stddev = 0.0;
    int max = 0;
  };
  Stat nt;
  Stat rt0;
  Stat rt1;
  int n_samples = 0;
};

ResourceEstimate estimate_required_resources(const SparsityProfile& target,
                                             const Placement& placement,
                                             const TileLattice& lattice,
                                             int n_samples, std::uint64_t seed,
                                             bool allow_self = false);

}  // namespace mosaic
