#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mosaic/profile.hpp"
#include "mosaic/topology.hpp"

namespace mosaic {

enum class RewireMode : std::uint8_t {
  Global,   ///< single bucket, target count = round(s_hat * N^2)
  Profile,  ///< one bucket per hop distance, targets from a sparsity profile
};

struct RewireConfig {
  RewireMode mode = RewireMode::Profile;
  SparsityProfile target;         ///< profile mode
  double global_sparsity = 0.1;   ///< global mode
  /// Absolute magnitude below which a connection is pruned. A value of 0
  /// means "derive as 1e-3 * init_scale when init_weights runs".
  double prune_threshold = 0.0;
  double lambda_l1 = 1e-5;
  bool allow_self = false;
};

/// Audit record of one prune/reassign step.
struct RewireEvent {
  int epoch = 0;
  std::vector<std::int64_t> pruned;   ///< per bucket
  std::vector<std::int64_t> regrown;  ///< per bucket; equals pruned per bucket

  std::int64_t total_pruned() const;
};

/// Per-bucket active-connection bookkeeping for the prune/reassign loop.
///
/// Weight matrices are indexed (post, pre); the active set is kept exactly
/// consistent with the nonzero structure of the recurrent matrix.
class RewireState {
 public:
  RewireState(const RewireConfig& config, const Placement& placement,
              const TileLattice& lattice);

  int n_buckets() const { return static_cast<int>(buckets_.size()); }
  std::int64_t target(int bucket) const {
    return targets_[static_cast<std::size_t>(bucket)];
  }
  const std::vector<std::int64_t>& targets() const { return targets_; }
  std::vector<std::int64_t> active_counts() const { return counts_; }
  std::int64_t total_active() const;
  bool is_active(int pre, int post) const {
    return active_[flat(pre, post)] != 0;
  }
  Mask mask() const;
  double prune_threshold() const { return threshold_; }
  double lambda_l1() const { return config_.lambda_l1; }
  RewireMode mode() const { return config_.mode; }

  /// Draw the initial active set (per-bucket uniform, counts equal to the
  /// targets) and return a recurrent matrix with active entries ~
  /// N(0, init_scale) and inactive entries exactly zero.
  Eigen::MatrixXd init_weights(double init_scale, std::uint64_t seed);

  /// lambda * sum of |w| over active entries.
  double l1_term(const Eigen::MatrixXd& w_rec) const;

  /// Add the L1 subgradient lambda * sign(w) on active entries.
  void add_l1_subgradient(const Eigen::MatrixXd& w_rec,
                          Eigen::MatrixXd& grad) const;

  /// Zero every inactive entry of `m` (used for weights, gradients and
  /// optimizer moments).
  void apply_mask(Eigen::MatrixXd& m) const;

  /// Deactivate every active connection with |w| < prune_threshold.
  /// Returns per-bucket pruned counts.
  std::vector<std::int64_t> prune(Eigen::MatrixXd& w_rec);

  /// Refill every bucket to its target by activating uniformly random
  /// inactive eligible pairs at weight +-prune_threshold.
  std::vector<std::int64_t> reassign(Eigen::MatrixXd& w_rec, std::uint64_t seed);

  /// prune then reassign; the per-bucket counts equal the targets afterwards.
  RewireEvent rewire_epoch(Eigen::MatrixXd& w_rec, int epoch, std::uint64_t seed);

 private:
  std::size_t flat(int pre, int post) const {
    return static_cast<std::size_t>(pre) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(post);
  }
  int bucket_of(int pre, int post) const;

  RewireConfig config_;
  const Placement* placement_;
  const TileLattice* lattice_;
  int n_ = 0;
  double threshold_ = 0.0;
  std::vector<std::vector<std::pair<int, int>>> buckets_;  ///< eligible pairs
  std::vector<std::int64_t> targets_;
  std::vector<std::int64_t> counts_;
  std::vector<std::uint8_t> active_;  ///< n x n, indexed pre * n + post
};

}  // namespace mosaic
