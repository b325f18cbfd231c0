#include "mosaic/rewire.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mosaic/rng.hpp"

namespace mosaic {

std::int64_t RewireEvent::total_pruned() const {
  return std::accumulate(pruned.begin(), pruned.end(), std::int64_t{0});
}

RewireState::RewireState(const RewireConfig& config, const Placement& placement,
                         const TileLattice& lattice)
    : config_(config),
      placement_(&placement),
      lattice_(&lattice),
      n_(lattice.config().total_neurons()),
      threshold_(config.prune_threshold) {
  placement.validate(lattice.config());
  active_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0);

  if (config_.mode == RewireMode::Profile) {
    config_.target.validate();
    const BucketIndex index(placement, lattice, config_.allow_self);
    buckets_.resize(static_cast<std::size_t>(index.n_buckets()));
    targets_.resize(buckets_.size());
    for (int d = 0; d < index.n_buckets(); ++d) {
      buckets_[static_cast<std::size_t>(d)] = index.pairs(d);
      targets_[static_cast<std::size_t>(d)] =
          round_count(config_.target.at(d), lattice.bucket_size(d));
      if (targets_[static_cast<std::size_t>(d)] >
          static_cast<std::int64_t>(buckets_[static_cast<std::size_t>(d)].size()))
        throw std::invalid_argument(
            "RewireState: infeasible profile target in bucket " +
            std::to_string(d));
    }
  } else {
    if (!(config_.global_sparsity >= 0.0 && config_.global_sparsity <= 1.0))
      throw std::invalid_argument("RewireState: global_sparsity must be in [0,1]");
    buckets_.resize(1);
    auto& all = buckets_[0];
    all.reserve(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
    for (int pre = 0; pre < n_; ++pre)
      for (int post = 0; post < n_; ++post)
        if (pre != post || config_.allow_self) all.emplace_back(pre, post);
    targets_.assign(1, round_count(config_.global_sparsity,
                                   static_cast<std::int64_t>(n_) * n_));
    if (targets_[0] > static_cast<std::int64_t>(all.size()))
      throw std::invalid_argument("RewireState: infeasible global sparsity target");
  }
  counts_.assign(targets_.size(), 0);
}

int RewireState::bucket_of(int pre, int post) const {
  if (config_.mode == RewireMode::Global) return 0;
  return lattice_->hop_distance(placement_->tile_of(pre),
                                placement_->tile_of(post));
}

std::int64_t RewireState::total_active() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

Mask RewireState::mask() const {
  Mask m(n_, n_);
  for (int pre = 0; pre < n_; ++pre)
    for (int post = 0; post < n_; ++post)
      if (active_[flat(pre, post)]) m.set(pre, post);
  return m;
}

Eigen::MatrixXd RewireState::init_weights(double init_scale, std::uint64_t seed) {
  if (threshold_ == 0.0) threshold_ = 1e-3 * init_scale;

  std::fill(active_.begin(), active_.end(), std::uint8_t{0});
  std::fill(counts_.begin(), counts_.end(), std::int64_t{0});
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_, n_);

  Rng rng(seed);
  std::normal_distribution<double> weight_dist(0.0, init_scale);
  std::vector<std::size_t> order;
  for (std::size_t b = 0; b < buckets_.size(); ++b) {
    const auto& eligible = buckets_[b];
    const std::int64_t want = targets_[b];
    order.resize(eligible.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::int64_t i = 0; i < want; ++i) {
      std::uniform_int_distribution<std::size_t> pick(
          static_cast<std::size_t>(i), order.size() - 1);
      std::swap(order[static_cast<std::size_t>(i)], order[pick(rng)]);
      const auto& [pre, post] = eligible[order[static_cast<std::size_t>(i)]];
      active_[flat(pre, post)] = 1;
      w(post, pre) = weight_dist(rng);
      ++counts_[b];
    }
  }
  return w;
}

double RewireState::l1_term(const Eigen::MatrixXd& w_rec) const {
  double sum = 0.0;
  for (int pre = 0; pre < n_; ++pre)
    for (int post = 0; post < n_; ++post)
      if (active_[flat(pre, post)]) sum += std::abs(w_rec(post, pre));
  return config_.lambda_l1 * sum;
}

void RewireState::add_l1_subgradient(const Eigen::MatrixXd& w_rec,
                                     Eigen::MatrixXd& grad) const {
  for (int pre = 0; pre < n_; ++pre)
    for (int post = 0; post < n_; ++post)
      if (active_[flat(pre, post)]) {
        const double w = w_rec(post, pre);
        grad(post, pre) += config_.lambda_l1 * ((w > 0) - (w < 0));
      }
}

void RewireState::apply_mask(Eigen::MatrixXd& m) const {
  for (int pre = 0; pre < n_; ++pre)
    for (int post = 0; post < n_; ++post)
      if (!active_[flat(pre, post)]) m(post, pre) = 0.0;
}

std::vector<std::int64_t> RewireState::prune(Eigen::MatrixXd& w_rec) {
  std::vector<std::int64_t> pruned(buckets_.size(), 0);
  for (std::size_t b = 0; b < buckets_.size(); ++b) {
    for (const auto& [pre, post] : buckets_[b]) {
      if (!active_[flat(pre, post)]) continue;
      if (std::abs(w_rec(post, pre)) < threshold_) {
        active_[flat(pre, post)] = 0;
        w_rec(post, pre) = 0.0;
        --counts_[b];
        ++pruned[b];
      }
    }
  }
  return pruned;
}

std::vector<std::int64_t> RewireState::reassign(Eigen::MatrixXd& w_rec,
                                                std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::int64_t> regrown(buckets_.size(), 0);
  std::vector<std::size_t> inactive;
  for (std::size_t b = 0; b < buckets_.size(); ++b) {
    const std::int64_t deficit = targets_[b] - counts_[b];
    if (deficit <= 0) continue;
    const auto& eligible = buckets_[b];
    inactive.clear();
    for (std::size_t i = 0; i < eligible.size(); ++i)
      if (!active_[flat(eligible[i].first, eligible[i].second)])
        inactive.push_back(i);
    // Cannot run out: targets never exceed the bucket's eligible pair count.
    if (deficit > static_cast<std::int64_t>(inactive.size()))
      throw std::logic_error("RewireState::reassign: bucket exhausted");
    for (std::int64_t i = 0; i < deficit; ++i) {
      std::uniform_int_distribution<std::size_t> pick(
          static_cast<std::size_t>(i), inactive.size() - 1);
      std::swap(inactive[static_cast<std::size_t>(i)], inactive[pick(rng)]);
      const auto& [pre, post] = eligible[inactive[static_cast<std::size_t>(i)]];
      active_[flat(pre, post)] = 1;
      const double s = (rng() & 1) ? 1.0 : -1.0;
      w_rec(post, pre) = s * threshold_;
      ++counts_[b];
      ++regrown[b];
    }
  }
  return regrown;
}

RewireEvent RewireState::rewire_epoch(Eigen::MatrixXd& w_rec, int epoch,
                                      std::uint64_t seed) {
  RewireEvent event;
  event.epoch = epoch;
  event.pruned = prune(w_rec);
  event.regrown = reassign(w_rec, seed);
  return event;
}

}  // namespace mosaic
