#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace mosaic {

/// Event-based classification dataset: per-sample spike times (seconds) and
/// channel indices, plus integer class labels.
struct SpikeDataset {
  struct Sample {
    std::vector<double> times;
    std::vector<int> channels;
  };
  std::vector<Sample> samples;
  std::vector<int> labels;
  int n_channels = 0;
  int n_classes = 0;
  std::string split;  ///< "train" or "test"

  void validate() const;
};

/// Loads a Spiking Heidelberg Digits split. `path` may be the .h5 file
/// itself or a directory containing shd_<split>.h5. Channel and class counts
/// are derived from the file contents and cross-checked across datasets.
SpikeDataset load_shd(const std::string& path, const std::string& split);

/// Pool channels in groups of `factor` (channel c maps to c / factor).
SpikeDataset pool_channels(const SpikeDataset& dataset, int factor);

/// Dense binned spike tensors, one (n_channels x n_steps) matrix per sample.
struct BinnedDataset {
  std::vector<Eigen::MatrixXd> x;
  std::vector<int> labels;
  int n_channels = 0;
  int n_classes = 0;
  int n_steps = 0;

  int size() const { return static_cast<int>(x.size()); }
};

/// Bin events into n_steps bins over [0, duration); events at t >= duration
/// land in the last bin. With clip (default) bins saturate at 1, otherwise
/// they hold event counts.
BinnedDataset bin_spikes(const SpikeDataset& dataset, int n_steps,
                         double duration, bool clip = true);

struct SyntheticOptions {
  int n_train_per_class = 24;
  int n_test_per_class = 12;
  int events_per_class = 60;     ///< template size
  double jitter_prob = 0.3;      ///< chance an event shifts by one step
  double drop_prob = 0.1;        ///< chance an event is omitted
  int min_template_distance = 0; ///< 0 = events_per_class / 2
  double duration = 1.0;         ///< seconds spanned by the n_steps grid
};

/// Desk-scale stand-in task: each class is a fixed random spatiotemporal
/// spike template; samples add per-event jitter and drop-out. Templates are
/// regenerated until all pairwise Hamming distances meet the minimum, so the
/// noise-free task is separable by construction. Deterministic given seed.
std::pair<SpikeDataset, SpikeDataset> synthetic_task(
    int n_classes, int n_channels, int n_steps, std::uint64_t seed,
    const SyntheticOptions& options = {});

}  // namespace mosaic
