#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mosaic/data.hpp"
#include "mosaic/profile.hpp"
#include "mosaic/rewire.hpp"
#include "mosaic/snn.hpp"
#include "mosaic/topology.hpp"

namespace mosaic {

struct DataConfig {
  std::string source = "synthetic";  ///< "synthetic" or "shd"
  // synthetic
  int n_classes = 8;
  int n_channels = 64;
  SyntheticOptions synthetic;
  std::uint64_t dataset_seed = 7;
  // shd
  std::string shd_path;
  int pool_factor = 1;
  // binning
  int n_steps = 40;
  double duration = 1.0;
  bool clip = true;
};

struct SweepConfig {
  std::vector<double> p1;  ///< hop-1 densities
  std::vector<double> p3;  ///< hop-3 densities; the sweep is the cross product
};

/// One experiment: grid, target profile, rewiring, neuron model, optimizer,
/// data selection and seeds. Read from a JSON config file.
struct ExperimentConfig {
  GridConfig grid;
  SparsityProfile profile;
  RewireConfig rewire;
  LIFParams lif;
  TrainConfig train;
  DataConfig data;
  SweepConfig sweep;
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir = "runs";
  int estimate_samples = 20;

  void validate() const;
};

ExperimentConfig load_config(const std::string& path);

/// Materialize the configured dataset pair (train, test), binned.
std::pair<BinnedDataset, BinnedDataset> load_data(const DataConfig& config);

}  // namespace mosaic
