#pragma once

#include <Eigen/Dense>
#include <string>
#include <tuple>
#include <vector>

#include "mosaic/mask.hpp"
#include "mosaic/profile.hpp"
#include "mosaic/router.hpp"
#include "mosaic/snn.hpp"

namespace mosaic {

/// Sparse triplet file: header line "pre post weight", then one
/// integer-indexed row per active connection.
struct Triplets {
  std::vector<std::tuple<int, int, double>> entries;

  Mask to_mask(int n) const;
  Eigen::MatrixXd to_weights(int n) const;  ///< (post, pre) dense matrix
  static Triplets from_weights(const Eigen::MatrixXd& w, const Mask& mask);
  static Triplets from_mask(const Mask& mask);
};

void write_triplets(const std::string& path, const Triplets& triplets);
Triplets read_triplets(const std::string& path);  ///< throws on malformed input

/// Profiles as JSON arrays [p_0, ..., p_dmax].
void write_profile_json(const std::string& path, const SparsityProfile& profile);
SparsityProfile read_profile_json(const std::string& path);

void write_occupancy_csv(const std::string& path, const OccupancyMap& occupancy,
                         const TileLattice& lattice);
void write_mappability_json(const std::string& path,
                            const MappabilityReport& report,
                            const TileLattice& lattice);

void write_estimate_csv(const std::string& path,
                        const std::vector<std::pair<SparsityProfile,
                                                    ResourceEstimate>>& rows);

void write_rewire_events_csv(const std::string& path,
                             const std::vector<RewireEvent>& events);

void write_training_log_csv(const std::string& path,
                            const std::vector<EpochRecord>& log);

/// Checkpoint: <base>.bin holds w_in, w_rec, w_out as raw little-endian
/// doubles (column-major, concatenated); <base>.json records shapes and
/// hyperparameters; <base>.mask.tsv is the recurrent mask as triplets.
void save_checkpoint(const std::string& base, const NetworkParams& params,
                     const Mask& mask, const std::string& hyper_json);
NetworkParams load_checkpoint(const std::string& base, Mask* mask = nullptr);

}  // namespace mosaic
