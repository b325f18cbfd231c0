#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mosaic/data.hpp"
#include "mosaic/rewire.hpp"
#include "mosaic/router.hpp"
#include "mosaic/topology.hpp"

namespace mosaic {

/// Discrete-time LIF constants; dt is one step.
struct LIFParams {
  double tau_mem = 20.0;   ///< membrane time constant, steps
  double tau_syn = 0.0;    ///< synaptic filter time constant; 0 disables it
  double tau_out = 20.0;   ///< readout integrator time constant
  double v_threshold = 1.0;
  double v_reset = 0.0;    ///< multiplicative reset scales v towards this
  int refractory = 0;      ///< steps a neuron stays silent after a spike
  double surrogate_beta = 10.0;

  void validate() const;
  double alpha() const { return std::exp(-1.0 / tau_mem); }
  double beta_syn() const { return tau_syn > 0 ? std::exp(-1.0 / tau_syn) : 0.0; }
  double kappa() const { return std::exp(-1.0 / tau_out); }
};

/// Fast-sigmoid pseudo-derivative 1 / (1 + beta * |x|)^2.
double surrogate_grad(double v_minus_threshold, double beta = 10.0);

/// Input, recurrent and readout weights. Matrices are (post, pre):
/// w_in is (neurons x channels), w_rec (neurons x neurons, masked by the
/// rewire state), w_out (classes x neurons).
struct NetworkParams {
  Eigen::MatrixXd w_in;
  Eigen::MatrixXd w_rec;
  Eigen::MatrixXd w_out;
};

struct BatchResult {
  Eigen::MatrixXd logits;        ///< classes x batch
  Eigen::VectorXd spike_counts;  ///< per neuron, summed over time and batch
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Spike nonlinearity used in the forward pass. Hard is the spiking model;
/// Soft replaces the threshold with a smooth function whose derivative is
/// exactly the surrogate, so analytic and numeric gradients agree.
enum class SpikeMode : std::uint8_t { Hard, Soft };

struct ForwardTrace {
  std::vector<Eigen::MatrixXd> spikes;    ///< per step, neurons x batch
  std::vector<Eigen::MatrixXd> voltage;   ///< membrane before the step update
  Eigen::MatrixXd logits;                 ///< classes x batch, time-summed readout
};

/// Run the network over a batch. `inputs` is time-major, each entry
/// channels x batch. Throws on non-finite activations.
ForwardTrace lif_forward(const NetworkParams& params, const LIFParams& lif,
                         const std::vector<Eigen::MatrixXd>& inputs,
                         SpikeMode mode = SpikeMode::Hard);

struct Gradients {
  Eigen::MatrixXd w_in;
  Eigen::MatrixXd w_rec;
  Eigen::MatrixXd w_out;
};

/// Cross-entropy of the time-summed readout plus the L1 term of the rewire
/// state (when given). Returns the batch-mean loss.
double batch_loss(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                  const NetworkParams& params, const RewireState* state);

/// Forward + BPTT backward over one batch. Returns loss; fills `grads` and,
/// when non-null, `result`. The L1 subgradient and gradient masking are
/// applied when `state` is non-null.
double loss_and_gradients(const NetworkParams& params, const LIFParams& lif,
                          const std::vector<Eigen::MatrixXd>& inputs,
                          const std::vector<int>& labels,
                          const RewireState* state, Gradients& grads,
                          BatchResult* result = nullptr,
                          SpikeMode mode = SpikeMode::Hard);

struct OptimizerConfig {
  std::string type = "adam";  ///< "adam" or "sgd"
  double lr = 1e-3;
  double momentum = 0.9;      ///< sgd only
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// How dataset channels attach to the fabric: "per_tile" injects each
/// channel at one NT (round-robin) and masks w_in to that tile's neurons;
/// "dense" lets every channel feed every neuron (one row per channel per NT).
enum class InputMode : std::uint8_t { PerTile, Dense };

struct TrainConfig {
  int epochs = 100;
  int batch_size = 32;
  double init_scale_rec = 0.3;
  double init_scale_in = 1.0;
  double init_scale_out = 0.1;
  OptimizerConfig optimizer;
  InputMode input_mode = InputMode::PerTile;
  bool rewire_enabled = true;
  int eval_every = 5;       ///< test-set evaluation cadence (epochs)
  int map_check_every = 10; ///< mappability check cadence (epochs)
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = -1.0;  ///< -1 when not evaluated this epoch
  std::int64_t active_connections = 0;
  std::int64_t pruned = 0;
  std::int64_t regrown = 0;
  bool profile_ok = true;   ///< per-bucket counts equal the targets
  int mappable = -1;        ///< -1 not checked, else 0/1
  std::int64_t memory_elements = -1;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  std::vector<RewireEvent> rewire_events;
  NetworkParams params;
  Mask final_mask;
  bool diverged = false;
  int profile_violations = 0;  ///< epochs where counts missed the targets
  double final_test_accuracy = 0.0;
  std::int64_t final_memory_elements = 0;
  bool final_mappable = false;
};

/// Round-robin channel -> NT assignment used by InputMode::PerTile.
std::vector<int> input_assignment(int n_channels, const GridConfig& config);

/// Input rows consumed per NT for the given mode and channel count.
std::vector<int> input_rows_per_nt(int n_channels, const GridConfig& config,
                                   InputMode mode);

/// Full training loop: per epoch, minibatch updates on masked gradients,
/// then prune/reassign, then bookkeeping (profile recount, periodic
/// mappability check). Deterministic given seed.
TrainResult train(const TileLattice& lattice, const Placement& placement,
                  const RewireConfig& rewire_config, const LIFParams& lif,
                  const TrainConfig& config, const BinnedDataset& train_data,
                  const BinnedDataset& test_data, std::uint64_t seed);

/// Forward-only evaluation on a dataset.
BatchResult evaluate(const NetworkParams& params, const LIFParams& lif,
                     const BinnedDataset& data, int batch_size = 64);

}  // namespace mosaic
