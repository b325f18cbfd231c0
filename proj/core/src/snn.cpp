#include "mosaic/snn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mosaic/profile.hpp"
#include "mosaic/rng.hpp"

namespace mosaic {

void LIFParams::validate() const {
  if (!(tau_mem > 0.0)) throw std::invalid_argument("LIFParams: tau_mem > 0");
  if (tau_syn < 0.0) throw std::invalid_argument("LIFParams: tau_syn >= 0");
  if (!(tau_out > 0.0)) throw std::invalid_argument("LIFParams: tau_out > 0");
  if (!(v_threshold > v_reset))
    throw std::invalid_argument("LIFParams: v_threshold must exceed v_reset");
  if (refractory < 0) throw std::invalid_argument("LIFParams: refractory >= 0");
}

double surrogate_grad(double v_minus_threshold, double beta) {
  const double denom = 1.0 + beta * std::abs(v_minus_threshold);
  return 1.0 / (denom * denom);
}

namespace {

// Smooth stand-in for the Heaviside whose derivative is exactly the
// fast-sigmoid pseudo-derivative; used by SpikeMode::Soft.
double soft_spike(double y, double beta) {
  return 0.5 + y / (1.0 + beta * std::abs(y));
}

Eigen::MatrixXd spike_fn(const Eigen::MatrixXd& v, const LIFParams& lif,
                         SpikeMode mode) {
  const double vth = lif.v_threshold;
  if (mode == SpikeMode::Hard)
    return (v.array() >= vth).cast<double>().matrix();
  const double beta = lif.surrogate_beta;
  return v.unaryExpr([&](double x) { return soft_spike(x - vth, beta); });
}

Eigen::MatrixXd surrogate_matrix(const Eigen::MatrixXd& v, const LIFParams& lif) {
  const double vth = lif.v_threshold, beta = lif.surrogate_beta;
  return v.unaryExpr([&](double x) { return surrogate_grad(x - vth, beta); });
}

struct ForwardDetail {
  ForwardTrace trace;
  std::vector<Eigen::MatrixXd> gates;  // only filled when refractory > 0
};

ForwardDetail run_forward(const NetworkParams& params, const LIFParams& lif,
                          const std::vector<Eigen::MatrixXd>& inputs,
                          SpikeMode mode) {
  lif.validate();
  if (inputs.empty()) throw std::invalid_argument("lif_forward: empty input");
  const int n = static_cast<int>(params.w_rec.rows());
  const int batch = static_cast<int>(inputs[0].cols());
  const int classes = static_cast<int>(params.w_out.rows());
  const auto steps = inputs.size();

  const double alpha = lif.alpha();
  const double beta_s = lif.beta_syn();
  const double kappa = lif.kappa();
  const bool refrac = lif.refractory > 0 && mode == SpikeMode::Hard;

  ForwardDetail out;
  out.trace.spikes.reserve(steps);
  out.trace.voltage.reserve(steps);

  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, batch);
  Eigen::MatrixXd i_syn = Eigen::MatrixXd::Zero(n, batch);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(classes, batch);
  Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(classes, batch);
  Eigen::MatrixXd refrac_count;
  if (refrac) refrac_count = Eigen::MatrixXd::Zero(n, batch);

  for (std::size_t t = 0; t < steps; ++t) {
    Eigen::MatrixXd s = spike_fn(v, lif, mode);
    if (refrac) {
      Eigen::MatrixXd gate =
          (refrac_count.array() <= 0.0).cast<double>().matrix();
      s = s.cwiseProduct(gate);
      refrac_count = (refrac_count.array() - 1.0).max(0.0).matrix() +
                     s * static_cast<double>(lif.refractory);
      out.gates.push_back(std::move(gate));
    }
    out.trace.voltage.push_back(v);
    out.trace.spikes.push_back(s);

    Eigen::MatrixXd current = params.w_in * inputs[t] + params.w_rec * s;
    const Eigen::MatrixXd* drive = &current;
    if (beta_s > 0.0) {
      i_syn = beta_s * i_syn + (1.0 - beta_s) * current;
      drive = &i_syn;
    }
    // Multiplicative reset: a spiking neuron restarts from v_reset.
    v = alpha * v.cwiseProduct(Eigen::MatrixXd::Ones(n, batch) - s) +
        lif.v_reset * s + (1.0 - alpha) * (*drive);

    r = kappa * r + (1.0 - kappa) * (params.w_out * s);
    logits += r;
  }
  if (!logits.allFinite())
    throw std::runtime_error("lif_forward: non-finite readout after " +
                             std::to_string(steps) + " steps");
  out.trace.logits = std::move(logits);
  return out;
}

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = logits;
  for (int c = 0; c < p.cols(); ++c) {
    const double m = p.col(c).maxCoeff();
    p.col(c) = (p.col(c).array() - m).exp();
    p.col(c) /= p.col(c).sum();
  }
  return p;
}

double cross_entropy(const Eigen::MatrixXd& logits, const std::vector<int>& labels) {
  const Eigen::MatrixXd p = softmax_columns(logits);
  double loss = 0.0;
  for (std::size_t b = 0; b < labels.size(); ++b)
    loss -= std::log(std::max(p(labels[b], static_cast<int>(b)), 1e-300));
  return loss / static_cast<double>(labels.size());
}

double accuracy_of(const Eigen::MatrixXd& logits, const std::vector<int>& labels) {
  int correct = 0;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    int arg = 0;
    logits.col(static_cast<int>(b)).maxCoeff(&arg);
    if (arg == labels[b]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace

ForwardTrace lif_forward(const NetworkParams& params, const LIFParams& lif,
                         const std::vector<Eigen::MatrixXd>& inputs,
                         SpikeMode mode) {
  return run_forward(params, lif, inputs, mode).trace;
}

double batch_loss(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                  const NetworkParams& params, const RewireState* state) {
  double loss = cross_entropy(logits, labels);
  if (state) loss += state->l1_term(params.w_rec);
  return loss;
}

double loss_and_gradients(const NetworkParams& params, const LIFParams& lif,
                          const std::vector<Eigen::MatrixXd>& inputs,
                          const std::vector<int>& labels,
                          const RewireState* state, Gradients& grads,
                          BatchResult* result, SpikeMode mode) {
  const ForwardDetail fwd = run_forward(params, lif, inputs, mode);
  const auto steps = inputs.size();
  const int n = static_cast<int>(params.w_rec.rows());
  const int batch = static_cast<int>(inputs[0].cols());
  const double inv_batch = 1.0 / static_cast<double>(batch);

  const double alpha = lif.alpha();
  const double beta_s = lif.beta_syn();
  const double kappa = lif.kappa();
  const bool refrac = !fwd.gates.empty();

  grads.w_in = Eigen::MatrixXd::Zero(params.w_in.rows(), params.w_in.cols());
  grads.w_rec = Eigen::MatrixXd::Zero(n, n);
  grads.w_out = Eigen::MatrixXd::Zero(params.w_out.rows(), params.w_out.cols());

  Eigen::MatrixXd glogits = softmax_columns(fwd.trace.logits);
  for (std::size_t b = 0; b < labels.size(); ++b)
    glogits(labels[b], static_cast<int>(b)) -= 1.0;
  glogits *= inv_batch;

  Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(n, batch);
  Eigen::MatrixXd di = Eigen::MatrixXd::Zero(n, batch);
  Eigen::MatrixXd dr = Eigen::MatrixXd::Zero(params.w_out.rows(), batch);

  for (std::size_t ti = steps; ti-- > 0;) {
    const Eigen::MatrixXd& s = fwd.trace.spikes[ti];
    const Eigen::MatrixXd& v = fwd.trace.voltage[ti];

    dr = glogits + kappa * dr;  // gradient w.r.t. the readout after step ti

    grads.w_out.noalias() += (1.0 - kappa) * dr * s.transpose();
    Eigen::MatrixXd ds = (1.0 - kappa) * params.w_out.transpose() * dr;

    Eigen::MatrixXd dcur;
    if (beta_s > 0.0) {
      di = (1.0 - alpha) * dv + beta_s * di;
      dcur = (1.0 - beta_s) * di;
    } else {
      dcur = (1.0 - alpha) * dv;
    }
    ds.noalias() += params.w_rec.transpose() * dcur;
    // Reset path: dv[t+1]/ds[t] = v_reset - alpha * v[t].
    ds += (lif.v_reset - (alpha * v).array()).matrix().cwiseProduct(dv);

    grads.w_rec.noalias() += dcur * s.transpose();
    grads.w_in.noalias() += dcur * inputs[ti].transpose();

    Eigen::MatrixXd psi = surrogate_matrix(v, lif);
    if (refrac) psi = psi.cwiseProduct(fwd.gates[ti]);
    dv = alpha * (Eigen::MatrixXd::Ones(n, batch) - s).cwiseProduct(dv) +
         psi.cwiseProduct(ds);
  }

  double loss = cross_entropy(fwd.trace.logits, labels);
  if (state) {
    loss += state->l1_term(params.w_rec);
    state->add_l1_subgradient(params.w_rec, grads.w_rec);
    state->apply_mask(grads.w_rec);
  }

  if (result) {
    result->logits = fwd.trace.logits;
    result->loss = loss;
    result->accuracy = accuracy_of(fwd.trace.logits, labels);
    result->spike_counts = Eigen::VectorXd::Zero(n);
    for (const auto& sp : fwd.trace.spikes) result->spike_counts += sp.rowwise().sum();
  }
  return loss;
}

std::vector<int> input_assignment(int n_channels, const GridConfig& config) {
  std::vector<int> assign(static_cast<std::size_t>(n_channels));
  for (int c = 0; c < n_channels; ++c) assign[static_cast<std::size_t>(c)] = c % config.nt_count();
  return assign;
}

std::vector<int> input_rows_per_nt(int n_channels, const GridConfig& config,
                                   InputMode mode) {
  std::vector<int> rows(static_cast<std::size_t>(config.nt_count()), 0);
  if (mode == InputMode::Dense) {
    std::fill(rows.begin(), rows.end(), n_channels);
    return rows;
  }
  for (int c : input_assignment(n_channels, config)) ++rows[static_cast<std::size_t>(c)];
  return rows;
}

namespace {

struct Adam {
  Eigen::MatrixXd m, v;
  int t = 0;
  void init(const Eigen::MatrixXd& shape_like) {
    m = Eigen::MatrixXd::Zero(shape_like.rows(), shape_like.cols());
    v = Eigen::MatrixXd::Zero(shape_like.rows(), shape_like.cols());
  }
  void step(Eigen::MatrixXd& w, const Eigen::MatrixXd& g,
            const OptimizerConfig& cfg) {
    ++t;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    w -= (cfg.lr / bc1) *
         (m.array() / ((v.array() / bc2).sqrt() + cfg.eps)).matrix();
  }
};

struct Sgd {
  Eigen::MatrixXd vel;
  void init(const Eigen::MatrixXd& shape_like) {
    vel = Eigen::MatrixXd::Zero(shape_like.rows(), shape_like.cols());
  }
  void step(Eigen::MatrixXd& w, const Eigen::MatrixXd& g,
            const OptimizerConfig& cfg) {
    vel = cfg.momentum * vel + g;
    w -= cfg.lr * vel;
  }
};

void make_batch(const BinnedDataset& data, const std::vector<int>& indices,
                std::size_t begin, std::size_t end,
                std::vector<Eigen::MatrixXd>& x, std::vector<int>& labels) {
  const auto batch = end - begin;
  x.assign(static_cast<std::size_t>(data.n_steps),
           Eigen::MatrixXd::Zero(data.n_channels, static_cast<int>(batch)));
  labels.resize(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const int idx = indices[begin + b];
    labels[b] = data.labels[static_cast<std::size_t>(idx)];
    const Eigen::MatrixXd& sample = data.x[static_cast<std::size_t>(idx)];
    for (int t = 0; t < data.n_steps; ++t)
      x[static_cast<std::size_t>(t)].col(static_cast<int>(b)) = sample.col(t);
  }
}

}  // namespace

BatchResult evaluate(const NetworkParams& params, const LIFParams& lif,
                     const BinnedDataset& data, int batch_size) {
  const int n = static_cast<int>(params.w_rec.rows());
  BatchResult total;
  total.logits = Eigen::MatrixXd::Zero(params.w_out.rows(), data.size());
  total.spike_counts = Eigen::VectorXd::Zero(n);
  std::vector<int> indices(static_cast<std::size_t>(data.size()));
  std::iota(indices.begin(), indices.end(), 0);
  double loss_sum = 0.0;
  int correct = 0;
  std::vector<Eigen::MatrixXd> x;
  std::vector<int> labels;
  for (std::size_t begin = 0; begin < indices.size();
       begin += static_cast<std::size_t>(batch_size)) {
    const auto end =
        std::min(indices.size(), begin + static_cast<std::size_t>(batch_size));
    make_batch(data, indices, begin, end, x, labels);
    const ForwardTrace trace = lif_forward(params, lif, x);
    for (std::size_t b = 0; b < labels.size(); ++b) {
      total.logits.col(static_cast<int>(begin + b)) = trace.logits.col(static_cast<int>(b));
      int arg = 0;
      trace.logits.col(static_cast<int>(b)).maxCoeff(&arg);
      if (arg == labels[b]) ++correct;
    }
    loss_sum += cross_entropy(trace.logits, labels) * static_cast<double>(labels.size());
    for (const auto& sp : trace.spikes) total.spike_counts += sp.rowwise().sum();
  }
  total.loss = loss_sum / static_cast<double>(data.size());
  total.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return total;
}

TrainResult train(const TileLattice& lattice, const Placement& placement,
                  const RewireConfig& rewire_config, const LIFParams& lif,
                  const TrainConfig& config, const BinnedDataset& train_data,
                  const BinnedDataset& test_data, std::uint64_t seed) {
  lif.validate();
  const GridConfig& grid = lattice.config();
  const int n = grid.total_neurons();
  const int n_channels = train_data.n_channels;
  const int n_classes = train_data.n_classes;

  RewireState state(rewire_config, placement, lattice);

  TrainResult result;
  result.params.w_rec = state.init_weights(config.init_scale_rec,
                                           derive_seed(seed, 1));

  // Input weights: per-tile mode masks each channel to its assigned NT.
  Rng rng(derive_seed(seed, 2));
  std::normal_distribution<double> in_dist(0.0, config.init_scale_in);
  std::normal_distribution<double> out_dist(0.0, config.init_scale_out);
  Eigen::MatrixXd in_mask = Eigen::MatrixXd::Ones(n, n_channels);
  if (config.input_mode == InputMode::PerTile) {
    in_mask.setZero();
    const auto assign = input_assignment(n_channels, grid);
    for (int c = 0; c < n_channels; ++c)
      for (int neuron = 0; neuron < n; ++neuron)
        if (placement.tile_of(neuron) == assign[static_cast<std::size_t>(c)])
          in_mask(neuron, c) = 1.0;
  }
  result.params.w_in = Eigen::MatrixXd::Zero(n, n_channels);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n_channels; ++c)
      if (in_mask(i, c) != 0.0) result.params.w_in(i, c) = in_dist(rng);
  result.params.w_out = Eigen::MatrixXd::Zero(n_classes, n);
  for (int k = 0; k < n_classes; ++k)
    for (int i = 0; i < n; ++i) result.params.w_out(k, i) = out_dist(rng);

  const auto input_rows = input_rows_per_nt(n_channels, grid, config.input_mode);

  const bool use_adam = config.optimizer.type != "sgd";
  Adam adam_in, adam_rec, adam_out;
  Sgd sgd_in, sgd_rec, sgd_out;
  if (use_adam) {
    adam_in.init(result.params.w_in);
    adam_rec.init(result.params.w_rec);
    adam_out.init(result.params.w_out);
  } else {
    sgd_in.init(result.params.w_in);
    sgd_rec.init(result.params.w_rec);
    sgd_out.init(result.params.w_out);
  }

  auto check_profile = [&]() {
    const Mask mask = state.mask();
    const auto counts = bucket_counts(mask, placement, lattice);
    bool ok = true;
    if (state.mode() == RewireMode::Profile) {
      for (std::size_t d = 0; d < counts.size(); ++d)
        if (counts[d] != state.target(static_cast<int>(d))) ok = false;
    } else {
      ok = state.total_active() == state.target(0) &&
           std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) ==
               state.target(0);
    }
    // Mask/weight consistency: nonzero weight implies active.
    for (int pre = 0; pre < n && ok; ++pre)
      for (int post = 0; post < n; ++post)
        if (result.params.w_rec(post, pre) != 0.0 && !mask.at(pre, post)) {
          ok = false;
          break;
        }
    return ok;
  };

  auto map_check = [&](EpochRecord& rec) {
    const OccupancyMap occ =
        compute_occupancy(state.mask(), placement, lattice, input_rows);
    const MappabilityReport rep = check_mappable(occ, lattice);
    rec.mappable = rep.mappable ? 1 : 0;
    rec.memory_elements = memory_element_count(occ, grid);
  };

  if (config.epochs == 0) {
    EpochRecord rec;
    rec.epoch = 0;
    const BatchResult ev = evaluate(result.params, lif, test_data);
    rec.test_accuracy = ev.accuracy;
    rec.active_connections = state.total_active();
    map_check(rec);
    result.log.push_back(rec);
    result.final_test_accuracy = ev.accuracy;
    result.final_mask = state.mask();
    result.final_mappable = rec.mappable == 1;
    result.final_memory_elements = rec.memory_elements;
    return result;
  }

  std::vector<int> order(static_cast<std::size_t>(train_data.size()));
  std::iota(order.begin(), order.end(), 0);
  Gradients grads;
  std::vector<Eigen::MatrixXd> x;
  std::vector<int> labels;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    double acc_sum = 0.0;
    int batches = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(config.batch_size)) {
      const auto end = std::min(order.size(),
                                begin + static_cast<std::size_t>(config.batch_size));
      make_batch(train_data, order, begin, end, x, labels);
      BatchResult br;
      double loss;
      try {
        loss = loss_and_gradients(result.params, lif, x, labels, &state, grads, &br);
      } catch (const std::runtime_error&) {
        result.diverged = true;
        break;
      }
      if (!std::isfinite(loss)) {
        result.diverged = true;
        break;
      }
      loss_sum += loss;
      acc_sum += br.accuracy;
      ++batches;

      if (config.input_mode == InputMode::PerTile)
        grads.w_in = grads.w_in.cwiseProduct(in_mask);
      if (use_adam) {
        adam_in.step(result.params.w_in, grads.w_in, config.optimizer);
        adam_rec.step(result.params.w_rec, grads.w_rec, config.optimizer);
        adam_out.step(result.params.w_out, grads.w_out, config.optimizer);
      } else {
        sgd_in.step(result.params.w_in, grads.w_in, config.optimizer);
        sgd_rec.step(result.params.w_rec, grads.w_rec, config.optimizer);
        sgd_out.step(result.params.w_out, grads.w_out, config.optimizer);
      }
      // Inactive recurrent entries stay exactly zero between reassignments.
      state.apply_mask(result.params.w_rec);
      if (use_adam) {
        state.apply_mask(adam_rec.m);
        state.apply_mask(adam_rec.v);
      } else {
        state.apply_mask(sgd_rec.vel);
      }
    }
    if (result.diverged) break;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = batches > 0 ? loss_sum / batches : 0.0;
    rec.train_accuracy = batches > 0 ? acc_sum / batches : 0.0;

    if (config.rewire_enabled) {
      RewireEvent event = state.rewire_epoch(
          result.params.w_rec, epoch,
          derive_seed(seed, 2000 + static_cast<std::uint64_t>(epoch)));
      rec.pruned = event.total_pruned();
      rec.regrown = std::accumulate(event.regrown.begin(), event.regrown.end(),
                                    std::int64_t{0});
      if (use_adam) {
        state.apply_mask(adam_rec.m);
        state.apply_mask(adam_rec.v);
      } else {
        state.apply_mask(sgd_rec.vel);
      }
      result.rewire_events.push_back(std::move(event));
    }
    rec.active_connections = state.total_active();
    rec.profile_ok = check_profile();
    if (!rec.profile_ok) ++result.profile_violations;

    if (epoch % config.eval_every == 0 || epoch == config.epochs) {
      const BatchResult ev = evaluate(result.params, lif, test_data);
      rec.test_accuracy = ev.accuracy;
    }
    if (epoch % config.map_check_every == 0 || epoch == config.epochs)
      map_check(rec);
    result.log.push_back(rec);
  }

  result.final_mask = state.mask();
  if (!result.log.empty()) {
    const EpochRecord& last = result.log.back();
    result.final_test_accuracy = last.test_accuracy;
    result.final_mappable = last.mappable == 1;
    result.final_memory_elements = last.memory_elements;
  }
  if (result.diverged) {
    const BatchResult ev = evaluate(result.params, lif, test_data);
    result.final_test_accuracy = ev.accuracy;
  }
  return result;
}

}  // namespace mosaic
