#include "mosaic/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace mosaic {

using nlohmann::json;

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void ExperimentConfig::validate() const {
  grid.validate();
  profile.validate();
  lif.validate();
  if (seeds.empty())
    throw std::invalid_argument("ExperimentConfig: seeds must be non-empty");
  if (train.epochs < 0 || train.batch_size < 1)
    throw std::invalid_argument("ExperimentConfig: bad training schedule");
  if (data.source != "synthetic" && data.source != "shd")
    throw std::invalid_argument("ExperimentConfig: data.source must be 'synthetic' or 'shd'");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }

  ExperimentConfig cfg;
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    maybe(g, "nt_rows", cfg.grid.nt_rows);
    maybe(g, "nt_cols", cfg.grid.nt_cols);
    maybe(g, "neurons_per_tile", cfg.grid.neurons_per_tile);
    maybe(g, "nt_input_size", cfg.grid.nt_input_size);
    maybe(g, "rt_size", cfg.grid.rt_size);
  }
  if (j.contains("profile")) cfg.profile.p = j.at("profile").get<std::vector<double>>();
  cfg.rewire.target = cfg.profile;

  if (j.contains("rewire")) {
    const auto& r = j.at("rewire");
    std::string mode = "profile";
    maybe(r, "mode", mode);
    cfg.rewire.mode = mode == "global" ? RewireMode::Global : RewireMode::Profile;
    maybe(r, "global_sparsity", cfg.rewire.global_sparsity);
    maybe(r, "prune_threshold", cfg.rewire.prune_threshold);
    maybe(r, "lambda_l1", cfg.rewire.lambda_l1);
    maybe(r, "allow_self", cfg.rewire.allow_self);
    maybe(r, "enabled", cfg.train.rewire_enabled);
  }
  if (j.contains("snn")) {
    const auto& s = j.at("snn");
    maybe(s, "tau_mem", cfg.lif.tau_mem);
    maybe(s, "tau_syn", cfg.lif.tau_syn);
    maybe(s, "tau_out", cfg.lif.tau_out);
    maybe(s, "v_threshold", cfg.lif.v_threshold);
    maybe(s, "v_reset", cfg.lif.v_reset);
    maybe(s, "refractory", cfg.lif.refractory);
    maybe(s, "surrogate_beta", cfg.lif.surrogate_beta);
    maybe(s, "epochs", cfg.train.epochs);
    maybe(s, "batch_size", cfg.train.batch_size);
    maybe(s, "init_scale_rec", cfg.train.init_scale_rec);
    maybe(s, "init_scale_in", cfg.train.init_scale_in);
    maybe(s, "init_scale_out", cfg.train.init_scale_out);
    maybe(s, "eval_every", cfg.train.eval_every);
    maybe(s, "map_check_every", cfg.train.map_check_every);
    std::string input_mode = "per_tile";
    maybe(s, "input_mode", input_mode);
    cfg.train.input_mode =
        input_mode == "dense" ? InputMode::Dense : InputMode::PerTile;
    maybe(s, "optimizer", cfg.train.optimizer.type);
    maybe(s, "lr", cfg.train.optimizer.lr);
    maybe(s, "momentum", cfg.train.optimizer.momentum);
  }
  if (j.contains("data")) {
    const auto& d = j.at("data");
    maybe(d, "source", cfg.data.source);
    maybe(d, "n_classes", cfg.data.n_classes);
    maybe(d, "n_channels", cfg.data.n_channels);
    maybe(d, "n_steps", cfg.data.n_steps);
    maybe(d, "duration", cfg.data.duration);
    maybe(d, "clip", cfg.data.clip);
    maybe(d, "shd_path", cfg.data.shd_path);
    maybe(d, "pool_factor", cfg.data.pool_factor);
    maybe(d, "dataset_seed", cfg.data.dataset_seed);
    maybe(d, "train_per_class", cfg.data.synthetic.n_train_per_class);
    maybe(d, "test_per_class", cfg.data.synthetic.n_test_per_class);
    maybe(d, "events_per_class", cfg.data.synthetic.events_per_class);
    maybe(d, "jitter_prob", cfg.data.synthetic.jitter_prob);
    maybe(d, "drop_prob", cfg.data.synthetic.drop_prob);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    maybe(s, "p1", cfg.sweep.p1);
    maybe(s, "p3", cfg.sweep.p3);
  }
  maybe(j, "seeds", cfg.seeds);
  maybe(j, "out", cfg.out_dir);
  maybe(j, "estimate_samples", cfg.estimate_samples);

  cfg.validate();
  return cfg;
}

std::pair<BinnedDataset, BinnedDataset> load_data(const DataConfig& config) {
  if (config.source == "synthetic") {
    SyntheticOptions opts = config.synthetic;
    opts.duration = config.duration;
    auto [train, test] = synthetic_task(config.n_classes, config.n_channels,
                                        config.n_steps, config.dataset_seed, opts);
    return {bin_spikes(train, config.n_steps, config.duration, config.clip),
            bin_spikes(test, config.n_steps, config.duration, config.clip)};
  }
  SpikeDataset train = load_shd(config.shd_path, "train");
  SpikeDataset test = load_shd(config.shd_path, "test");
  if (config.pool_factor > 1) {
    train = pool_channels(train, config.pool_factor);
    test = pool_channels(test, config.pool_factor);
  }
  return {bin_spikes(train, config.n_steps, config.duration, config.clip),
          bin_spikes(test, config.n_steps, config.duration, config.clip)};
}

}  // namespace mosaic
