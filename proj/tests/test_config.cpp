#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "mosaic/config.hpp"

using namespace mosaic;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& content) {
  const fs::path p = fs::temp_directory_path() /
                     ("mosaic_cfg_" + std::to_string(std::random_device{}()) + ".json");
  std::ofstream out(p);
  out << content;
  return p.string();
}

}  // namespace

TEST_CASE("config parsing fills every section") {
  const std::string path = write_temp(R"({
    "grid": {"nt_rows": 4, "nt_cols": 4, "neurons_per_tile": 16,
             "nt_input_size": 128, "rt_size": 64},
    "profile": [0.3, 0.1, 0.0, 0.05],
    "rewire": {"mode": "profile", "lambda_l1": 1e-4, "prune_threshold": 0.001},
    "snn": {"tau_mem": 15, "epochs": 20, "batch_size": 16, "lr": 0.002,
            "optimizer": "adam", "input_mode": "dense"},
    "data": {"source": "synthetic", "n_classes": 6, "n_channels": 32,
             "n_steps": 25, "dataset_seed": 11},
    "sweep": {"p1": [0.05, 0.1], "p3": [0.0, 0.02]},
    "seeds": [1, 2, 3],
    "out": "runs/demo",
    "estimate_samples": 10
  })");
  const ExperimentConfig cfg = load_config(path);
  std::remove(path.c_str());
  CHECK(cfg.grid.nt_rows == 4);
  CHECK(cfg.grid.neurons_per_tile == 16);
  CHECK(cfg.profile.p == std::vector<double>{0.3, 0.1, 0.0, 0.05});
  CHECK(cfg.rewire.target.p == cfg.profile.p);
  CHECK(cfg.rewire.mode == RewireMode::Profile);
  CHECK(cfg.rewire.lambda_l1 == doctest::Approx(1e-4));
  CHECK(cfg.lif.tau_mem == 15.0);
  CHECK(cfg.train.epochs == 20);
  CHECK(cfg.train.optimizer.lr == doctest::Approx(0.002));
  CHECK(cfg.train.input_mode == InputMode::Dense);
  CHECK(cfg.data.n_classes == 6);
  CHECK(cfg.data.dataset_seed == 11);
  CHECK(cfg.sweep.p1 == std::vector<double>{0.05, 0.1});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(cfg.out_dir == "runs/demo");
  CHECK(cfg.estimate_samples == 10);
}

TEST_CASE("config defaults survive an empty object") {
  const std::string path = write_temp("{}");
  const ExperimentConfig cfg = load_config(path);
  std::remove(path.c_str());
  CHECK(cfg.grid.nt_rows == 1);
  CHECK(cfg.train.epochs == 100);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1});
  CHECK(cfg.data.source == "synthetic");
}

TEST_CASE("config errors are descriptive") {
  CHECK_THROWS_WITH_AS(load_config("/nonexistent.json"),
                       doctest::Contains("cannot open"), std::runtime_error);
  const std::string bad = write_temp("{not json");
  CHECK_THROWS_WITH_AS(load_config(bad), doctest::Contains("parse error"),
                       std::runtime_error);
  std::remove(bad.c_str());
  const std::string invalid = write_temp(R"({"grid": {"nt_rows": 0}})");
  CHECK_THROWS_AS(load_config(invalid), std::invalid_argument);
  std::remove(invalid.c_str());
  const std::string badsrc = write_temp(R"({"data": {"source": "imagenet"}})");
  CHECK_THROWS_AS(load_config(badsrc), std::invalid_argument);
  std::remove(badsrc.c_str());
}

TEST_CASE("synthetic data loads binned splits") {
  DataConfig dc;
  dc.n_classes = 3;
  dc.n_channels = 12;
  dc.n_steps = 10;
  dc.synthetic.n_train_per_class = 4;
  dc.synthetic.n_test_per_class = 2;
  dc.synthetic.events_per_class = 15;
  auto [train, test] = load_data(dc);
  CHECK(train.size() == 12);
  CHECK(test.size() == 6);
  CHECK(train.n_channels == 12);
  CHECK(train.n_steps == 10);
  CHECK(train.n_classes == 3);
}
