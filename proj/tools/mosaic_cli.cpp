// Command-line harness: map / estimate / train / sweep / report.

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "mosaic/config.hpp"
#include "mosaic/io.hpp"
#include "mosaic/profile.hpp"
#include "mosaic/rng.hpp"
#include "mosaic/router.hpp"
#include "mosaic/snn.hpp"

namespace fs = std::filesystem;
using namespace mosaic;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string mode;  // "", "profile", "global", "l1-baseline"
  std::vector<std::uint64_t> seeds;
  int workers = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
  auto* c = cmd->add_option("--config", opts.config_path, "experiment config (JSON)");
  if (config_required) c->required();
  cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
  cmd->add_option("--workers", opts.workers, "worker pool size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mode", opts.mode, "training mode")
      ->check(CLI::IsMember({"profile", "global", "l1-baseline"}));
  auto* seed = cmd->add_option_function<std::uint64_t>(
      "--seed", [&opts](std::uint64_t s) { opts.seeds = {s}; }, "single seed");
  cmd->add_option_function<std::string>(
         "--seeds",
         [&opts](const std::string& range) {
           const auto sep = range.find("..");
           if (sep == std::string::npos)
             throw CLI::ValidationError("--seeds expects N..M");
           const std::uint64_t lo = std::stoull(range.substr(0, sep));
           const std::uint64_t hi = std::stoull(range.substr(sep + 2));
           if (hi < lo) throw CLI::ValidationError("--seeds expects N <= M");
           opts.seeds.clear();
           for (std::uint64_t s = lo; s <= hi; ++s) opts.seeds.push_back(s);
         },
         "seed range N..M (inclusive)")
      ->excludes(seed);
}

ExperimentConfig load_effective(const CommonOpts& opts) {
  ExperimentConfig cfg = load_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (!opts.seeds.empty()) cfg.seeds = opts.seeds;
  if (opts.mode == "global" || opts.mode == "l1-baseline") {
    cfg.rewire.mode = RewireMode::Global;
    if (opts.mode == "l1-baseline") cfg.train.rewire_enabled = false;
  } else if (opts.mode == "profile") {
    cfg.rewire.mode = RewireMode::Profile;
  }
  return cfg;
}

std::string run_tag(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::ostringstream tag;
  tag << (cfg.rewire.mode == RewireMode::Profile
              ? (cfg.train.rewire_enabled ? "profile" : "profile-frozen")
              : (cfg.train.rewire_enabled ? "global" : "l1-baseline"))
      << "_seed" << seed;
  return tag.str();
}

std::string hyper_json(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::ostringstream out;
  out << "{\"seed\": " << seed << ", \"epochs\": " << cfg.train.epochs
      << ", \"batch_size\": " << cfg.train.batch_size
      << ", \"lr\": " << cfg.train.optimizer.lr
      << ", \"optimizer\": \"" << cfg.train.optimizer.type
      << "\", \"tau_mem\": " << cfg.lif.tau_mem
      << ", \"lambda_l1\": " << cfg.rewire.lambda_l1 << "}";
  return out.str();
}

// ---- map ------------------------------------------------------------------

int cmd_map(const CommonOpts& opts, const std::string& mask_path) {
  const ExperimentConfig cfg = load_effective(opts);
  const TileLattice lattice(cfg.grid);
  const Placement placement = Placement::blocked(cfg.grid);
  const int n = cfg.grid.total_neurons();

  Mask mask(n, n);
  if (!mask_path.empty()) {
    mask = read_triplets(mask_path).to_mask(n);
  } else {
    mask = sample_mask_with_profile(cfg.profile, placement, lattice,
                                    cfg.seeds.front(), cfg.rewire.allow_self);
  }

  const auto input_rows =
      input_rows_per_nt(cfg.data.n_channels, cfg.grid, cfg.train.input_mode);
  const OccupancyMap occ =
      compute_occupancy(mask, placement, lattice, input_rows);
  const MappabilityReport report = check_mappable(occ, lattice);

  fs::create_directories(cfg.out_dir);
  write_occupancy_csv((fs::path(cfg.out_dir) / "occupancy.csv").string(), occ,
                      lattice);
  write_mappability_json((fs::path(cfg.out_dir) / "mappability.json").string(),
                         report, lattice);

  std::cout << (report.mappable ? "mappable" : "NOT mappable")
            << "  peak_nt_fanin=" << report.peak_nt_fanin << "/"
            << cfg.grid.nt_input_size << "  peak_rt_load=" << report.peak_rt_load
            << "/" << cfg.grid.rt_size
            << "  memory_elements=" << memory_element_count(occ, cfg.grid)
            << '\n';
  for (const auto& v : report.violations)
    std::cout << "violation: " << to_string(v.tile.kind) << " (" << v.tile.x
              << "," << v.tile.y << ") requires " << v.required << " > capacity "
              << v.capacity << '\n';
  return report.mappable ? 0 : 1;
}

// ---- estimate -------------------------------------------------------------

SparsityProfile sweep_profile(const ExperimentConfig& cfg, double p1, double p3) {
  const TileLattice lattice(cfg.grid);
  SparsityProfile p;
  p.p.assign(static_cast<std::size_t>(lattice.max_hop_distance() + 1), 0.0);
  p.p[0] = cfg.profile.at(0);
  if (p.p.size() > 1) p.p[1] = p1;
  if (p.p.size() > 3) p.p[3] = p3;
  return p;
}

std::vector<SparsityProfile> profiles_to_run(const ExperimentConfig& cfg) {
  std::vector<SparsityProfile> out;
  if (cfg.sweep.p1.empty() && cfg.sweep.p3.empty()) {
    out.push_back(cfg.profile);
    return out;
  }
  const std::vector<double> p1 = cfg.sweep.p1.empty() ? std::vector<double>{0.0}
                                                      : cfg.sweep.p1;
  const std::vector<double> p3 = cfg.sweep.p3.empty() ? std::vector<double>{0.0}
                                                      : cfg.sweep.p3;
  for (double a : p1)
    for (double b : p3) out.push_back(sweep_profile(cfg, a, b));
  return out;
}

int cmd_estimate(const CommonOpts& opts) {
  const ExperimentConfig cfg = load_effective(opts);
  const TileLattice lattice(cfg.grid);
  const Placement placement = Placement::blocked(cfg.grid);

  std::vector<std::pair<SparsityProfile, ResourceEstimate>> rows;
  for (const SparsityProfile& profile : profiles_to_run(cfg)) {
    rows.emplace_back(profile, estimate_required_resources(
                                   profile, placement, lattice,
                                   cfg.estimate_samples, cfg.seeds.front(),
                                   cfg.rewire.allow_self));
  }
  fs::create_directories(cfg.out_dir);
  const std::string path = (fs::path(cfg.out_dir) / "estimate.csv").string();
  write_estimate_csv(path, rows);
  std::cout << "wrote " << path << " (" << rows.size() << " profiles, "
            << cfg.estimate_samples << " samples each)\n";
  return 0;
}

// ---- train ----------------------------------------------------------------

struct SeedOutcome {
  std::uint64_t seed = 0;
  TrainResult result;
};

SeedOutcome run_one_seed(const ExperimentConfig& cfg,
                         const BinnedDataset& train_data,
                         const BinnedDataset& test_data, std::uint64_t seed,
                         const fs::path& out_dir) {
  const TileLattice lattice(cfg.grid);
  const Placement placement = Placement::blocked(cfg.grid);
  SeedOutcome outcome;
  outcome.seed = seed;
  outcome.result = train(lattice, placement, cfg.rewire, cfg.lif, cfg.train,
                         train_data, test_data, seed);

  const std::string tag = run_tag(cfg, seed);
  const fs::path dir = out_dir / tag;
  fs::create_directories(dir);
  write_training_log_csv((dir / "training_log.csv").string(),
                         outcome.result.log);
  write_rewire_events_csv((dir / "rewire_events.csv").string(),
                          outcome.result.rewire_events);
  save_checkpoint((dir / "final").string(), outcome.result.params,
                  outcome.result.final_mask, hyper_json(cfg, seed));
  write_triplets((dir / "final_mask.tsv").string(),
                 Triplets::from_weights(outcome.result.params.w_rec,
                                        outcome.result.final_mask));
  const auto input_rows =
      input_rows_per_nt(train_data.n_channels, cfg.grid, cfg.train.input_mode);
  const MappabilityReport rep = check_mappable(
      outcome.result.final_mask, placement, lattice, input_rows);
  write_mappability_json((dir / "mappability.json").string(), rep, lattice);
  return outcome;
}

int cmd_train(const CommonOpts& opts) {
  const ExperimentConfig cfg = load_effective(opts);
  const auto [train_data, test_data] = load_data(cfg.data);
  fs::create_directories(cfg.out_dir);

  bool any_diverged = false;
  for (std::uint64_t seed : cfg.seeds) {
    const SeedOutcome outcome =
        run_one_seed(cfg, train_data, test_data, seed, cfg.out_dir);
    std::cout << run_tag(cfg, seed) << ": test_accuracy="
              << outcome.result.final_test_accuracy
              << " memory_elements=" << outcome.result.final_memory_elements
              << " mappable=" << (outcome.result.final_mappable ? "yes" : "no")
              << (outcome.result.diverged ? " DIVERGED" : "") << '\n';
    if (outcome.result.diverged) any_diverged = true;
  }
  return any_diverged ? 2 : 0;
}

// ---- sweep ----------------------------------------------------------------

struct SweepJob {
  double p1 = 0.0;
  double p3 = 0.0;
  std::uint64_t seed = 0;
};

int cmd_sweep(const CommonOpts& opts) {
  const ExperimentConfig base = load_effective(opts);
  const auto [train_data, test_data] = load_data(base.data);

  const std::vector<double> p1 =
      base.sweep.p1.empty() ? std::vector<double>{base.profile.at(1)}
                            : base.sweep.p1;
  const std::vector<double> p3 =
      base.sweep.p3.empty() ? std::vector<double>{base.profile.at(3)}
                            : base.sweep.p3;

  std::vector<SweepJob> jobs;
  for (double a : p1)
    for (double b : p3)
      for (std::uint64_t s : base.seeds) jobs.push_back({a, b, s});

  std::vector<SeedOutcome> outcomes(jobs.size());
  std::vector<ExperimentConfig> job_cfgs(jobs.size(), base);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    job_cfgs[i].profile = sweep_profile(base, jobs[i].p1, jobs[i].p3);
    job_cfgs[i].rewire.target = job_cfgs[i].profile;
  }

  fs::create_directories(base.out_dir);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      std::ostringstream cell;
      cell << "p1_" << jobs[i].p1 << "_p3_" << jobs[i].p3;
      const fs::path dir = fs::path(base.out_dir) / cell.str();
      outcomes[i] = run_one_seed(job_cfgs[i], train_data, test_data,
                                 jobs[i].seed, dir);
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cout << cell.str() << " seed " << jobs[i].seed << ": accuracy="
                << outcomes[i].result.final_test_accuracy << '\n';
    }
  };
  const int n_workers =
      std::max(1, std::min<int>(opts.workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Deterministic merge: jobs are already ordered by (p1, p3, seed).
  const std::string summary = (fs::path(base.out_dir) / "sweep.csv").string();
  std::ofstream out(summary);
  if (!out) throw std::runtime_error("cannot open for writing: " + summary);
  out << std::setprecision(17)
      << "p1,p3,seed,test_accuracy,memory_elements,mappable,diverged\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const TrainResult& r = outcomes[i].result;
    out << jobs[i].p1 << ',' << jobs[i].p3 << ',' << jobs[i].seed << ','
        << r.final_test_accuracy << ',' << r.final_memory_elements << ','
        << (r.final_mappable ? 1 : 0) << ',' << (r.diverged ? 1 : 0) << '\n';
  }
  out.close();

  // Per-cell aggregate alongside the raw rows.
  const std::string cells = (fs::path(base.out_dir) / "sweep_cells.csv").string();
  std::ofstream cout_file(cells);
  cout_file << std::setprecision(17)
            << "p1,p3,n_seeds,accuracy_mean,accuracy_std,memory_mean\n";
  for (double a : p1)
    for (double b : p3) {
      double sum = 0, sum2 = 0, mem = 0;
      int count = 0;
      for (std::size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].p1 == a && jobs[i].p3 == b) {
          const double acc = outcomes[i].result.final_test_accuracy;
          sum += acc;
          sum2 += acc * acc;
          mem += static_cast<double>(outcomes[i].result.final_memory_elements);
          ++count;
        }
      const double mean = sum / count;
      const double var = std::max(0.0, sum2 / count - mean * mean);
      cout_file << a << ',' << b << ',' << count << ',' << mean << ','
                << std::sqrt(var) << ',' << mem / count << '\n';
    }
  std::cout << "wrote " << summary << " and " << cells << '\n';
  bool any_diverged = false;
  for (const auto& o : outcomes) any_diverged |= o.result.diverged;
  return any_diverged ? 2 : 0;
}

// ---- report ---------------------------------------------------------------

struct RunSummary {
  std::string mode;
  double accuracy = 0.0;
  std::int64_t memory = 0;
};

RunSummary read_run(const fs::path& dir) {
  const fs::path log = dir / "training_log.csv";
  if (!fs::exists(log))
    throw std::runtime_error("missing training log: " + log.string());
  std::ifstream in(log);
  std::string line, last;
  std::getline(in, line);  // header
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  if (last.empty())
    throw std::runtime_error("empty training log: " + log.string());
  RunSummary summary;
  std::istringstream ss(last);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  // columns: epoch,train_loss,train_accuracy,test_accuracy,active,...,memory
  summary.accuracy = std::stod(fields.at(3));
  summary.memory = std::stoll(fields.at(9));
  const std::string name = dir.filename().string();
  summary.mode = name.substr(0, name.find("_seed"));
  return summary;
}

int cmd_report(const CommonOpts& opts, const std::vector<std::string>& runs) {
  std::vector<std::string> missing;
  std::vector<RunSummary> summaries;
  for (const std::string& r : runs) {
    if (!fs::exists(fs::path(r) / "training_log.csv")) {
      missing.push_back(r);
      continue;
    }
    summaries.push_back(read_run(r));
  }
  if (!missing.empty()) {
    std::cerr << "missing training logs in:\n";
    for (const auto& m : missing) std::cerr << "  " << m << '\n';
    return 1;
  }
  if (summaries.empty()) {
    std::cerr << "no runs given\n";
    return 1;
  }

  // Group by (mode, memory), report accuracy mean/std.
  std::map<std::pair<std::string, std::int64_t>, std::vector<double>> groups;
  for (const auto& s : summaries) groups[{s.mode, s.memory}].push_back(s.accuracy);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    file.open((fs::path(opts.out_dir) / "report.csv").string());
    out = &file;
  }
  *out << "mode,memory_elements,n_runs,accuracy_mean,accuracy_std\n";
  for (const auto& [key, accs] : groups) {
    double sum = 0, sum2 = 0;
    for (double a : accs) {
      sum += a;
      sum2 += a * a;
    }
    const double mean = sum / static_cast<double>(accs.size());
    const double var =
        std::max(0.0, sum2 / static_cast<double>(accs.size()) - mean * mean);
    *out << key.first << ',' << key.second << ',' << accs.size() << ',' << mean
         << ',' << std::sqrt(var) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tiled-fabric sparsity toolkit"};
  app.require_subcommand(1);

  CommonOpts map_opts, est_opts, train_opts, sweep_opts, report_opts;
  std::string mask_path;
  std::vector<std::string> report_runs;

  auto* map_cmd = app.add_subcommand("map", "route a mask and check mappability");
  add_common(map_cmd, map_opts);
  map_cmd->add_option("--mask", mask_path, "mask triplet file (defaults to a profile sample)");

  auto* est_cmd = app.add_subcommand("estimate", "Monte-Carlo resource estimate");
  add_common(est_cmd, est_opts);

  auto* train_cmd = app.add_subcommand("train", "train with prune/reassign rewiring");
  add_common(train_cmd, train_opts);

  auto* sweep_cmd = app.add_subcommand("sweep", "profile-grid sweep over seeds");
  add_common(sweep_cmd, sweep_opts);

  auto* report_cmd = app.add_subcommand("report", "aggregate completed runs");
  add_common(report_cmd, report_opts, /*config_required=*/false);
  report_cmd->add_option("runs", report_runs, "run directories")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (map_cmd->parsed()) return cmd_map(map_opts, mask_path);
    if (est_cmd->parsed()) return cmd_estimate(est_opts);
    if (train_cmd->parsed()) return cmd_train(train_opts);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts);
    if (report_cmd->parsed()) return cmd_report(report_opts, report_runs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
