#include "mosaic/io.hpp"

#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

namespace mosaic {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << std::setprecision(17);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

}  // namespace

Mask Triplets::to_mask(int n) const {
  Mask mask(n, n);
  for (const auto& [pre, post, w] : entries) {
    if (pre < 0 || pre >= n || post < 0 || post >= n)
      throw std::runtime_error("triplets: index out of range for n=" +
                               std::to_string(n));
    mask.set(pre, post);
  }
  return mask;
}

Eigen::MatrixXd Triplets::to_weights(int n) const {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [pre, post, weight] : entries) {
    if (pre < 0 || pre >= n || post < 0 || post >= n)
      throw std::runtime_error("triplets: index out of range for n=" +
                               std::to_string(n));
    w(post, pre) = weight;
  }
  return w;
}

Triplets Triplets::from_weights(const Eigen::MatrixXd& w, const Mask& mask) {
  Triplets t;
  for (int pre = 0; pre < mask.rows(); ++pre)
    for (int post = 0; post < mask.cols(); ++post)
      if (mask.at(pre, post)) t.entries.emplace_back(pre, post, w(post, pre));
  return t;
}

Triplets Triplets::from_mask(const Mask& mask) {
  Triplets t;
  for (int pre = 0; pre < mask.rows(); ++pre)
    for (int post = 0; post < mask.cols(); ++post)
      if (mask.at(pre, post)) t.entries.emplace_back(pre, post, 1.0);
  return t;
}

void write_triplets(const std::string& path, const Triplets& triplets) {
  auto out = open_out(path);
  out << "pre post weight\n";
  for (const auto& [pre, post, w] : triplets.entries)
    out << pre << ' ' << post << ' ' << w << '\n';
}

Triplets read_triplets(const std::string& path) {
  auto in = open_in(path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("pre post weight", 0) != 0)
    throw std::runtime_error("triplet file missing 'pre post weight' header: " +
                             path);
  Triplets t;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    int pre = 0, post = 0;
    double w = 0.0;
    if (!(ss >> pre >> post >> w))
      throw std::runtime_error("malformed triplet at " + path + ":" +
                               std::to_string(lineno));
    t.entries.emplace_back(pre, post, w);
  }
  return t;
}

void write_profile_json(const std::string& path, const SparsityProfile& profile) {
  auto out = open_out(path);
  out << json(profile.p).dump() << '\n';
}

SparsityProfile read_profile_json(const std::string& path) {
  auto in = open_in(path);
  json j;
  in >> j;
  if (!j.is_array()) throw std::runtime_error("profile JSON must be an array: " + path);
  SparsityProfile profile;
  profile.p = j.get<std::vector<double>>();
  profile.validate();
  return profile;
}

void write_occupancy_csv(const std::string& path, const OccupancyMap& occupancy,
                         const TileLattice& lattice) {
  auto out = open_out(path);
  out << "x,y,kind,rows_used,capacity\n";
  const GridConfig& config = lattice.config();
  for (const TileId& tile : lattice.tiles()) {
    int used = 0, cap = 0;
    if (tile.kind == TileKind::NT) {
      const int nt = lattice.nt_index(tile.y / 2, tile.x / 2);
      used = occupancy.nt_fanin(nt, config);
      cap = config.nt_input_size;
    } else {
      auto it = occupancy.rt_load.find(tile);
      used = it == occupancy.rt_load.end() ? 0 : it->second;
      cap = config.rt_size;
    }
    out << tile.x << ',' << tile.y << ',' << to_string(tile.kind) << ',' << used
        << ',' << cap << '\n';
  }
}

void write_mappability_json(const std::string& path,
                            const MappabilityReport& report,
                            const TileLattice& lattice) {
  json j;
  j["mappable"] = report.mappable;
  j["peak_nt_fanin"] = report.peak_nt_fanin;
  j["peak_rt_load"] = report.peak_rt_load;
  j["nt_input_size"] = lattice.config().nt_input_size;
  j["rt_size"] = lattice.config().rt_size;
  j["violations"] = json::array();
  for (const auto& v : report.violations)
    j["violations"].push_back({{"x", v.tile.x},
                               {"y", v.tile.y},
                               {"kind", to_string(v.tile.kind)},
                               {"required", v.required},
                               {"capacity", v.capacity}});
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_estimate_csv(
    const std::string& path,
    const std::vector<std::pair<SparsityProfile, ResourceEstimate>>& rows) {
  auto out = open_out(path);
  out << "profile,tile_kind,mean,std,max,n_samples\n";
  for (const auto& [profile, est] : rows) {
    const std::string p = json(profile.p).dump();
    auto emit = [&](const char* kind, const ResourceEstimate::Stat& s) {
      out << '"' << p << "\"," << kind << ',' << s.mean << ',' << s.stddev << ','
          << s.max << ',' << est.n_samples << '\n';
    };
    emit("NT", est.nt);
    emit("RT0", est.rt0);
    emit("RT1", est.rt1);
  }
}

void write_rewire_events_csv(const std::string& path,
                             const std::vector<RewireEvent>& events) {
  auto out = open_out(path);
  out << "epoch,bucket,pruned,regrown\n";
  for (const auto& e : events)
    for (std::size_t b = 0; b < e.pruned.size(); ++b)
      out << e.epoch << ',' << b << ',' << e.pruned[b] << ',' << e.regrown[b]
          << '\n';
}

void write_training_log_csv(const std::string& path,
                            const std::vector<EpochRecord>& log) {
  auto out = open_out(path);
  out << "epoch,train_loss,train_accuracy,test_accuracy,active_connections,"
         "pruned,regrown,profile_ok,mappable,memory_elements\n";
  for (const auto& r : log)
    out << r.epoch << ',' << r.train_loss << ',' << r.train_accuracy << ','
        << r.test_accuracy << ',' << r.active_connections << ',' << r.pruned
        << ',' << r.regrown << ',' << (r.profile_ok ? 1 : 0) << ',' << r.mappable
        << ',' << r.memory_elements << '\n';
}

namespace {

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
}

Eigen::MatrixXd read_matrix(std::ifstream& in, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
  if (!in) throw std::runtime_error("checkpoint: truncated binary payload");
  return m;
}

}  // namespace

void save_checkpoint(const std::string& base, const NetworkParams& params,
                     const Mask& mask, const std::string& hyper_json) {
  json sidecar;
  sidecar["shapes"] = {
      {"w_in", {params.w_in.rows(), params.w_in.cols()}},
      {"w_rec", {params.w_rec.rows(), params.w_rec.cols()}},
      {"w_out", {params.w_out.rows(), params.w_out.cols()}},
  };
  sidecar["hyperparameters"] =
      hyper_json.empty() ? json::object() : json::parse(hyper_json);
  {
    auto out = open_out(base + ".json");
    out << sidecar.dump(2) << '\n';
  }
  {
    std::ofstream out(base + ".bin", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + base + ".bin");
    write_matrix(out, params.w_in);
    write_matrix(out, params.w_rec);
    write_matrix(out, params.w_out);
  }
  write_triplets(base + ".mask.tsv", Triplets::from_mask(mask));
}

NetworkParams load_checkpoint(const std::string& base, Mask* mask) {
  json sidecar;
  {
    auto in = open_in(base + ".json");
    in >> sidecar;
  }
  const auto& shapes = sidecar.at("shapes");
  std::ifstream in(base + ".bin", std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + base + ".bin");
  NetworkParams params;
  auto shape = [&](const char* name) {
    const auto& s = shapes.at(name);
    return std::pair<int, int>(s.at(0).get<int>(), s.at(1).get<int>());
  };
  auto [ir, ic] = shape("w_in");
  auto [rr, rc] = shape("w_rec");
  auto [orr, oc] = shape("w_out");
  params.w_in = read_matrix(in, ir, ic);
  params.w_rec = read_matrix(in, rr, rc);
  params.w_out = read_matrix(in, orr, oc);
  if (mask) *mask = read_triplets(base + ".mask.tsv").to_mask(rr);
  return params;
}

}  // namespace mosaic
