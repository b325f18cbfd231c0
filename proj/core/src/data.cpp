#include "mosaic/data.hpp"

#include <hdf5.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "mosaic/rng.hpp"

namespace mosaic {

void SpikeDataset::validate() const {
  if (samples.size() != labels.size())
    throw std::runtime_error("SpikeDataset: sample/label count mismatch");
  for (const auto& s : samples) {
    if (s.times.size() != s.channels.size())
      throw std::runtime_error("SpikeDataset: times/channels length mismatch");
    for (double t : s.times)
      if (t < 0.0) throw std::runtime_error("SpikeDataset: negative spike time");
    for (int c : s.channels)
      if (c < 0 || c >= n_channels)
        throw std::runtime_error("SpikeDataset: channel index out of range");
  }
  for (int l : labels)
    if (l < 0 || l >= n_classes)
      throw std::runtime_error("SpikeDataset: label out of range");
}

namespace {

class H5Handle {
 public:
  H5Handle(hid_t id, herr_t (*closer)(hid_t)) : id_(id), closer_(closer) {}
  ~H5Handle() {
    if (id_ >= 0) closer_(id_);
  }
  H5Handle(const H5Handle&) = delete;
  H5Handle& operator=(const H5Handle&) = delete;
  hid_t get() const { return id_; }
  bool valid() const { return id_ >= 0; }

 private:
  hid_t id_;
  herr_t (*closer_)(hid_t);
};

hsize_t dataset_length(hid_t dset) {
  H5Handle space(H5Dget_space(dset), H5Sclose);
  hsize_t dims[1] = {0};
  if (H5Sget_simple_extent_ndims(space.get()) != 1)
    throw std::runtime_error("load_shd: expected 1-D dataset");
  H5Sget_simple_extent_dims(space.get(), dims, nullptr);
  return dims[0];
}

}  // namespace

SpikeDataset load_shd(const std::string& path, const std::string& split) {
  namespace fs = std::filesystem;
  fs::path file(path);
  if (fs::is_directory(file)) file /= "shd_" + split + ".h5";
  if (!fs::exists(file))
    throw std::runtime_error("load_shd: file not found: " + file.string());

  H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);  // errors surface as exceptions
  H5Handle f(H5Fopen(file.string().c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose);
  if (!f.valid())
    throw std::runtime_error("load_shd: cannot open HDF5 file: " + file.string());

  H5Handle times_d(H5Dopen2(f.get(), "spikes/times", H5P_DEFAULT), H5Dclose);
  H5Handle units_d(H5Dopen2(f.get(), "spikes/units", H5P_DEFAULT), H5Dclose);
  H5Handle labels_d(H5Dopen2(f.get(), "labels", H5P_DEFAULT), H5Dclose);
  if (!times_d.valid() || !units_d.valid() || !labels_d.valid())
    throw std::runtime_error(
        "load_shd: missing spikes/times, spikes/units or labels in " +
        file.string());

  const hsize_t n = dataset_length(times_d.get());
  if (dataset_length(units_d.get()) != n || dataset_length(labels_d.get()) != n)
    throw std::runtime_error("load_shd: dataset lengths disagree in " +
                             file.string());

  SpikeDataset out;
  out.split = split;
  out.samples.resize(n);
  out.labels.resize(n);

  {
    H5Handle memtype(H5Tvlen_create(H5T_NATIVE_DOUBLE), H5Tclose);
    std::vector<hvl_t> buf(n);
    if (H5Dread(times_d.get(), memtype.get(), H5S_ALL, H5S_ALL, H5P_DEFAULT,
                buf.data()) < 0)
      throw std::runtime_error("load_shd: failed reading spikes/times");
    for (hsize_t i = 0; i < n; ++i) {
      const auto* p = static_cast<const double*>(buf[i].p);
      out.samples[i].times.assign(p, p + buf[i].len);
    }
    H5Handle space(H5Dget_space(times_d.get()), H5Sclose);
    H5Dvlen_reclaim(memtype.get(), space.get(), H5P_DEFAULT, buf.data());
  }
  {
    H5Handle memtype(H5Tvlen_create(H5T_NATIVE_INT), H5Tclose);
    std::vector<hvl_t> buf(n);
    if (H5Dread(units_d.get(), memtype.get(), H5S_ALL, H5S_ALL, H5P_DEFAULT,
                buf.data()) < 0)
      throw std::runtime_error("load_shd: failed reading spikes/units");
    for (hsize_t i = 0; i < n; ++i) {
      const auto* p = static_cast<const int*>(buf[i].p);
      out.samples[i].channels.assign(p, p + buf[i].len);
    }
    H5Handle space(H5Dget_space(units_d.get()), H5Sclose);
    H5Dvlen_reclaim(memtype.get(), space.get(), H5P_DEFAULT, buf.data());
  }
  if (H5Dread(labels_d.get(), H5T_NATIVE_INT, H5S_ALL, H5S_ALL, H5P_DEFAULT,
              out.labels.data()) < 0)
    throw std::runtime_error("load_shd: failed reading labels");

  int max_channel = -1, max_label = -1;
  for (const auto& s : out.samples)
    for (int c : s.channels) max_channel = std::max(max_channel, c);
  for (int l : out.labels) max_label = std::max(max_label, l);
  out.n_channels = max_channel + 1;
  out.n_classes = max_label + 1;
  out.validate();
  return out;
}

SpikeDataset pool_channels(const SpikeDataset& dataset, int factor) {
  if (factor < 1) throw std::invalid_argument("pool_channels: factor must be >= 1");
  SpikeDataset out = dataset;
  out.n_channels = (dataset.n_channels + factor - 1) / factor;
  for (auto& s : out.samples)
    for (int& c : s.channels) c /= factor;
  return out;
}

BinnedDataset bin_spikes(const SpikeDataset& dataset, int n_steps,
                         double duration, bool clip) {
  if (n_steps < 1) throw std::invalid_argument("bin_spikes: n_steps must be >= 1");
  if (!(duration > 0.0))
    throw std::invalid_argument("bin_spikes: duration must be positive");
  BinnedDataset out;
  out.n_channels = dataset.n_channels;
  out.n_classes = dataset.n_classes;
  out.n_steps = n_steps;
  out.labels = dataset.labels;
  out.x.reserve(dataset.samples.size());
  for (const auto& sample : dataset.samples) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dataset.n_channels, n_steps);
    for (std::size_t e = 0; e < sample.times.size(); ++e) {
      int bin = static_cast<int>(std::floor(sample.times[e] / duration * n_steps));
      bin = std::clamp(bin, 0, n_steps - 1);
      m(sample.channels[e], bin) += 1.0;
    }
    if (clip) m = m.cwiseMin(1.0);
    out.x.push_back(std::move(m));
  }
  return out;
}

namespace {

using TemplateEvents = std::set<std::pair<int, int>>;  // (step, channel)

TemplateEvents draw_template(Rng& rng, int n_steps, int n_channels, int k) {
  TemplateEvents events;
  std::uniform_int_distribution<int> step_dist(0, n_steps - 1);
  std::uniform_int_distribution<int> chan_dist(0, n_channels - 1);
  while (static_cast<int>(events.size()) < k)
    events.insert({step_dist(rng), chan_dist(rng)});
  return events;
}

int hamming(const TemplateEvents& a, const TemplateEvents& b) {
  int common = 0;
  for (const auto& e : a) common += b.count(e) ? 1 : 0;
  return static_cast<int>(a.size()) + static_cast<int>(b.size()) - 2 * common;
}

}  // namespace

std::pair<SpikeDataset, SpikeDataset> synthetic_task(
    int n_classes, int n_channels, int n_steps, std::uint64_t seed,
    const SyntheticOptions& options) {
  if (n_classes < 2) throw std::invalid_argument("synthetic_task: n_classes >= 2");
  if (n_channels < 1 || n_steps < 1)
    throw std::invalid_argument("synthetic_task: empty input grid");
  const int k = std::min(options.events_per_class, n_steps * n_channels / 2);
  const int min_dist =
      options.min_template_distance > 0 ? options.min_template_distance : k / 2;

  Rng rng(derive_seed(seed, 0xda7a));
  std::vector<TemplateEvents> templates;
  templates.reserve(static_cast<std::size_t>(n_classes));
  for (int c = 0; c < n_classes; ++c) {
    TemplateEvents cand;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      cand = draw_template(rng, n_steps, n_channels, k);
      bool ok = true;
      for (const auto& other : templates)
        if (hamming(cand, other) < min_dist) {
          ok = false;
          break;
        }
      if (ok) break;
      cand.clear();
    }
    if (cand.empty())
      throw std::runtime_error("synthetic_task: could not separate class templates");
    templates.push_back(std::move(cand));
  }

  const double step_dt = options.duration / n_steps;
  auto make_split = [&](int per_class, const std::string& tag) {
    SpikeDataset ds;
    ds.n_channels = n_channels;
    ds.n_classes = n_classes;
    ds.split = tag;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> shift(0, 1);
    for (int c = 0; c < n_classes; ++c) {
      for (int i = 0; i < per_class; ++i) {
        SpikeDataset::Sample sample;
        for (const auto& [step, chan] : templates[static_cast<std::size_t>(c)]) {
          if (unit(rng) < options.drop_prob) continue;
          int s = step;
          if (unit(rng) < options.jitter_prob) s += shift(rng) ? 1 : -1;
          s = std::clamp(s, 0, n_steps - 1);
          sample.times.push_back((s + 0.5) * step_dt);
          sample.channels.push_back(chan);
        }
        ds.samples.push_back(std::move(sample));
        ds.labels.push_back(c);
      }
    }
    ds.validate();
    return ds;
  };

  return {make_split(options.n_train_per_class, "train"),
          make_split(options.n_test_per_class, "test")};
}

}  // namespace mosaic
