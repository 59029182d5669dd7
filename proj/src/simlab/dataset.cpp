#include "climd/simlab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "climd/distribution.hpp"
#include "climd/error.hpp"
#include "climd/scheduler.hpp"
#include "climd/simlab/random.hpp"

namespace climd::simlab {

void SyntheticSpec::validate() const {
  if (classes < 2) throw ValidationError("synthetic spec needs at least 2 classes");
  if (modalities < 2) throw ValidationError("synthetic spec needs at least 2 modalities");
  if (dims.size() != 1 && dims.size() != modalities) {
    throw ValidationError("dims must list one size or one size per modality");
  }
  for (std::size_t d : dims) {
    if (d == 0) throw ValidationError("modality dimension must be >= 1");
  }
  if (samples < classes) throw ValidationError("synthetic spec needs N >= C");
  if (!(imbalance_exponent >= 0.0) || !std::isfinite(imbalance_exponent)) {
    throw ValidationError("imbalance exponent must be >= 0");
  }
  if (!(redundancy >= 0.0 && redundancy <= 1.0)) throw ValidationError("redundancy must be in [0, 1]");
  if (!(noise_scale >= 0.0) || !(class_separation >= 0.0)) {
    throw ValidationError("noise and separation must be >= 0");
  }
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.id);
  return out;
}

std::vector<std::size_t> Dataset::labels() const {
  std::vector<std::size_t> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(classes, 0);
  for (const auto& s : samples) ++counts.at(s.label);
  return counts;
}

std::unordered_map<std::string, std::size_t> Dataset::index() const {
  std::unordered_map<std::string, std::size_t> idx;
  idx.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!idx.emplace(samples[i].id, i).second) throw ValidationError("duplicate sample id " + samples[i].id);
  }
  return idx;
}

std::vector<std::size_t> class_sizes(std::size_t classes, std::size_t samples, double exponent) {
  if (classes == 0 || samples < classes) throw ValidationError("class sizes need N >= C >= 1");
  const auto weights = powerlaw_rank_probabilities(classes, exponent);
  const std::vector<std::size_t> caps(classes, samples);
  auto sizes = apportion(weights, samples, caps);
  for (auto& n : sizes) {
    if (n == 0) {
      auto largest = std::max_element(sizes.begin(), sizes.end());
      --*largest;
      n = 1;
    }
  }
  return sizes;
}

Dataset generate_dataset(const SyntheticSpec& spec) {
  spec.validate();
  const auto sizes = class_sizes(spec.classes, spec.samples, spec.imbalance_exponent);
  std::size_t dmax = 0;
  for (std::size_t m = 0; m < spec.modalities; ++m) dmax = std::max(dmax, spec.dim(m));

  auto centroid_rng = stream(spec.seed, "centroids");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> shared(spec.classes, std::vector<double>(dmax));
  for (auto& u : shared) {
    for (double& v : u) v = normal(centroid_rng);
  }
  // centroids[m][c]
  std::vector<std::vector<std::vector<double>>> centroids(spec.modalities);
  const double a = std::sqrt(spec.redundancy);
  const double b = std::sqrt(1.0 - spec.redundancy);
  for (std::size_t m = 0; m < spec.modalities; ++m) {
    const std::size_t d = spec.dim(m);
    const double scale = spec.class_separation / std::sqrt(2.0 * static_cast<double>(d));
    centroids[m].resize(spec.classes);
    for (std::size_t c = 0; c < spec.classes; ++c) {
      auto& cen = centroids[m][c];
      cen.resize(d);
      for (std::size_t k = 0; k < d; ++k) cen[k] = scale * (a * shared[c][k] + b * normal(centroid_rng));
    }
  }

  std::vector<std::size_t> labels;
  labels.reserve(spec.samples);
  for (std::size_t c = 0; c < spec.classes; ++c) labels.insert(labels.end(), sizes[c], c);
  auto order_rng = stream(spec.seed, "sample-order");
  std::shuffle(labels.begin(), labels.end(), order_rng);

  const std::size_t width = std::to_string(spec.samples - 1).size();
  auto noise_rng = stream(spec.seed, "feature-noise");
  Dataset data;
  data.classes = spec.classes;
  for (std::size_t m = 0; m < spec.modalities; ++m) data.dims.push_back(spec.dim(m));
  data.samples.reserve(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    Sample s;
    std::string num = std::to_string(i);
    s.id = "s" + std::string(width - num.size(), '0') + num;
    s.label = labels[i];
    s.features.resize(spec.modalities);
    for (std::size_t m = 0; m < spec.modalities; ++m) {
      const auto& cen = centroids[m][s.label];
      auto& x = s.features[m];
      x.resize(cen.size());
      for (std::size_t k = 0; k < cen.size(); ++k) x[k] = cen[k] + spec.noise_scale * normal(noise_rng);
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

Split balanced_test_split(const Dataset& data, double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("test fraction must be in (0, 1)");
  const auto counts = data.class_counts();
  const std::size_t n_min = *std::min_element(counts.begin(), counts.end());
  if (n_min < 2) throw ValidationError("every class needs at least 2 samples to split off a test set");
  const std::size_t per_class = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(n_min))));
  Split split;
  split.train.classes = split.test.classes = data.classes;
  split.train.dims = split.test.dims = data.dims;
  std::vector<std::size_t> taken(data.classes, 0);
  for (const auto& s : data.samples) {
    if (taken[s.label] < per_class) {
      ++taken[s.label];
      split.test.samples.push_back(s);
    } else {
      split.train.samples.push_back(s);
    }
  }
  return split;
}

}  // namespace climd::simlab
