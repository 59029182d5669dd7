#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace climd::simlab {

/// Class-conditional Gaussian data with a power-law class-size profile.
///
/// Per modality m, class c has centroid
///   s_m (sqrt(rho) u_c[:d_m] + sqrt(1 - rho) v_{c,m}),  s_m = separation / sqrt(2 d_m)
/// with u_c shared across modalities and v_{c,m} modality-specific, all
/// entries standard normal. rho = `redundancy`; rho = 1 makes the
/// modalities carry the same class signal.
struct SyntheticSpec {
  std::size_t classes = 5;
  std::size_t modalities = 3;
  std::vector<std::size_t> dims{8};  // one entry per modality, or one shared entry
  std::size_t samples = 2000;
  double imbalance_exponent = 1.5;
  double class_separation = 2.0;
  double noise_scale = 1.0;
  double redundancy = 0.3;
  std::uint64_t seed = 1;

  std::size_t dim(std::size_t modality) const { return dims.size() == 1 ? dims[0] : dims.at(modality); }
  void validate() const;
};

struct Sample {
  std::string id;
  std::size_t label = 0;
  std::vector<std::vector<double>> features;  // one vector per modality
};

struct Dataset {
  std::size_t classes = 0;
  std::vector<std::size_t> dims;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  std::vector<std::string> ids() const;
  std::vector<std::size_t> labels() const;
  std::vector<std::size_t> class_counts() const;
  /// id -> position; throws ValidationError on duplicates.
  std::unordered_map<std::string, std::size_t> index() const;
};

/// round(N c^-e / sum_i i^-e) per class by largest remainder, at least 1 each.
std::vector<std::size_t> class_sizes(std::size_t classes, std::size_t samples, double exponent);

Dataset generate_dataset(const SyntheticSpec& spec);

struct Split {
  Dataset train;
  Dataset test;
};

/// Test set with the same number of samples per class, taken as
/// max(1, floor(test_fraction * n_min)) from each class in dataset order.
Split balanced_test_split(const Dataset& data, double test_fraction);

}  // namespace climd::simlab
