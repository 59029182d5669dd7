#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "climd/metrics.hpp"
#include "climd/scheduler.hpp"
#include "climd/simlab/dataset.hpp"
#include "climd/simlab/train.hpp"

namespace climd::simlab {

struct ExperimentConfig {
  SyntheticSpec data;
  TrainConfig train;
  std::size_t seeds = 10;
  double test_fraction = 0.3;
  DifficultyOrder order = DifficultyOrder::larger_is_easier;
  unsigned workers = 1;

  /// Desk-scale defaults: 5 classes, 3 modalities, N = 2000, exponent 1.5.
  static ExperimentConfig desk_scale();
  void validate() const;
  /// Flat key/value view used for manifests and digests.
  std::map<std::string, std::string> describe() const;
};

struct ArmOutcome {
  MetricSummary metrics;  // after the last epoch
  std::size_t visits = 0;
  std::size_t epochs = 0;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::optional<double> alpha_hat;
  ArmOutcome curriculum;
  ArmOutcome baseline;
};

struct ExperimentReport {
  std::vector<SeedOutcome> runs;
  MetricSummary curriculum_mean;
  MetricSummary baseline_mean;
  std::size_t curriculum_wins = 0;  // strictly higher macro-F1
};

/// One seed: warm up on shuffled data, score the warm-up model's traces,
/// fit the class distribution, build the curriculum, then train the
/// curriculum arm and a shuffle baseline with the same number of sample
/// visits from the same initial weights, and evaluate both on the same
/// balanced test split.
SeedOutcome run_seed(const ExperimentConfig& config, std::size_t seed_index);

/// Seeds run in parallel on `config.workers`; results are in seed order.
ExperimentReport run_experiment(const ExperimentConfig& config);

void write_report(std::ostream& out, const ExperimentReport& report);

}  // namespace climd::simlab
