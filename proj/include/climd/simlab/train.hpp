#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "climd/distribution.hpp"
#include "climd/measurer.hpp"
#include "climd/metrics.hpp"
#include "climd/scheduler.hpp"
#include "climd/simlab/dataset.hpp"
#include "climd/simlab/model.hpp"

namespace climd::simlab {

struct TrainConfig {
  double learning_rate = 5e-5;
  std::size_t epochs = 100;
  std::optional<std::size_t> warmup_epochs;  // unset: max(1, epochs / 10)
  std::size_t batch_size = 32;
  std::size_t hidden = 16;
  std::uint64_t seed = 0;
  double gamma = kDefaultGamma;

  std::size_t warmup() const { return warmup_epochs.value_or(std::max<std::size_t>(1, epochs / 10)); }
  void validate() const;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  std::size_t visits = 0;
  double train_loss = 0.0;
  MetricSummary test;  // zeros when there is no test set
};

struct TrainResult {
  FusionModel model;
  std::vector<EpochMetrics> history;
  std::size_t visits = 0;
};

/// Mini-batch gradient descent on the fusion loss. Epoch t visits exactly
/// the samples of schedule.epochs[t-1], in an order shuffled by a generator
/// seeded from config.seed. Unknown sample ids are rejected before any
/// update.
TrainResult train(FusionModel model, const Dataset& train_set, const Dataset& test_set,
                  const Schedule& schedule, const TrainConfig& config);

/// Same, starting from init_model(..., config.seed).
TrainResult train(const Dataset& train_set, const Dataset& test_set, const Schedule& schedule,
                  const TrainConfig& config);

ConfusionMatrix evaluate(const FusionModel& model, const Dataset& data);

/// Per-modality auxiliary probabilities and embeddings for every sample.
std::vector<SampleTrace> collect_traces(const FusionModel& model, const Dataset& data);

}  // namespace climd::simlab
