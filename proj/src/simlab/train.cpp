#include "climd/simlab/train.hpp"

#include <algorithm>
#include <cmath>

#include "climd/error.hpp"
#include "climd/kernels.hpp"
#include "climd/simlab/random.hpp"

namespace climd::simlab {

void TrainConfig::validate() const {
  if (epochs == 0) throw ValidationError("training needs at least one epoch");
  if (batch_size == 0) throw ValidationError("batch size must be >= 1");
  if (hidden == 0) throw ValidationError("hidden width must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning rate must be >= 0");
  }
  if (!(gamma > 0.0)) throw ValidationError("gamma must be > 0");
}

ConfusionMatrix evaluate(const FusionModel& model, const Dataset& data) {
  ConfusionMatrix cm(model.classes);
  for (const auto& s : data.samples) cm.add(s.label, predict(model, s.features));
  return cm;
}

TrainResult train(FusionModel model, const Dataset& train_set, const Dataset& test_set,
                  const Schedule& schedule, const TrainConfig& config) {
  config.validate();
  const auto index = train_set.index();
  std::vector<std::vector<std::size_t>> epochs;
  epochs.reserve(schedule.epochs.size());
  for (const auto& plan : schedule.epochs) {
    std::vector<std::size_t> rows;
    rows.reserve(plan.samples.size());
    for (const auto& id : plan.samples) {
      auto it = index.find(id);
      if (it == index.end()) {
        throw ValidationError("schedule epoch " + std::to_string(plan.epoch) +
                              " references unknown sample " + id);
      }
      rows.push_back(it->second);
    }
    epochs.push_back(std::move(rows));
  }

  auto order_rng = stream(config.seed, "batch-order");
  FusionModel grad = FusionModel::zeros(model.dims, model.hidden, model.classes);
  TrainResult result;
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    auto& rows = epochs[e];
    std::shuffle(rows.begin(), rows.end(), order_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < rows.size(); start += config.batch_size) {
      const std::size_t end = std::min(rows.size(), start + config.batch_size);
      for (auto block : grad.parameter_blocks()) std::fill(block.begin(), block.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const auto& s = train_set.samples[rows[k]];
        loss_sum += accumulate_gradient(model, s.features, s.label, grad);
      }
      const double step = -config.learning_rate / static_cast<double>(end - start);
      auto params = model.parameter_blocks();
      auto grads = grad.parameter_blocks();
      for (std::size_t b = 0; b < params.size(); ++b) kernels::axpy(step, grads[b], params[b]);
    }
    EpochMetrics metrics;
    metrics.epoch = e + 1;
    metrics.visits = rows.size();
    metrics.train_loss = rows.empty() ? 0.0 : loss_sum / static_cast<double>(rows.size());
    if (!test_set.samples.empty()) metrics.test = summarize(evaluate(model, test_set));
    result.visits += rows.size();
    result.history.push_back(metrics);
  }
  result.model = std::move(model);
  return result;
}

TrainResult train(const Dataset& train_set, const Dataset& test_set, const Schedule& schedule,
                  const TrainConfig& config) {
  return train(init_model(train_set.dims, config.hidden, train_set.classes, config.seed), train_set,
               test_set, schedule, config);
}

std::vector<SampleTrace> collect_traces(const FusionModel& model, const Dataset& data) {
  std::vector<SampleTrace> traces;
  traces.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    const auto pass = forward(model, s.features);
    SampleTrace t;
    t.sample_id = s.id;
    t.label = s.label;
    for (std::size_t m = 0; m < model.modalities(); ++m) {
      t.modalities.push_back({pass.modality_probs[m], pass.embeddings[m]});
    }
    traces.push_back(std::move(t));
  }
  return traces;
}

}  // namespace climd::simlab
