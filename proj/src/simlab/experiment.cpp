#include "climd/simlab/experiment.hpp"

#include <ostream>

#include "climd/distribution.hpp"
#include "climd/error.hpp"
#include "climd/format.hpp"
#include "climd/measurer.hpp"
#include "climd/parallel.hpp"

namespace climd::simlab {
namespace {

MetricSummary mean_of(const std::vector<SeedOutcome>& runs, ArmOutcome SeedOutcome::*arm) {
  MetricSummary m;
  if (runs.empty()) return m;
  for (const auto& r : runs) {
    m.accuracy += (r.*arm).metrics.accuracy;
    m.weighted_f1 += (r.*arm).metrics.weighted_f1;
    m.macro_f1 += (r.*arm).metrics.macro_f1;
  }
  const double n = static_cast<double>(runs.size());
  m.accuracy /= n;
  m.weighted_f1 /= n;
  m.macro_f1 /= n;
  return m;
}

ArmOutcome outcome(const TrainResult& result) {
  ArmOutcome arm;
  arm.visits = result.visits;
  arm.epochs = result.history.size();
  if (!result.history.empty()) arm.metrics = result.history.back().test;
  return arm;
}

}  // namespace

ExperimentConfig ExperimentConfig::desk_scale() {
  ExperimentConfig c;
  c.data.classes = 5;
  c.data.modalities = 3;
  c.data.dims = {8};
  c.data.samples = 2000;
  c.data.imbalance_exponent = 1.5;
  c.data.class_separation = 2.0;
  c.data.noise_scale = 1.0;
  c.data.redundancy = 0.3;
  c.train.learning_rate = 0.02;
  c.train.epochs = 20;
  c.seeds = 10;
  return c;
}

void ExperimentConfig::validate() const {
  data.validate();
  train.validate();
  if (seeds == 0) throw ValidationError("need at least one seed");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("test fraction must be in (0, 1)");
}

std::map<std::string, std::string> ExperimentConfig::describe() const {
  std::string dims_text;
  for (std::size_t i = 0; i < data.dims.size(); ++i) dims_text += (i ? "," : "") + std::to_string(data.dims[i]);
  return {
      {"classes", std::to_string(data.classes)},
      {"modalities", std::to_string(data.modalities)},
      {"dims", dims_text},
      {"samples", std::to_string(data.samples)},
      {"imbalance", format_double(data.imbalance_exponent)},
      {"separation", format_double(data.class_separation)},
      {"noise", format_double(data.noise_scale)},
      {"redundancy", format_double(data.redundancy)},
      {"data_seed", std::to_string(data.seed)},
      {"lr", format_double(train.learning_rate)},
      {"epochs", std::to_string(train.epochs)},
      {"warmup", std::to_string(train.warmup())},
      {"batch", std::to_string(train.batch_size)},
      {"hidden", std::to_string(train.hidden)},
      {"train_seed", std::to_string(train.seed)},
      {"gamma", format_double(train.gamma)},
      {"seeds", std::to_string(seeds)},
      {"test_fraction", format_double(test_fraction)},
      {"difficulty_order", std::string(to_string(order))},
  };
}

SeedOutcome run_seed(const ExperimentConfig& config, std::size_t seed_index) {
  SyntheticSpec spec = config.data;
  spec.seed = config.data.seed + seed_index;
  TrainConfig tc = config.train;
  tc.seed = config.train.seed + seed_index;

  const Split split = balanced_test_split(generate_dataset(spec), config.test_fraction);
  const auto ids = split.train.ids();
  const FusionModel initial = init_model(split.train.dims, tc.hidden, split.train.classes, tc.seed);

  // The warm-up model only supplies difficulty scores.
  const Schedule warmup = random_baseline_schedule(ids, tc.warmup(), tc.seed);
  const TrainResult warm = train(initial, split.train, Dataset{}, warmup, tc);
  const auto traces = collect_traces(warm.model, split.train);
  const DifficultyTable table = score_dataset(traces);
  const ClassDistribution dist = fit_distribution(split.train.class_counts(), tc.gamma);
  const Schedule curriculum = build_schedule(table, dist, {tc.epochs, config.order});
  const Schedule baseline = budget_matched_baseline(ids, curriculum.total_visits(), tc.seed);

  SeedOutcome out;
  out.seed = spec.seed;
  out.train_size = split.train.size();
  out.test_size = split.test.size();
  out.alpha_hat = dist.alpha_hat;
  out.curriculum = outcome(train(initial, split.train, split.test, curriculum, tc));
  out.baseline = outcome(train(initial, split.train, split.test, baseline, tc));
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.runs.resize(config.seeds);
  parallel_for(config.seeds, config.workers, [&](std::size_t i) { report.runs[i] = run_seed(config, i); });
  report.curriculum_mean = mean_of(report.runs, &SeedOutcome::curriculum);
  report.baseline_mean = mean_of(report.runs, &SeedOutcome::baseline);
  for (const auto& r : report.runs) {
    if (r.curriculum.metrics.macro_f1 > r.baseline.metrics.macro_f1) ++report.curriculum_wins;
  }
  return report;
}

void write_report(std::ostream& out, const ExperimentReport& report) {
  out << "seed,arm,accuracy,weighted_f1,macro_f1,visits,epochs,train_size,test_size,alpha_hat\n";
  auto row = [&](const SeedOutcome& r, const char* name, const ArmOutcome& arm) {
    out << r.seed << ',' << name << ',' << format_double(arm.metrics.accuracy) << ','
        << format_double(arm.metrics.weighted_f1) << ',' << format_double(arm.metrics.macro_f1) << ','
        << arm.visits << ',' << arm.epochs << ',' << r.train_size << ',' << r.test_size << ','
        << (r.alpha_hat ? format_double(*r.alpha_hat) : "degenerate-balanced") << '\n';
  };
  for (const auto& r : report.runs) {
    row(r, "climd", r.curriculum);
    row(r, "baseline", r.baseline);
  }
  auto mean_row = [&](const char* name, const MetricSummary& m) {
    out << "mean," << name << ',' << format_double(m.accuracy) << ',' << format_double(m.weighted_f1) << ','
        << format_double(m.macro_f1) << ",,,,,\n";
  };
  mean_row("climd", report.curriculum_mean);
  mean_row("baseline", report.baseline_mean);
  out << "wins,climd,,," << report.curriculum_wins << ",,,,,\n";
}

}  // namespace climd::simlab
