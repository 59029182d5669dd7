// climd: curriculum scheduling for class-imbalanced multimodal training.
//
// Exit codes: 0 success, 1 validation error, 2 infeasible schedule, 3 I/O error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "climd/distribution.hpp"
#include "climd/error.hpp"
#include "climd/format.hpp"
#include "climd/io.hpp"
#include "climd/kernels.hpp"
#include "climd/manifest.hpp"
#include "climd/measurer.hpp"
#include "climd/metrics.hpp"
#include "climd/parallel.hpp"
#include "climd/scheduler.hpp"
#include "climd/simlab/experiment.hpp"

namespace fs = std::filesystem;
using namespace climd;

namespace {

// Collects data files for one output directory and writes them together
// with the run manifest.
class OutputDir {
 public:
  OutputDir(fs::path dir, RunManifest manifest) : dir_(std::move(dir)), manifest_(std::move(manifest)) {}

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  void commit() {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
    for (const auto& [name, content] : files_) {
      write_text_file(dir_ / name, content);
      manifest_.output_digests[name] = sha256_hex(content);
    }
    manifest_.timestamp = utc_timestamp();
    write_text_file(dir_ / "manifest.json", manifest_.to_json());
  }

 private:
  fs::path dir_;
  RunManifest manifest_;
  std::vector<std::pair<std::string, std::string>> files_;
};

RunManifest manifest_for(const std::string& command) {
  RunManifest m;
  m.command = command;
  return m;
}

std::string digest_input(RunManifest& manifest, const std::string& path) {
  std::string content = read_text_file(path);
  manifest.input_digests[path] = sha256_hex(content);
  return content;
}

template <class Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("stage ") + name + ": " + e.what());
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(std::string("stage ") + name + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(std::string("stage ") + name + ": " + e.what());
  }
}

ClassDistribution distribution_from_labels(std::span<const std::size_t> labels,
                                           std::optional<std::size_t> classes, double gamma,
                                           std::optional<double> balanced_alpha) {
  const auto counts = count_labels(labels, classes);
  return fit_distribution(counts, gamma, balanced_alpha);
}

void check_unique(const std::vector<LabeledSample>& rows, const std::string& source) {
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!seen.insert(rows[i].sample_id).second) {
      throw ValidationError(source + ": duplicate sample_id " + rows[i].sample_id);
    }
  }
}

std::string render(const auto& writer, const auto& value) {
  std::ostringstream s;
  writer(s, value);
  return s.str();
}

// --- fit ----------------------------------------------------------------------

struct FitArgs {
  std::string labels;
  double gamma = kDefaultGamma;
  std::optional<double> balanced_alpha;
  std::optional<std::size_t> classes;
  std::string out;
};

int run_fit(const FitArgs& a) {
  RunManifest manifest = manifest_for("fit");
  std::istringstream in(digest_input(manifest, a.labels));
  const auto rows = read_labels(in, a.labels);
  check_unique(rows, a.labels);
  std::vector<std::size_t> labels;
  for (const auto& r : rows) labels.push_back(r.label);
  const auto dist = distribution_from_labels(labels, a.classes, a.gamma, a.balanced_alpha);

  const std::string report = render(write_distribution_report, dist);
  if (a.out.empty()) {
    std::cout << report;
    std::cerr << distribution_summary(dist);
    return 0;
  }
  manifest.config = {{"labels", a.labels}, {"gamma", format_double(a.gamma)}};
  if (a.balanced_alpha) manifest.config["balanced_alpha"] = format_double(*a.balanced_alpha);
  if (a.classes) manifest.config["classes"] = std::to_string(*a.classes);
  OutputDir out(a.out, manifest);
  out.add("distribution.csv", report);
  out.commit();
  std::cout << distribution_summary(dist);
  return 0;
}

// --- score --------------------------------------------------------------------

struct ScoreArgs {
  std::string traces;
  std::string out;
  unsigned threads = 0;
};

int run_score(const ScoreArgs& a) {
  RunManifest manifest = manifest_for("score");
  std::istringstream in(digest_input(manifest, a.traces));
  const auto traces = read_traces(in, a.traces);
  const auto table = score_dataset(traces, worker_count(a.threads));
  manifest.config = {{"traces", a.traces}};
  OutputDir out(a.out, manifest);
  out.add("difficulty.csv", render(write_difficulty_table, table));
  out.commit();
  std::cout << "scored " << table.size() << " samples -> " << (fs::path(a.out) / "difficulty.csv").string()
            << '\n';
  return 0;
}

// --- schedule -----------------------------------------------------------------

struct ScheduleArgs {
  std::string difficulty;
  std::string distribution;
  std::size_t epochs = 0;
  std::string order = "larger-is-easier";
  std::string out;
};

void add_schedule_files(OutputDir& out, const Schedule& schedule) {
  out.add("schedule.csv", render(write_schedule, schedule));
  out.add("summary.csv", render(write_schedule_summary, schedule));
  out.add("targets.csv", render(write_schedule_targets, schedule));
}

int run_schedule(const ScheduleArgs& a) {
  RunManifest manifest = manifest_for("schedule");
  std::istringstream table_in(digest_input(manifest, a.difficulty));
  std::istringstream dist_in(digest_input(manifest, a.distribution));
  const auto table = read_difficulty_table(table_in, a.difficulty);
  const auto dist = read_distribution_report(dist_in, a.distribution);
  const ScheduleConfig config{a.epochs, parse_difficulty_order(a.order)};
  const Schedule schedule = build_schedule(table, dist, config);
  manifest.config = {{"difficulty", a.difficulty},
                     {"distribution", a.distribution},
                     {"epochs", std::to_string(a.epochs)},
                     {"order", a.order},
                     {"schedule_digest", schedule.provenance.config_digest}};
  OutputDir out(a.out, manifest);
  add_schedule_files(out, schedule);
  out.commit();
  std::cout << "scheduled " << schedule.epochs.size() << " epochs, " << schedule.total_visits()
            << " sample visits -> " << a.out << '\n';
  return 0;
}

// --- eval ---------------------------------------------------------------------

struct EvalArgs {
  std::string predictions;
  std::optional<std::size_t> classes;
  std::string out;
};

std::string render_confusion(const ConfusionMatrix& cm) {
  std::ostringstream s;
  s << "true\\pred";
  for (std::size_t j = 0; j < cm.classes(); ++j) s << ',' << j;
  s << '\n';
  for (std::size_t i = 0; i < cm.classes(); ++i) {
    s << i;
    for (std::size_t j = 0; j < cm.classes(); ++j) s << ',' << cm.at(i, j);
    s << '\n';
  }
  return s.str();
}

int run_eval(const EvalArgs& a) {
  RunManifest manifest = manifest_for("eval");
  std::istringstream in(digest_input(manifest, a.predictions));
  const auto preds = read_predictions(in, a.predictions);
  std::vector<std::size_t> truth, pred;
  std::size_t classes = 0;
  for (const auto& p : preds) {
    truth.push_back(p.truth);
    pred.push_back(p.predicted);
    classes = std::max({classes, p.truth + 1, p.predicted + 1});
  }
  if (a.classes) classes = *a.classes;
  const auto cm = confusion(truth, pred, classes);
  const auto m = summarize(cm);
  std::ostringstream metrics;
  metrics << "metric,value\n"
          << "accuracy," << format_double(m.accuracy) << '\n'
          << "weighted_f1," << format_double(m.weighted_f1) << '\n'
          << "macro_f1," << format_double(m.macro_f1) << '\n';
  std::cout << metrics.str() << '\n' << render_confusion(cm);
  if (!a.out.empty()) {
    manifest.config = {{"predictions", a.predictions}, {"classes", std::to_string(classes)}};
    OutputDir out(a.out, manifest);
    out.add("metrics.csv", metrics.str());
    out.add("confusion.csv", render_confusion(cm));
    out.commit();
  }
  return 0;
}

// --- figure2 ------------------------------------------------------------------

// N = 1000 samples, T = 10 epochs, C = 10 classes, alpha(T) = 5, gamma = 0.3.
// Class sizes follow the epoch-T target law, so the final epoch matches it.
Schedule figure2_schedule() {
  constexpr std::size_t kSamples = 1000, kEpochs = 10, kClasses = 10;
  constexpr double kAlphaCap = 5.0;
  const auto law = powerlaw_rank_probabilities(kClasses, kDefaultGamma * kAlphaCap);
  const std::vector<std::size_t> unlimited(kClasses, kSamples);
  const auto sizes = apportion(law, kSamples, unlimited);
  const auto dist = distribution_with_alpha(sizes, kDefaultGamma, kAlphaCap);
  DifficultyTable table;
  std::size_t next = 0;
  for (std::size_t c = 0; c < kClasses; ++c) {
    for (std::size_t k = 0; k < sizes[c]; ++k, ++next) {
      std::string num = std::to_string(next);
      DifficultyRecord rec;
      rec.sample_id = "f" + std::string(4 - num.size(), '0') + num;
      rec.label = c;
      rec.r = 0.0;
      table.push_back(std::move(rec));
    }
  }
  return build_schedule(table, dist, {kEpochs, DifficultyOrder::larger_is_easier});
}

int run_figure2(const std::string& out_dir) {
  const Schedule schedule = figure2_schedule();
  const std::string counts = render(write_schedule_summary, schedule);
  const std::string targets = render(write_schedule_targets, schedule);
  if (out_dir.empty()) {
    std::cout << counts;
    return 0;
  }
  RunManifest manifest = manifest_for("figure2");
  manifest.config = {{"samples", "1000"}, {"epochs", "10"}, {"classes", "10"}, {"alpha_cap", "5"},
                     {"gamma", format_double(kDefaultGamma)}};
  OutputDir out(out_dir, manifest);
  out.add("figure2_counts.csv", counts);
  out.add("figure2_targets.csv", targets);
  out.commit();
  std::cout << counts;
  return 0;
}

// --- simulate -----------------------------------------------------------------

struct SimulateArgs {
  simlab::ExperimentConfig config = simlab::ExperimentConfig::desk_scale();
  std::size_t warmup = 0;  // 0: max(1, T/10)
  std::string order = "larger-is-easier";
  unsigned threads = 0;
  std::string out;
};

void add_simulation_options(CLI::App& cmd, SimulateArgs& a) {
  auto& d = a.config.data;
  auto& t = a.config.train;
  cmd.add_option("--classes", d.classes, "number of classes")->capture_default_str();
  cmd.add_option("--modalities", d.modalities, "number of modalities")->capture_default_str();
  cmd.add_option("--dims", d.dims, "feature dimension per modality (one value or one per modality)")
      ->delimiter(',')
      ->capture_default_str();
  cmd.add_option("--n", d.samples, "total samples")->capture_default_str();
  cmd.add_option("--imbalance", d.imbalance_exponent, "power-law exponent of class sizes")
      ->capture_default_str();
  cmd.add_option("--redundancy", d.redundancy, "shared share of class signal across modalities, [0,1]")
      ->capture_default_str();
  cmd.add_option("--separation", d.class_separation, "mean centroid distance per modality")
      ->capture_default_str();
  cmd.add_option("--noise", d.noise_scale, "feature noise standard deviation")->capture_default_str();
  cmd.add_option("--data-seed", d.seed, "first dataset seed")->capture_default_str();
  cmd.add_option("--epochs", t.epochs, "training epochs T")->capture_default_str();
  cmd.add_option("--warmup", a.warmup, "warm-up epochs before scoring (0 = max(1, T/10))");
  cmd.add_option("--lr", t.learning_rate, "learning rate")->capture_default_str();
  cmd.add_option("--gamma", t.gamma, "power-law smoothing gamma")->capture_default_str();
  cmd.add_option("--batch", t.batch_size, "mini-batch size")->capture_default_str();
  cmd.add_option("--hidden", t.hidden, "embedding width")->capture_default_str();
  cmd.add_option("--seed", t.seed, "first training seed")->capture_default_str();
  cmd.add_option("--order", a.order, "larger-is-easier | smaller-is-easier")->capture_default_str();
}

void resolve(SimulateArgs& a) {
  a.config.train.warmup_epochs =
      a.warmup == 0 ? std::nullopt : std::optional<std::size_t>(a.warmup);
  a.config.order = parse_difficulty_order(a.order);
  a.config.workers = worker_count(a.threads);
}

int run_simulate(SimulateArgs a) {
  resolve(a);
  const auto report = simlab::run_experiment(a.config);
  RunManifest manifest = manifest_for("simulate");
  manifest.config = a.config.describe();
  for (std::size_t i = 0; i < a.config.seeds; ++i) manifest.seeds.push_back(a.config.train.seed + i);
  OutputDir out(a.out, manifest);
  out.add("report.csv", render(simlab::write_report, report));
  out.commit();
  std::cout << "macro-F1 mean: climd " << format_double(report.curriculum_mean.macro_f1) << ", baseline "
            << format_double(report.baseline_mean.macro_f1) << "; climd wins " << report.curriculum_wins
            << "/" << report.runs.size() << " seeds\n";
  return 0;
}

// --- pipeline -----------------------------------------------------------------

struct PipelineArgs {
  SimulateArgs sim;
  std::string traces;
  bool synthetic = false;
  bool with_experiment = false;
  std::optional<std::size_t> epochs;
  std::string out;
};

int run_pipeline(PipelineArgs a) {
  if (a.traces.empty() == !a.synthetic) {
    throw ValidationError("pipeline needs exactly one of --traces or --synthetic");
  }
  resolve(a.sim);
  const auto& cfg = a.sim.config;
  const std::size_t epochs = a.epochs.value_or(cfg.train.epochs);
  RunManifest manifest = manifest_for("pipeline");

  std::vector<SampleTrace> traces;
  std::string traces_text;
  if (!a.traces.empty()) {
    traces = stage("read-traces", [&] {
      std::istringstream in(digest_input(manifest, a.traces));
      return read_traces(in, a.traces);
    });
    manifest.config["traces"] = a.traces;
  } else {
    traces = stage("simulate-traces", [&] {
      auto data = simlab::generate_dataset(cfg.data);
      const auto ids = data.ids();
      auto model = simlab::init_model(data.dims, cfg.train.hidden, data.classes, cfg.train.seed);
      const auto warm = simlab::train(std::move(model), data, simlab::Dataset{},
                                      random_baseline_schedule(ids, cfg.train.warmup(), cfg.train.seed),
                                      cfg.train);
      return simlab::collect_traces(warm.model, data);
    });
    traces_text = render(write_traces, traces);
    manifest.config = cfg.describe();
    manifest.seeds = {cfg.train.seed};
  }
  manifest.config["pipeline_epochs"] = std::to_string(epochs);
  manifest.config["pipeline_gamma"] = format_double(cfg.train.gamma);
  manifest.config["pipeline_order"] = std::string(to_string(cfg.order));

  const auto table = stage("score", [&] { return score_dataset(traces, cfg.workers); });
  const auto dist = stage("fit", [&] {
    std::vector<std::size_t> labels;
    for (const auto& rec : table) labels.push_back(rec.label);
    return distribution_from_labels(labels, traces.empty() ? std::nullopt
                                                           : std::optional(traces.front().classes()),
                                    cfg.train.gamma, std::nullopt);
  });
  const auto schedule = stage("schedule", [&] { return build_schedule(table, dist, {epochs, cfg.order}); });
  std::optional<simlab::ExperimentReport> report;
  if (a.with_experiment) {
    report = stage("experiment", [&] { return simlab::run_experiment(cfg); });
  }

  OutputDir out(a.out, manifest);
  if (!traces_text.empty()) out.add("traces.jsonl", traces_text);
  out.add("difficulty.csv", render(write_difficulty_table, table));
  out.add("distribution.csv", render(write_distribution_report, dist));
  add_schedule_files(out, schedule);
  if (report) out.add("report.csv", render(simlab::write_report, *report));
  stage("write", [&] {
    out.commit();
    return 0;
  });
  std::cout << distribution_summary(dist) << "scheduled " << schedule.epochs.size() << " epochs, "
            << schedule.total_visits() << " sample visits -> " << a.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"climd: class-distribution-guided curriculum scheduling"};
  app.set_version_flag("--version", std::string(CLIMD_VERSION));
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit the class-size power law from a labels file");
  fit_cmd->add_option("--labels", fit.labels, "file of sample_id,label lines")->required();
  fit_cmd->add_option("--gamma", fit.gamma, "smoothing gamma")->capture_default_str();
  fit_cmd->add_option("--balanced-alpha", fit.balanced_alpha, "alpha(T) for balanced data (default 1 + 1/gamma)");
  fit_cmd->add_option("--classes", fit.classes, "class count (default: max label + 1)");
  fit_cmd->add_option("--out", fit.out, "output directory (default: report on stdout)");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "compute per-sample difficulty from a trace file");
  score_cmd->add_option("--traces", score.traces, "JSON-lines trace file")->required();
  score_cmd->add_option("--out", score.out, "output directory")->required();
  score_cmd->add_option("--threads", score.threads, "worker threads (0 = all, capped by CLIMD_THREADS)");

  ScheduleArgs sched;
  auto* sched_cmd = app.add_subcommand("schedule", "build per-epoch training subsets");
  sched_cmd->add_option("--difficulty", sched.difficulty, "difficulty.csv from `score`")->required();
  sched_cmd->add_option("--distribution", sched.distribution, "distribution.csv from `fit`")->required();
  sched_cmd->add_option("--epochs,-T", sched.epochs, "total epochs T")->required()->check(CLI::PositiveNumber);
  sched_cmd->add_option("--order", sched.order, "larger-is-easier | smaller-is-easier")->capture_default_str();
  sched_cmd->add_option("--out", sched.out, "output directory")->required();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "curriculum vs. shuffle baseline on synthetic data");
  add_simulation_options(*sim_cmd, sim);
  sim_cmd->add_option("--seeds", sim.config.seeds, "number of seeds")->capture_default_str();
  sim_cmd->add_option("--threads", sim.threads, "parallel seeds (0 = all, capped by CLIMD_THREADS)");
  sim_cmd->add_option("--out", sim.out, "output directory")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "accuracy, weighted F1 and macro F1 of a prediction file");
  eval_cmd->add_option("--predictions", eval.predictions, "file of sample_id,true,pred lines")->required();
  eval_cmd->add_option("--classes", eval.classes, "class count (default: max label + 1)");
  eval_cmd->add_option("--out", eval.out, "optional output directory");

  std::string figure2_out;
  auto* fig_cmd = app.add_subcommand("figure2", "schedule for N=1000, T=10, C=10, alpha(T)=5, gamma=0.3");
  fig_cmd->add_option("--out", figure2_out, "optional output directory");

  PipelineArgs pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "score -> fit -> schedule in one run");
  pipe_cmd->add_option("--traces", pipe.traces, "JSON-lines trace file");
  pipe_cmd->add_flag("--synthetic", pipe.synthetic, "generate data and warm-up traces with the simulation lab");
  pipe_cmd->add_flag("--with-experiment", pipe.with_experiment, "also run the curriculum vs. baseline comparison");
  add_simulation_options(*pipe_cmd, pipe.sim);
  pipe_cmd->add_option("--seeds", pipe.sim.config.seeds, "seeds for --with-experiment")->capture_default_str();
  pipe_cmd->add_option("--threads", pipe.sim.threads, "worker threads");
  pipe_cmd->add_option("--out", pipe.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::validation);
  }

  try {
    if (*fit_cmd) return run_fit(fit);
    if (*score_cmd) return run_score(score);
    if (*sched_cmd) return run_schedule(sched);
    if (*sim_cmd) return run_simulate(sim);
    if (*eval_cmd) return run_eval(eval);
    if (*fig_cmd) return run_figure2(figure2_out);
    if (*pipe_cmd) return run_pipeline(pipe);
  } catch (const Error& e) {
    std::cerr << "climd: error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "climd: error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::validation);
  }
  return static_cast<int>(ExitCode::validation);
}
