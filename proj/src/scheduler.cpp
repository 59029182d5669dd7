#include "climd/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "climd/error.hpp"
#include "climd/format.hpp"
#include "climd/manifest.hpp"

namespace climd {
namespace {

// Floors plus one extra unit for the largest fractional parts; ties go to
// the lower index.
std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size(), 0);
  if (weights.empty() || total == 0) return counts;
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = sum > 0.0 ? static_cast<double>(total) * weights[i] / sum
                                   : static_cast<double>(total) / static_cast<double>(weights.size());
    const double fl = std::floor(quota);
    counts[i] = static_cast<std::size_t>(fl);
    remainder[i] = quota - fl;
    assigned += counts[i];
  }
  // Floating-point quotas can overshoot by a unit in pathological cases.
  while (assigned > total) {
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    ++counts[order[k]];
    ++assigned;
  }
  return counts;
}

void check_unique_ids(const DifficultyTable& table) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(table.size());
  for (const auto& rec : table) {
    if (!seen.insert(rec.sample_id).second) {
      throw ValidationError("duplicate sample_id in difficulty table: " + rec.sample_id);
    }
  }
}

std::string schedule_config_text(const ClassDistribution& dist, const ScheduleConfig& config,
                                 std::size_t samples) {
  std::string text = "climd-schedule;epochs=" + std::to_string(config.epochs) +
                     ";order=" + std::string(to_string(config.order)) +
                     ";gamma=" + format_double(dist.gamma) +
                     ";alpha_cap=" + format_double(dist.alpha_cap) +
                     ";samples=" + std::to_string(samples) + ";counts=";
  for (std::size_t c = 0; c < dist.counts.size(); ++c) {
    if (c) text += ' ';
    text += std::to_string(dist.counts[c]);
  }
  return text;
}

}  // namespace

std::string_view to_string(DifficultyOrder order) {
  return order == DifficultyOrder::larger_is_easier ? "larger-is-easier" : "smaller-is-easier";
}

DifficultyOrder parse_difficulty_order(std::string_view text) {
  if (text == "larger-is-easier") return DifficultyOrder::larger_is_easier;
  if (text == "smaller-is-easier") return DifficultyOrder::smaller_is_easier;
  throw ValidationError("unknown difficulty order '" + std::string(text) +
                        "' (expected larger-is-easier or smaller-is-easier)");
}

std::span<const std::string> EpochPlan::class_slice(std::size_t rank) const {
  if (rank < 1 || rank > counts.size()) throw ValidationError("rank out of range");
  std::size_t offset = 0;
  for (std::size_t r = 0; r + 1 < rank; ++r) offset += counts[r];
  return std::span<const std::string>(samples).subspan(offset, counts[rank - 1]);
}

std::size_t Schedule::total_visits() const {
  std::size_t n = 0;
  for (const auto& e : epochs) n += e.total();
  return n;
}

std::vector<ClassQueue> build_queues(const DifficultyTable& table, const ClassDistribution& dist,
                                     DifficultyOrder order) {
  const std::size_t c = dist.classes();
  std::vector<std::vector<const DifficultyRecord*>> by_class(c);
  for (const auto& rec : table) {
    if (rec.label >= c) {
      throw ValidationError("sample " + rec.sample_id + " has class " + std::to_string(rec.label) +
                            " not present in the distribution");
    }
    by_class[rec.label].push_back(&rec);
  }
  const bool larger_first = order == DifficultyOrder::larger_is_easier;
  std::vector<ClassQueue> queues(c);
  for (std::size_t rank = 1; rank <= c; ++rank) {
    const std::size_t cls = dist.class_of_rank[rank - 1];
    auto& members = by_class[cls];
    std::sort(members.begin(), members.end(), [&](const DifficultyRecord* a, const DifficultyRecord* b) {
      if (a->r != b->r) return larger_first ? a->r > b->r : a->r < b->r;
      return a->sample_id < b->sample_id;
    });
    ClassQueue& q = queues[rank - 1];
    q.class_id = cls;
    q.rank = rank;
    q.samples.reserve(members.size());
    for (const auto* rec : members) q.samples.push_back(rec->sample_id);
  }
  return queues;
}

std::vector<std::size_t> apportion(std::span<const double> q, std::size_t total,
                                   std::span<const std::size_t> caps) {
  if (q.size() != caps.size()) throw ValidationError("apportion: q and caps differ in length");
  double qsum = 0.0;
  for (double v : q) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("apportion: negative or non-finite weight");
    qsum += v;
  }
  if (!q.empty() && std::abs(qsum - 1.0) > 1e-9) throw ValidationError("apportion: q does not sum to 1");
  const std::size_t capacity = std::accumulate(caps.begin(), caps.end(), std::size_t{0});
  if (total > capacity) {
    throw InfeasibleError("cannot draw " + std::to_string(total) + " samples from " +
                          std::to_string(capacity) + " available");
  }

  std::vector<std::size_t> counts(q.size(), 0);
  std::vector<bool> clamped(q.size(), false);
  std::size_t remaining = total;
  while (true) {
    std::vector<std::size_t> open;
    std::vector<double> weights;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (!clamped[i]) {
        open.push_back(i);
        weights.push_back(q[i]);
      }
    }
    const auto split = largest_remainder(weights, remaining);
    bool overflow = false;
    for (std::size_t k = 0; k < open.size(); ++k) {
      if (split[k] > caps[open[k]]) overflow = true;
    }
    if (!overflow) {
      for (std::size_t k = 0; k < open.size(); ++k) counts[open[k]] = split[k];
      return counts;
    }
    for (std::size_t k = 0; k < open.size(); ++k) {
      const std::size_t i = open[k];
      if (split[k] > caps[i]) {
        clamped[i] = true;
        counts[i] = caps[i];
        remaining -= caps[i];
      }
    }
  }
}

Schedule build_schedule(const DifficultyTable& table, const ClassDistribution& dist,
                        const ScheduleConfig& config) {
  if (config.epochs == 0) throw ValidationError("schedule needs at least one epoch");
  if (table.empty()) throw ValidationError("cannot schedule an empty dataset");
  check_unique_ids(table);
  const auto queues = build_queues(table, dist, config.order);
  std::vector<std::size_t> caps(queues.size());
  for (std::size_t r = 0; r < queues.size(); ++r) {
    caps[r] = queues[r].samples.size();
    if (caps[r] != dist.counts[queues[r].class_id]) {
      throw ValidationError("class " + std::to_string(queues[r].class_id) + " has " +
                            std::to_string(caps[r]) + " scored samples but the distribution lists " +
                            std::to_string(dist.counts[queues[r].class_id]));
    }
  }

  const std::size_t n = table.size();
  Schedule schedule;
  schedule.class_of_rank = dist.class_of_rank;
  schedule.provenance.alpha_hat = dist.alpha_hat;
  schedule.provenance.alpha_cap = dist.alpha_cap;
  schedule.provenance.gamma = dist.gamma;
  schedule.provenance.config_digest = sha256_hex(schedule_config_text(dist, config, n));
  schedule.epochs.reserve(config.epochs);
  for (std::size_t t = 1; t <= config.epochs; ++t) {
    const EpochTarget target = epoch_target(t, config.epochs, n, dist);
    EpochPlan plan;
    plan.epoch = t;
    plan.alpha = target.alpha;
    plan.q = target.q;
    plan.counts = t == config.epochs ? caps : apportion(target.q, target.subset_size, caps);
    plan.samples.reserve(t == config.epochs ? n : target.subset_size);
    for (std::size_t r = 0; r < queues.size(); ++r) {
      const auto& src = queues[r].samples;
      plan.samples.insert(plan.samples.end(), src.begin(),
                          src.begin() + static_cast<std::ptrdiff_t>(plan.counts[r]));
    }
    schedule.epochs.push_back(std::move(plan));
  }
  return schedule;
}

Schedule random_baseline_schedule(std::span<const std::string> sample_ids, std::size_t epochs,
                                  std::uint64_t seed) {
  Schedule schedule;
  schedule.provenance.seed = seed;
  schedule.provenance.config_digest =
      sha256_hex("climd-shuffle;epochs=" + std::to_string(epochs) + ";seed=" + std::to_string(seed) +
                 ";samples=" + std::to_string(sample_ids.size()));
  std::mt19937_64 rng(seed);
  for (std::size_t t = 1; t <= epochs; ++t) {
    EpochPlan plan;
    plan.epoch = t;
    plan.samples.assign(sample_ids.begin(), sample_ids.end());
    std::shuffle(plan.samples.begin(), plan.samples.end(), rng);
    schedule.epochs.push_back(std::move(plan));
  }
  return schedule;
}

Schedule budget_matched_baseline(std::span<const std::string> sample_ids, std::size_t visits,
                                 std::uint64_t seed) {
  if (sample_ids.empty()) throw ValidationError("cannot schedule an empty dataset");
  const std::size_t n = sample_ids.size();
  Schedule schedule = random_baseline_schedule(sample_ids, (visits + n - 1) / n, seed);
  const std::size_t tail = visits % n;
  if (tail != 0) schedule.epochs.back().samples.resize(tail);
  return schedule;
}

}  // namespace climd
