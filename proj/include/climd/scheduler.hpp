#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "climd/distribution.hpp"
#include "climd/measurer.hpp"

namespace climd {

/// Which end of the difficulty scale counts as easy.
enum class DifficultyOrder {
  larger_is_easier,  // default: confident, complementary samples first
  smaller_is_easier,
};

std::string_view to_string(DifficultyOrder order);
DifficultyOrder parse_difficulty_order(std::string_view text);

/// Samples of one class, easy to hard; ties broken by sample id.
struct ClassQueue {
  std::size_t class_id = 0;
  std::size_t rank = 0;
  std::vector<std::string> samples;
};

struct EpochPlan {
  std::size_t epoch = 1;
  double alpha = 1.0;
  std::vector<double> q;              // by rank; empty for the shuffle baseline
  std::vector<std::size_t> counts;    // by rank; empty for the shuffle baseline
  std::vector<std::string> samples;   // rank order, then queue order

  std::size_t total() const { return samples.size(); }
  /// Samples drawn from the class at `rank` (1-based).
  std::span<const std::string> class_slice(std::size_t rank) const;
};

struct ScheduleProvenance {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::optional<double> alpha_hat;
  double alpha_cap = 1.0;
  double gamma = kDefaultGamma;
};

struct Schedule {
  std::vector<EpochPlan> epochs;
  std::vector<std::size_t> class_of_rank;  // empty for the shuffle baseline
  ScheduleProvenance provenance;

  std::size_t total_visits() const;
};

struct ScheduleConfig {
  std::size_t epochs = 100;
  DifficultyOrder order = DifficultyOrder::larger_is_easier;
};

/// One queue per class, returned in rank order.
std::vector<ClassQueue> build_queues(const DifficultyTable& table, const ClassDistribution& dist,
                                     DifficultyOrder order);

/// Largest-remainder split of `total` proportional to `q`, with any class
/// over its cap clamped and the rest re-split among the others. Throws
/// InfeasibleError when total > sum(caps).
std::vector<std::size_t> apportion(std::span<const double> q, std::size_t total,
                                   std::span<const std::size_t> caps);

/// Per-epoch subsets ramping from class-uniform to the fitted long tail.
/// The final epoch always contains every sample exactly once.
Schedule build_schedule(const DifficultyTable& table, const ClassDistribution& dist,
                        const ScheduleConfig& config);

/// Every epoch an independent uniform shuffle of all samples.
Schedule random_baseline_schedule(std::span<const std::string> sample_ids, std::size_t epochs,
                                  std::uint64_t seed);

/// Shuffle baseline with exactly `visits` sample visits: ceil(visits / N)
/// epochs, the last one truncated.
Schedule budget_matched_baseline(std::span<const std::string> sample_ids, std::size_t visits,
                                 std::uint64_t seed);

}  // namespace climd
