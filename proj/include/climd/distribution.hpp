#pragma once

// Power-law model of the class-size distribution and the epoch-indexed
// sampling targets derived from it.
//
// Class sizes n are modelled by the density
//
//   P(n) = (g a - 1) n_min^(g a - 1) n^(-g a),   n >= n_min, g a > 1,
//
// with smoothing g (gamma) and imbalance parameter a (alpha). The maximum
// likelihood estimate over the C class counts has the closed form
//
//   a_hat = (1 / g) (1 + C / (sum_c ln n_c - C ln n_min)).
//
// Over T epochs the exponent ramps linearly from 1 to a(T) = a_hat, and the
// per-rank sampling probability moves from uniform to the normalized power
// law c^(-g a(t)) over class ranks.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace climd {

inline constexpr double kDefaultGamma = 0.3;

struct ClassDistribution {
  std::vector<std::size_t> counts;         // by class id
  std::vector<std::size_t> rank_of_class;  // by class id, 1 = largest class
  std::vector<std::size_t> class_of_rank;  // index rank - 1
  std::size_t n_min = 0;
  double gamma = kDefaultGamma;
  std::optional<double> alpha_hat;  // nullopt: all classes equal in size
  double alpha_cap = 1.0;           // a(T); alpha_hat or the balanced fallback

  std::size_t classes() const { return counts.size(); }
  std::size_t total() const;
  bool degenerate_balanced() const { return !alpha_hat.has_value(); }
  std::size_t count_at_rank(std::size_t rank) const { return counts[class_of_rank[rank - 1]]; }
  std::vector<std::size_t> counts_by_rank() const;
};

struct EpochTarget {
  std::size_t epoch = 1;
  double alpha = 1.0;
  std::vector<double> q;  // index rank - 1
  std::size_t subset_size = 0;
};

/// (g a - 1) n_min^(g a - 1) n^(-g a). Throws ValidationError when n < n_min or g a <= 1.
double powerlaw_pdf(double n, double n_min, double gamma, double alpha);
double powerlaw_pdf(double n, const ClassDistribution& dist, double alpha);

/// Sum over classes of ln powerlaw_pdf(n_c).
double powerlaw_log_likelihood(std::span<const std::size_t> counts, double gamma, double alpha);

/// Closed-form MLE; nullopt when every count equals n_min.
std::optional<double> fit_alpha(std::span<const std::size_t> counts, double gamma);

/// a used when the data is balanced: 1 + 1 / g.
double balanced_fallback_alpha(double gamma);

/// Ranks classes by descending count (ties: ascending class id) and fits
/// alpha. `balanced_alpha` overrides the fallback for degenerate data.
ClassDistribution fit_distribution(std::span<const std::size_t> counts, double gamma,
                                   std::optional<double> balanced_alpha = std::nullopt);

/// Same ranking, with a(T) given rather than fitted.
ClassDistribution distribution_with_alpha(std::span<const std::size_t> counts, double gamma,
                                          double alpha_cap);

/// 1 + (alpha_cap - 1)(t - 1)/(T - 1); alpha_cap when T == 1.
double alpha_schedule(std::size_t epoch, std::size_t epochs, double alpha_cap);

/// round(t N / T), halves rounded up.
std::size_t subset_size(std::size_t epoch, std::size_t epochs, std::size_t total);

/// Normalized c^(-exponent) over ranks 1..classes.
std::vector<double> powerlaw_rank_probabilities(std::size_t classes, double exponent);

EpochTarget epoch_target(std::size_t epoch, std::size_t epochs, std::size_t total,
                         const ClassDistribution& dist);

/// Per-class counts from integer labels in [0, C); C = max label + 1 unless given.
std::vector<std::size_t> count_labels(std::span<const std::size_t> labels,
                                      std::optional<std::size_t> classes = std::nullopt);

}  // namespace climd
