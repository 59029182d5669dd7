#include "climd/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "climd/error.hpp"

namespace climd {
namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be > 0");
}

void check_counts(std::span<const std::size_t> counts) {
  if (counts.size() < 2) throw ValidationError("need at least 2 classes");
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw ValidationError("class " + std::to_string(c) + " has no samples");
  }
}

ClassDistribution ranked(std::span<const std::size_t> counts, double gamma) {
  check_counts(counts);
  check_gamma(gamma);
  ClassDistribution dist;
  dist.counts.assign(counts.begin(), counts.end());
  dist.gamma = gamma;
  dist.n_min = *std::min_element(counts.begin(), counts.end());
  dist.class_of_rank.resize(counts.size());
  std::iota(dist.class_of_rank.begin(), dist.class_of_rank.end(), std::size_t{0});
  std::stable_sort(dist.class_of_rank.begin(), dist.class_of_rank.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  dist.rank_of_class.resize(counts.size());
  for (std::size_t r = 0; r < counts.size(); ++r) dist.rank_of_class[dist.class_of_rank[r]] = r + 1;
  return dist;
}

}  // namespace

std::size_t ClassDistribution::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::vector<std::size_t> ClassDistribution::counts_by_rank() const {
  std::vector<std::size_t> out(counts.size());
  for (std::size_t r = 0; r < counts.size(); ++r) out[r] = counts[class_of_rank[r]];
  return out;
}

double powerlaw_pdf(double n, double n_min, double gamma, double alpha) {
  check_gamma(gamma);
  const double k = gamma * alpha;
  if (!(k > 1.0)) throw ValidationError("power law needs gamma * alpha > 1");
  if (!(n_min > 0.0)) throw ValidationError("power law needs n_min > 0");
  if (n < n_min) throw ValidationError("power law evaluated below n_min");
  // In log space so large counts do not overflow n_min^(k-1).
  return (k - 1.0) * std::exp((k - 1.0) * std::log(n_min) - k * std::log(n));
}

double powerlaw_pdf(double n, const ClassDistribution& dist, double alpha) {
  return powerlaw_pdf(n, static_cast<double>(dist.n_min), dist.gamma, alpha);
}

double powerlaw_log_likelihood(std::span<const std::size_t> counts, double gamma, double alpha) {
  check_counts(counts);
  const double k = gamma * alpha;
  if (!(k > 1.0)) throw ValidationError("power law needs gamma * alpha > 1");
  const double log_min = std::log(static_cast<double>(*std::min_element(counts.begin(), counts.end())));
  double ll = 0.0;
  for (std::size_t n : counts) {
    ll += std::log(k - 1.0) + (k - 1.0) * log_min - k * std::log(static_cast<double>(n));
  }
  return ll;
}

std::optional<double> fit_alpha(std::span<const std::size_t> counts, double gamma) {
  check_counts(counts);
  check_gamma(gamma);
  const auto n_min = *std::min_element(counts.begin(), counts.end());
  const double log_min = std::log(static_cast<double>(n_min));
  // Each term is >= 0; summing differences avoids cancellation.
  double denom = 0.0;
  for (std::size_t n : counts) denom += std::log(static_cast<double>(n)) - log_min;
  if (!(denom > 0.0)) return std::nullopt;
  return (1.0 / gamma) * (1.0 + static_cast<double>(counts.size()) / denom);
}

double balanced_fallback_alpha(double gamma) {
  check_gamma(gamma);
  return 1.0 + 1.0 / gamma;
}

ClassDistribution fit_distribution(std::span<const std::size_t> counts, double gamma,
                                   std::optional<double> balanced_alpha) {
  ClassDistribution dist = ranked(counts, gamma);
  dist.alpha_hat = fit_alpha(counts, gamma);
  dist.alpha_cap = dist.alpha_hat ? *dist.alpha_hat : balanced_alpha.value_or(balanced_fallback_alpha(gamma));
  if (!(dist.alpha_cap >= 1.0)) throw ValidationError("balanced fallback alpha must be >= 1");
  return dist;
}

ClassDistribution distribution_with_alpha(std::span<const std::size_t> counts, double gamma,
                                          double alpha_cap) {
  if (!(alpha_cap >= 1.0) || !std::isfinite(alpha_cap)) throw ValidationError("alpha(T) must be >= 1");
  ClassDistribution dist = ranked(counts, gamma);
  dist.alpha_hat = alpha_cap;
  dist.alpha_cap = alpha_cap;
  return dist;
}

double alpha_schedule(std::size_t epoch, std::size_t epochs, double alpha_cap) {
  if (epochs == 0 || epoch < 1 || epoch > epochs) throw ValidationError("epoch outside [1, T]");
  if (!(alpha_cap >= 1.0)) throw ValidationError("alpha(T) must be >= 1");
  if (epochs == 1) return alpha_cap;
  const double frac = static_cast<double>(epoch - 1) / static_cast<double>(epochs - 1);
  return std::clamp(1.0 + (alpha_cap - 1.0) * frac, 1.0, alpha_cap);
}

std::size_t subset_size(std::size_t epoch, std::size_t epochs, std::size_t total) {
  if (epochs == 0 || epoch < 1 || epoch > epochs) throw ValidationError("epoch outside [1, T]");
  return (2 * epoch * total + epochs) / (2 * epochs);
}

std::vector<double> powerlaw_rank_probabilities(std::size_t classes, double exponent) {
  std::vector<double> p(classes);
  double sum = 0.0;
  for (std::size_t i = 0; i < classes; ++i) {
    p[i] = std::pow(static_cast<double>(i + 1), -exponent);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

EpochTarget epoch_target(std::size_t epoch, std::size_t epochs, std::size_t total,
                         const ClassDistribution& dist) {
  const std::size_t c = dist.classes();
  if (c == 0) throw ValidationError("empty class distribution");
  EpochTarget target;
  target.epoch = epoch;
  target.alpha = alpha_schedule(epoch, epochs, dist.alpha_cap);
  target.subset_size = subset_size(epoch, epochs, total);
  const double mix = epochs == 1 ? 1.0
                                 : static_cast<double>(epoch - 1) / static_cast<double>(epochs - 1);
  const auto law = powerlaw_rank_probabilities(c, dist.gamma * target.alpha);
  target.q.resize(c);
  const double uniform = 1.0 / static_cast<double>(c);
  for (std::size_t i = 0; i < c; ++i) target.q[i] = (1.0 - mix) * uniform + mix * law[i];
  return target;
}

std::vector<std::size_t> count_labels(std::span<const std::size_t> labels,
                                      std::optional<std::size_t> classes) {
  std::size_t c = classes.value_or(0);
  if (!classes) {
    for (std::size_t l : labels) c = std::max(c, l + 1);
  }
  std::vector<std::size_t> counts(c, 0);
  for (std::size_t l : labels) {
    if (l >= c) throw ValidationError("label " + std::to_string(l) + " out of range");
    ++counts[l];
  }
  return counts;
}

}  // namespace climd
