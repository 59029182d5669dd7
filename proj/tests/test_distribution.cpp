#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "climd/distribution.hpp"
#include "climd/error.hpp"
#include "doctest.h"

using namespace climd;

namespace {

using Counts = std::vector<std::size_t>;

// Brute-force maximizer of the log-likelihood on a 1e-3 grid above 1/gamma.
double grid_alpha(const Counts& counts, double gamma) {
  const double c = static_cast<double>(counts.size());
  double sum_log = 0.0, log_min = std::log(static_cast<double>(*std::min_element(counts.begin(), counts.end())));
  for (auto n : counts) sum_log += std::log(static_cast<double>(n));
  double best = -INFINITY, arg = 0.0;
  for (int i = 1; i <= 1'000'000; ++i) {
    const double alpha = 1.0 / gamma + i * 1e-3;
    const double k = gamma * alpha;
    const double ll = c * std::log(k - 1.0) + (k - 1.0) * c * log_min - k * sum_log;
    if (ll > best) best = ll, arg = alpha;
  }
  return arg;
}

// Integral of the density over [n_min, inf) via n = n_min e^s and Simpson's rule on s.
double integrate_pdf(double n_min, double gamma, double alpha) {
  const double k = gamma * alpha;
  const double upper = 30.0 / (k - 1.0);  // tail mass e^-30
  const int steps = 20000;
  const double h = upper / steps;
  auto f = [&](double s) {
    const double n = n_min * std::exp(s);
    return powerlaw_pdf(n, n_min, gamma, alpha) * n;
  };
  double acc = f(0.0) + f(upper);
  for (int i = 1; i < steps; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("density values") {
  CHECK(powerlaw_pdf(7.0, 7.0, 0.5, 4.0) == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
  CHECK(powerlaw_pdf(10.0, 10.0, 0.3, 5.0) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(powerlaw_pdf(5.0, 2.0, 0.3, 1.0 / 0.3 + 1e-9) < 1e-8);
  CHECK_THROWS_AS(powerlaw_pdf(1.0, 2.0, 0.3, 5.0), ValidationError);
  CHECK_THROWS_AS(powerlaw_pdf(3.0, 2.0, 0.3, 3.0), ValidationError);
}

TEST_CASE("density integrates to one") {
  for (double alpha : {3.5, 4.0, 5.0, 8.0, 20.0}) {
    for (double n_min : {1.0, 10.0, 250.0}) {
      CAPTURE(alpha);
      CAPTURE(n_min);
      CHECK(std::abs(integrate_pdf(n_min, 0.3, alpha) - 1.0) < 1e-6);
    }
  }
}

// Reference values evaluated at 30 significant digits.
TEST_CASE("closed-form fit") {
  CHECK(*fit_alpha(Counts{100, 50, 10}, 0.3) == doctest::Approx(5.88955551968664788).epsilon(1e-14));
  CHECK(*fit_alpha(Counts{1000, 1}, 0.3) == doctest::Approx(4.29843218200722628).epsilon(1e-14));
  CHECK_FALSE(fit_alpha(Counts{4, 4, 4}, 0.3).has_value());
  CHECK_THROWS_AS(fit_alpha(Counts{4}, 0.3), ValidationError);
  CHECK_THROWS_AS(fit_alpha(Counts{4, 0}, 0.3), ValidationError);
  CHECK_THROWS_AS(fit_alpha(Counts{4, 2}, 0.0), ValidationError);
}

TEST_CASE("closed-form fit matches grid search") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> classes(3, 20), size(1, 10000);
  for (int trial = 0; trial < 10; ++trial) {
    Counts counts(classes(rng));
    for (auto& n : counts) n = size(rng);
    const auto alpha = fit_alpha(counts, 0.3);
    REQUIRE(alpha.has_value());
    CHECK(*alpha > 1.0 / 0.3);
    CHECK(std::abs(*alpha - grid_alpha(counts, 0.3)) <= 2e-3);
  }
}

TEST_CASE("log-likelihood peaks at the fitted alpha") {
  const Counts counts{300, 120, 40, 9};
  const double a = *fit_alpha(counts, 0.3);
  const double at = powerlaw_log_likelihood(counts, 0.3, a);
  CHECK(at > powerlaw_log_likelihood(counts, 0.3, a - 0.01));
  CHECK(at > powerlaw_log_likelihood(counts, 0.3, a + 0.01));
}

TEST_CASE("ranking and fallback") {
  const auto d = fit_distribution(Counts{5, 20, 20, 1}, 0.3);
  CHECK(d.class_of_rank == Counts{1, 2, 0, 3});
  CHECK(d.rank_of_class == Counts{3, 1, 2, 4});
  CHECK(d.counts_by_rank() == Counts{20, 20, 5, 1});
  CHECK(d.n_min == 1);
  CHECK(d.total() == 46);
  CHECK(d.alpha_cap == *d.alpha_hat);

  const auto flat = fit_distribution(Counts{8, 8, 8}, 0.3);
  CHECK(flat.degenerate_balanced());
  CHECK(flat.alpha_cap == doctest::Approx(1.0 + 1.0 / 0.3));
  CHECK(fit_distribution(Counts{8, 8}, 0.3, 2.5).alpha_cap == 2.5);
  CHECK(balanced_fallback_alpha(0.5) == 3.0);
}

TEST_CASE("alpha ramp") {
  CHECK(alpha_schedule(1, 10, 5.0) == 1.0);
  CHECK(alpha_schedule(10, 10, 5.0) == 5.0);
  CHECK(alpha_schedule(5, 10, 5.0) == doctest::Approx(1.0 + 4.0 * 4.0 / 9.0).epsilon(1e-15));
  CHECK(alpha_schedule(1, 1, 3.0) == 3.0);
  for (std::size_t t = 1; t < 20; ++t) CHECK(alpha_schedule(t, 20, 4.0) <= alpha_schedule(t + 1, 20, 4.0));
  CHECK_THROWS_AS(alpha_schedule(0, 10, 5.0), ValidationError);
  CHECK_THROWS_AS(alpha_schedule(11, 10, 5.0), ValidationError);
}

TEST_CASE("subset sizes round halves up") {
  CHECK(subset_size(1, 10, 1000) == 100);
  CHECK(subset_size(10, 10, 1000) == 1000);
  CHECK(subset_size(1, 4, 10) == 3);  // 2.5
  CHECK(subset_size(1, 3, 10) == 3);  // 3.33
  CHECK(subset_size(2, 3, 10) == 7);  // 6.67
  CHECK(subset_size(1, 1, 17) == 17);
}

TEST_CASE("epoch targets") {
  const auto dist = distribution_with_alpha(Counts{10, 50, 100, 20, 5, 7, 8, 9, 11, 12}, 0.3, 5.0);
  const auto first = epoch_target(1, 10, 1000, dist);
  for (double q : first.q) CHECK(q == 0.1);
  CHECK(first.subset_size == 100);

  const auto last = epoch_target(10, 10, 1000, dist);
  const auto law = powerlaw_rank_probabilities(10, 1.5);
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(last.q[i] - law[i]) <= 1e-12);
  CHECK(last.q[0] == doctest::Approx(0.501168601554161658).epsilon(1e-14));
  CHECK(last.alpha == 5.0);

  for (std::size_t t = 1; t <= 10; ++t) {
    const auto target = epoch_target(t, 10, 1000, dist);
    CHECK(std::abs(std::accumulate(target.q.begin(), target.q.end(), 0.0) - 1.0) <= 1e-12);
    for (std::size_t i = 1; i < target.q.size(); ++i) CHECK(target.q[i] <= target.q[i - 1]);
  }
}

TEST_CASE("label counting") {
  const std::vector<std::size_t> labels{0, 2, 2, 1, 2};
  CHECK(count_labels(labels) == Counts{1, 1, 3});
  CHECK(count_labels(labels, 4) == Counts{1, 1, 3, 0});
  CHECK_THROWS_AS(count_labels(labels, 2), ValidationError);
}
