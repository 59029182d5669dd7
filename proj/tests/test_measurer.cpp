#include <cmath>
#include <random>
#include <vector>

#include "climd/error.hpp"
#include "climd/measurer.hpp"
#include "doctest.h"

using namespace climd;

namespace {

SampleTrace two_modality(std::string id, std::size_t label, std::vector<double> p1, std::vector<double> p2,
                         std::vector<double> e1, std::vector<double> e2) {
  SampleTrace t;
  t.sample_id = std::move(id);
  t.label = label;
  t.modalities = {{std::move(p1), std::move(e1)}, {std::move(p2), std::move(e2)}};
  return t;
}

}  // namespace

// Reference values evaluated at 30 significant digits.
TEST_CASE("confidence matches the high-precision reference") {
  const std::vector<double> probs{0.5, 0.3, 0.2};
  CHECK(intra_modal_confidence(probs, 0) == doctest::Approx(0.442493334024442103).epsilon(1e-15));
  CHECK(intra_modal_confidence(std::vector<double>{1.0, 0.0, 0.0}, 0) == 0.5);
  CHECK(intra_modal_confidence(std::vector<double>{0.0, 1.0}, 0) ==
        doctest::Approx(9.99999000000999999e-7).epsilon(1e-12));
  // Anything below the floor scores as the floor.
  CHECK(intra_modal_confidence(std::vector<double>{1e-15, 1.0 - 1e-15}, 0) ==
        intra_modal_confidence(std::vector<double>{0.0, 1.0}, 0));
}

TEST_CASE("confidence is monotone and bounded") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double psi_lo = intra_modal_confidence(std::vector<double>{lo, 1 - lo}, 0);
    const double psi_hi = intra_modal_confidence(std::vector<double>{hi, 1 - hi}, 0);
    CHECK(psi_lo > 0.0);
    CHECK(psi_hi <= 0.5);
    CHECK(psi_lo <= psi_hi);
  }
}

TEST_CASE("invalid probability vectors are rejected") {
  CHECK_THROWS_AS(validate_probabilities(std::vector<double>{1.0}), ValidationError);
  CHECK_THROWS_AS(validate_probabilities(std::vector<double>{0.6, 0.6}), ValidationError);
  CHECK_THROWS_AS(validate_probabilities(std::vector<double>{1.2, -0.2}), ValidationError);
  CHECK_THROWS_AS(validate_probabilities(std::vector<double>{NAN, 1.0}), ValidationError);
  CHECK_NOTHROW(validate_probabilities(std::vector<double>{0.5, 0.5 + 5e-7}));
  CHECK_THROWS_AS(intra_modal_confidence(std::vector<double>{0.5, 0.5}, 2), ValidationError);
}

TEST_CASE("cosine similarity") {
  using V = std::vector<double>;
  CHECK(pairwise_similarity(V{3, 4}, V{3, 4}) == doctest::Approx(1.0));
  CHECK(pairwise_similarity(V{1, 0}, V{0, 1}) == 0.0);
  CHECK(pairwise_similarity(V{1, 2}, V{2, 1}) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(pairwise_similarity(V{1, 2}, V{2e6, 1e6}) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(pairwise_similarity(V{0, 0}, V{1, 0}), ValidationError);
  CHECK_THROWS_AS(pairwise_similarity(V{1, 0}, V{1, 0, 0}), ValidationError);
}

TEST_CASE("complementarity endpoints") {
  using V = std::vector<double>;
  CHECK(complementarity(std::vector<V>{{1, 1}, {1, 1}}) == doctest::Approx(0.0));
  CHECK(complementarity(std::vector<V>{{1, 0}, {0, 1}}) == 1.0);
  CHECK(complementarity(std::vector<V>{{1, 0}, {-1, 0}}) == 2.0);
  CHECK_THROWS_AS(complementarity(std::vector<V>{{1, 0}}), ValidationError);
  // Three modalities: two aligned, one orthogonal. Pairs: 1, 0, 0.
  CHECK(complementarity(std::vector<V>{{1, 0}, {2, 0}, {0, 1}}) == doctest::Approx(1.0 - 2.0 / 6.0));
}

TEST_CASE("score_sample composes the parts") {
  const auto r1 = score_sample(two_modality("a", 0, {1, 0}, {1, 0}, {1, 1}, {1, 1}));
  CHECK(r1.psi == std::vector<double>{0.5, 0.5});
  CHECK(r1.phi == doctest::Approx(0.0));
  CHECK(r1.r == doctest::Approx(0.5));

  const auto r2 = score_sample(two_modality("b", 1, {0, 1}, {0, 1}, {1, 0}, {0, 1}));
  CHECK(r2.r == 1.5);

  const auto r3 =
      score_sample(two_modality("c", 0, {0.5, 0.3, 0.2}, {0.5, 0.3, 0.2}, {1, 2}, {2, 1}));
  CHECK(r3.phi == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(r3.r == doctest::Approx(0.642493334024442103).epsilon(1e-15));
  CHECK(r3.sample_id == "c");
  CHECK(r3.label == 0);
}

TEST_CASE("trace validation") {
  auto t = two_modality("a", 0, {1, 0}, {1, 0}, {1, 1}, {1, 1});
  t.modalities.pop_back();
  CHECK_THROWS_AS(score_sample(t), ValidationError);

  auto mixed = two_modality("a", 0, {1, 0}, {1, 0, 0}, {1, 1}, {1, 1});
  CHECK_THROWS_AS(score_sample(mixed), ValidationError);

  auto bad_label = two_modality("a", 2, {1, 0}, {1, 0}, {1, 1}, {1, 1});
  CHECK_THROWS_AS(score_sample(bad_label), ValidationError);

  auto zero = two_modality("a", 0, {1, 0}, {1, 0}, {0, 0}, {1, 1});
  CHECK_THROWS_AS(score_sample(zero), ValidationError);
}

TEST_CASE("score_dataset checks ids and class counts") {
  std::vector<SampleTrace> traces{two_modality("a", 0, {1, 0}, {1, 0}, {1, 1}, {1, 0}),
                                  two_modality("a", 1, {0, 1}, {0, 1}, {1, 1}, {1, 0})};
  CHECK_THROWS_WITH_AS(score_dataset(traces), doctest::Contains("duplicate"), ValidationError);
  traces[1] = two_modality("b", 1, {0, 0, 1}, {0, 0, 1}, {1, 1}, {1, 0});
  CHECK_THROWS_AS(score_dataset(traces), ValidationError);
}

TEST_CASE("parallel scoring equals sequential scoring") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::normal_distribution<double> g;
  std::vector<SampleTrace> traces;
  for (int i = 0; i < 257; ++i) {
    SampleTrace t;
    t.sample_id = "s" + std::to_string(i);
    t.label = static_cast<std::size_t>(i % 4);
    for (int m = 0; m < 3; ++m) {
      std::vector<double> p(4);
      double sum = 0;
      for (auto& x : p) sum += (x = u(rng));
      for (auto& x : p) x /= sum;
      std::vector<double> e(5);
      for (auto& x : e) x = g(rng);
      t.modalities.push_back({p, e});
    }
    traces.push_back(std::move(t));
  }
  const auto seq = score_dataset(traces, 1);
  const auto par = score_dataset(traces, 4);
  REQUIRE(seq.size() == par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].sample_id == par[i].sample_id);
    CHECK(seq[i].r == par[i].r);
    CHECK(seq[i].phi == par[i].phi);
    CHECK(seq[i].psi == par[i].psi);
  }
}
