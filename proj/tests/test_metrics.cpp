#include <algorithm>
#include <random>
#include <vector>

#include "climd/error.hpp"
#include "climd/metrics.hpp"
#include "doctest.h"

using namespace climd;

using Labels = std::vector<std::size_t>;

TEST_CASE("confusion counts") {
  const auto cm = confusion(Labels{0, 0, 1}, Labels{0, 1, 1}, 2);
  CHECK(cm.at(0, 0) == 1);
  CHECK(cm.at(0, 1) == 1);
  CHECK(cm.at(1, 0) == 0);
  CHECK(cm.at(1, 1) == 1);
  CHECK(cm.support(0) == 2);
  CHECK(cm.predicted(1) == 2);
  CHECK(cm.total() == 3);
  CHECK(confusion(Labels{}, Labels{}, 3).total() == 0);
  CHECK_THROWS_AS(confusion(Labels{0}, Labels{0, 1}, 2), ValidationError);
  CHECK_THROWS_AS(confusion(Labels{2}, Labels{0}, 2), ValidationError);
}

TEST_CASE("hand-computed example") {
  const auto m = summarize(confusion(Labels{0, 0, 1}, Labels{0, 1, 1}, 2));
  CHECK(std::abs(m.accuracy - 2.0 / 3.0) <= 1e-12);
  CHECK(std::abs(m.macro_f1 - 2.0 / 3.0) <= 1e-12);
  CHECK(std::abs(m.weighted_f1 - 2.0 / 3.0) <= 1e-12);
}

TEST_CASE("perfect predictions") {
  const Labels y{0, 1, 2, 2, 1};
  const auto m = summarize(confusion(y, y, 3));
  CHECK(m.accuracy == 1.0);
  CHECK(m.macro_f1 == 1.0);
  CHECK(m.weighted_f1 == 1.0);
}

TEST_CASE("absent classes") {
  // Class 2 never occurs and is never predicted: F1 0, zero weight.
  const auto cm = confusion(Labels{0, 1, 1}, Labels{0, 1, 1}, 3);
  CHECK(per_class_f1(cm) == std::vector<double>{1.0, 1.0, 0.0});
  CHECK(macro_f1(cm) == doctest::Approx(2.0 / 3.0));
  CHECK(weighted_f1(cm) == 1.0);
}

TEST_CASE("empty matrix has no metrics") {
  ConfusionMatrix cm(2);
  CHECK_THROWS_AS(accuracy(cm), ValidationError);
  CHECK_THROWS_AS(macro_f1(cm), ValidationError);
  CHECK_THROWS_AS(weighted_f1(cm), ValidationError);
}

TEST_CASE("invariance properties") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::size_t> label(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    Labels y(60), p(60);
    for (auto& v : y) v = label(rng);
    for (auto& v : p) v = label(rng);
    const auto base = summarize(confusion(y, p, 4));
    CHECK(base.accuracy >= 0.0);
    CHECK(base.accuracy <= 1.0);
    CHECK(base.macro_f1 <= 1.0);
    CHECK(base.weighted_f1 <= 1.0);

    std::vector<std::size_t> order(60);
    for (std::size_t i = 0; i < 60; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    Labels ys, ps;
    for (auto i : order) ys.push_back(y[i]), ps.push_back(p[i]);
    const auto shuffled = summarize(confusion(ys, ps, 4));
    CHECK(shuffled.accuracy == base.accuracy);
    CHECK(shuffled.macro_f1 == base.macro_f1);

    const Labels perm{2, 0, 3, 1};
    for (auto& v : ys) v = perm[v];
    for (auto& v : ps) v = perm[v];
    const auto relabeled = summarize(confusion(ys, ps, 4));
    CHECK(relabeled.accuracy == base.accuracy);
    CHECK(relabeled.macro_f1 == doctest::Approx(base.macro_f1).epsilon(1e-15));
  }
}

TEST_CASE("weighted equals macro on balanced supports") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> label(0, 4);
  for (int trial = 0; trial < 30; ++trial) {
    Labels y, p;
    for (std::size_t c = 0; c < 5; ++c) {
      for (int k = 0; k < 20; ++k) y.push_back(c), p.push_back(label(rng));
    }
    const auto cm = confusion(y, p, 5);
    CHECK(std::abs(weighted_f1(cm) - macro_f1(cm)) <= 1e-12);
  }
}
