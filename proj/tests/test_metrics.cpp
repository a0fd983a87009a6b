#include <doctest.h>

#include <algorithm>

#include "trgr/errors.hpp"
#include "trgr/metrics.hpp"
#include "trgr/rng.hpp"

using namespace trgr;

namespace {

using Labels = std::vector<std::size_t>;

void check_close(double actual, double expected) { CHECK(std::abs(actual - expected) <= 1e-9); }

}  // namespace

TEST_CASE("perfect predictions score 1 on every metric") {
  for (std::size_t k : {2u, 3u, 7u}) {
    Labels truth;
    for (std::size_t i = 0; i < 3 * k; ++i) truth.push_back(i % k);
    const Metrics m = compute_metrics(truth, truth, k);
    check_close(m.accuracy, 1.0);
    check_close(m.macro_precision, 1.0);
    check_close(m.macro_recall, 1.0);
    check_close(m.macro_f1, 1.0);
    for (std::size_t c = 0; c < k; ++c) CHECK(m.confusion[c][c] == 3);
  }
}

TEST_CASE("hand-computed two-class example") {
  const Metrics m = compute_metrics(Labels{0, 0, 1, 1}, Labels{0, 1, 1, 1}, 2);
  check_close(m.accuracy, 0.75);
  check_close(m.macro_precision, (1.0 + 2.0 / 3.0) / 2.0);
  check_close(m.macro_recall, 0.75);
  check_close(m.macro_f1, (2.0 / 3.0 + 0.8) / 2.0);
  CHECK(m.macro_precision == doctest::Approx(0.8333).epsilon(1e-4));
  CHECK(m.macro_f1 == doctest::Approx(0.7333).epsilon(1e-4));
  CHECK(m.confusion == std::vector<std::vector<std::size_t>>{{1, 1}, {0, 2}});
}

TEST_CASE("a class that is never predicted has zero precision") {
  const Metrics m = compute_metrics(Labels{0, 0, 1, 1}, Labels{0, 0, 0, 0}, 2);
  check_close(m.accuracy, 0.5);
  check_close(m.macro_f1, (2.0 / 3.0 + 0.0) / 2.0);
  check_close(m.macro_recall, 0.5);
  check_close(m.macro_precision, 0.25);
}

TEST_CASE("classes absent from the truth are left out of the macro averages") {
  const Metrics m = compute_metrics(Labels{0, 1}, Labels{0, 1}, 3);
  check_close(m.macro_recall, 1.0);
  check_close(m.macro_f1, 1.0);
}

TEST_CASE("metrics are invariant to sample order and consistent relabelling") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng.below(4);
    const std::size_t n = 10 + rng.below(30);
    Labels truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = i % k;
      pred[i] = rng.uniform() < 0.6 ? truth[i] : rng.below(k);
    }
    const Metrics base = compute_metrics(truth, pred, k);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    Labels t2(n), p2(n);
    for (std::size_t i = 0; i < n; ++i) {
      t2[i] = truth[order[i]];
      p2[i] = pred[order[i]];
    }
    const Metrics shuffled = compute_metrics(t2, p2, k);
    check_close(shuffled.macro_f1, base.macro_f1);
    check_close(shuffled.accuracy, base.accuracy);

    std::vector<std::size_t> perm(k);
    for (std::size_t c = 0; c < k; ++c) perm[c] = c;
    rng.shuffle(std::span<std::size_t>(perm));
    for (std::size_t i = 0; i < n; ++i) {
      t2[i] = perm[truth[i]];
      p2[i] = perm[pred[i]];
    }
    const Metrics relabelled = compute_metrics(t2, p2, k);
    check_close(relabelled.accuracy, base.accuracy);
    check_close(relabelled.macro_precision, base.macro_precision);
    check_close(relabelled.macro_recall, base.macro_recall);
    check_close(relabelled.macro_f1, base.macro_f1);
  }
}

TEST_CASE("metrics JSON reports rounded percentages") {
  const Metrics m = compute_metrics(Labels{0, 0, 1, 1}, Labels{0, 1, 1, 1}, 2);
  const auto j = m.to_json();
  CHECK(j["accuracy"] == 75.0);
  CHECK(j["precision"] == 83.33);
  CHECK(j["recall"] == 75.0);
  CHECK(j["f1"] == 73.33);
  CHECK(j["confusion"][0][1] == 1);
  CHECK(round_percent(2.0 / 3.0) == 66.67);
  CHECK(round_percent(0.98765) == 98.77);
}

TEST_CASE("metrics argument errors") {
  CHECK_THROWS_AS(compute_metrics(Labels{0, 1}, Labels{0}, 2), DimensionError);
  CHECK_THROWS_AS(compute_metrics(Labels{0, 2}, Labels{0, 1}, 2), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics(Labels{}, Labels{}, 2), std::invalid_argument);
}
