#include <doctest.h>

#include <cmath>

#include "fixture.hpp"
#include "oracles.hpp"
#include "shillguard/error.hpp"
#include "shillguard/rdakf.hpp"
#include "shillguard/rng.hpp"

using namespace shillguard;

TEST_CASE("seed_state copies the first block and starts P at 1") {
  const FilterState s = seed_state(BlockEntry{0, 10, 3});
  CHECK(s.x == 10.0);
  CHECK(s.P == 1.0);
  CHECK(s.n_A == 3);
  CHECK(s.q == 1.0);
  CHECK(s.r == 1.0);

  const FilterState single = seed_state(BlockEntry{2, 5, 1});
  CHECK(single.x == 5.0);
  CHECK(single.n_A == 1);

  CHECK_THROWS_AS(seed_state(BlockEntry{0, 0, 0}), ValidationError);
}

TEST_CASE("predict scales the cumulative sum by the count ratio") {
  FilterState s;
  s.x = 100.0;
  s.P = 1.0;
  s.n_A = 25;
  const Prediction p = predict(s, 5);
  CHECK(p.x_hat == doctest::Approx(120.0));
  CHECK(p.P_hat == doctest::Approx(2.0));

  s.x = 0.0;
  CHECK(predict(s, 7).x_hat == 0.0);

  s.n_A = 0;
  CHECK_THROWS_AS(predict(s, 5), ValidationError);
}

TEST_CASE("update blends prediction and observation by the gain") {
  FilterState s;
  s.x = 100.0;
  s.P = 1.0;
  s.n_A = 25;

  SUBCASE("gain is one half when P_hat equals r") {
    const FilterState next = update(s, Prediction{120.0, 1.0}, 130.0, 5);
    CHECK(next.x == doctest::Approx(125.0));  // gain 0.5
    CHECK(next.P == doctest::Approx(0.5));
    CHECK(next.n_A == 30);
  }
  SUBCASE("zero innovation leaves the prediction untouched") {
    const FilterState next = update(s, Prediction{120.0, 2.0}, 120.0, 5);
    CHECK(next.x == 120.0);
  }
  SUBCASE("hand-evaluated chain") {
    // gain = 2/3, correction = 2/3 * 10
    const FilterState next = update(s, Prediction{120.0, 2.0}, 130.0, 5);
    CHECK(next.x == doctest::Approx(126.66666666666667));
    CHECK(next.P == doctest::Approx(2.0 / 3.0));
  }
}

TEST_CASE("run_item emits one record per block after the seed") {
  SUBCASE("constant-rate stream predicts itself") {
    BlockSeries s{1, {{0, 20, 5}, {1, 20, 5}, {2, 20, 5}}};
    const auto recs = run_item(s);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].v == 0.0);
    CHECK(recs[0].v_A == 0.0);
    CHECK(recs[1].v == 0.0);
  }
  SUBCASE("equal per-rating mean makes the prediction exact") {
    BlockSeries s{1, {{0, 15, 3}, {1, 25, 5}}};
    const auto recs = run_item(s);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].v == 0.0);
    CHECK(recs[0].v_A == 0.0);
  }
  SUBCASE("hand-computed deviation") {
    BlockSeries s{9, {{0, 12, 4}, {3, 50, 10}}};
    const auto recs = run_item(s);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].item == 9);
    CHECK(recs[0].block == 3);
    CHECK(recs[0].y == doctest::Approx(62.0));  // x_hat = 12 * 14 / 4 = 42
    CHECK(recs[0].v == doctest::Approx(20.0));
    CHECK(recs[0].v_A == doctest::Approx(2.0));
    CHECK(recs[0].n_P == 10);
  }
  SUBCASE("single-entry series seeds and emits nothing") {
    CHECK(run_item(BlockSeries{1, {{0, 5, 1}}}).empty());
  }
  SUBCASE("empty series is an error") {
    CHECK_THROWS_AS(run_item(BlockSeries{1, {}}), ValidationError);
  }
}

TEST_CASE("P contracts to the golden-ratio fixed point") {
  BlockSeries s{1, {}};
  for (int b = 0; b < 60; ++b) s.entries.push_back({b, 4, 1});
  FilterState state = seed_state(s.entries[0]);
  for (std::size_t i = 1; i < s.entries.size(); ++i) {
    const Prediction p = predict(state, s.entries[i].n);
    CHECK(p.P_hat > 0.0);
    const double y = state.x + static_cast<double>(s.entries[i].z);
    state = update(state, p, y, s.entries[i].n);
    CHECK(state.P > 0.0);
    CHECK(state.P < 1.0);
  }
  CHECK(state.P == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("the update never overshoots the observation") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    FilterState s;
    s.x = static_cast<double>(rng.uniform_int(1, 500));
    s.P = static_cast<double>(rng.uniform_int(0, 40)) / 10.0;
    s.n_A = rng.uniform_int(1, 60);
    const std::int64_t n_P = rng.uniform_int(1, 20);
    const Prediction p = predict(s, n_P);
    const double y = static_cast<double>(rng.uniform_int(1, 700));
    const double gain = p.P_hat / (p.P_hat + s.r);
    CHECK(gain > 0.0);
    CHECK(gain < 1.0);
    const FilterState next = update(s, p, y, n_P);
    CHECK(std::abs(next.x - y) <= std::abs(p.x_hat - y) + 1e-12);
  }
}

namespace {

BlockSeries random_series(Rng& rng, std::int64_t max_blocks) {
  BlockSeries s;
  s.item = rng.uniform_int(1, 4000);
  const std::int64_t blocks = rng.uniform_int(1, max_blocks);
  std::int64_t block = rng.uniform_int(0, 3);
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::int64_t n = rng.uniform_int(1, 12);
    std::int64_t z = 0;
    for (std::int64_t k = 0; k < n; ++k) z += rng.uniform_int(1, 5);
    s.entries.push_back({block, z, n});
    block += rng.uniform_int(1, 4);
  }
  return s;
}

}  // namespace

TEST_CASE("run_item matches the from-scratch replay oracle") {
  Rng rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    const BlockSeries s = random_series(rng, 10);
    const auto got = run_item(s);
    const auto want = oracles::replay_deviations(s);
    REQUIRE(got.size() == want.size());
    REQUIRE(got.size() == s.entries.size() - 1);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].block == want[i].block);
      CHECK(oracles::rel_err(got[i].v, want[i].v) < 1e-9);
      CHECK(oracles::rel_err(got[i].v_A, want[i].v_A) < 1e-9);
      CHECK(oracles::rel_err(got[i].v, got[i].v_A * static_cast<double>(got[i].n_P)) < 1e-9);
    }
  }
}

TEST_CASE("total deviation agrees with the rearranged formula") {
  Rng rng(777);
  for (int trial = 0; trial < 50; ++trial) {
    const BlockSeries s = random_series(rng, 8);
    if (s.entries.size() < 2) continue;
    FilterState state = seed_state(s.entries[0]);
    for (std::size_t i = 1; i < s.entries.size(); ++i) {
      const BlockEntry& e = s.entries[i];
      const Prediction p = predict(state, e.n);
      const double y = state.x + static_cast<double>(e.z);
      const double v = y - p.x_hat;
      const double direct = oracles::deviation_direct(state.x, state.n_A, e.z, e.n);
      CHECK(oracles::rel_err(v, direct) < 1e-9);
      state = update(state, p, y, e.n);
    }
  }
}

TEST_CASE("constant per-rating mean gives exactly zero deviations") {
  Rng rng(31337);
  for (int trial = 0; trial < 500; ++trial) {
    // mean m = num/den with integer block sums z = m * n
    const std::int64_t den = rng.uniform_int(1, 4);
    const std::int64_t num = rng.uniform_int(1, 5 * den);
    BlockSeries s{1, {}};
    std::int64_t block = 0;
    const std::int64_t blocks = rng.uniform_int(2, 12);
    for (std::int64_t b = 0; b < blocks; ++b) {
      const std::int64_t n = den * rng.uniform_int(1, 6);
      s.entries.push_back({block, num * n / den, n});
      block += rng.uniform_int(1, 3);
    }
    for (const auto& rec : run_item(s)) {
      CHECK(rec.v == 0.0);
      CHECK(rec.v_A == 0.0);
    }
  }
}

TEST_CASE("parallel kernel is bit-identical to the serial reference") {
  Rng rng(2024);
  std::vector<BlockSeries> series;
  for (int i = 0; i < 500; ++i) series.push_back(random_series(rng, 20));

  const auto serial = run_items_serial(series);
  const auto parallel = run_items(series);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].item == parallel[i].item);
    CHECK(serial[i].block == parallel[i].block);
    CHECK(serial[i].v == parallel[i].v);      // exact, not approximate
    CHECK(serial[i].v_A == parallel[i].v_A);
    CHECK(serial[i].n_P == parallel[i].n_P);
  }
}

TEST_CASE("run_item honors overridden q and r") {
  BlockSeries s{1, {{0, 10, 2}, {1, 30, 2}}};
  const auto recs = run_item(s, 3.0, 2.0);
  const auto want = oracles::replay_deviations(s, 3.0, 2.0);
  REQUIRE(recs.size() == 1);
  CHECK(oracles::rel_err(recs[0].v, want[0].v) < 1e-12);
}
