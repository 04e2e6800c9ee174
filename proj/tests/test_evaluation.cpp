#include <doctest.h>

#include <set>
#include <sstream>

#include "fixture.hpp"
#include "shillguard/error.hpp"
#include "shillguard/evaluation.hpp"
#include "shillguard/rng.hpp"

using namespace shillguard;

TEST_CASE("score counts the confusion sets") {
  SUBCASE("perfect prediction") {
    std::set<UserId> truth;
    for (UserId u = 1; u <= 94; ++u) truth.insert(u);
    const EvalReport r = score(truth, truth);
    CHECK(r.tp == 94);
    CHECK(r.fp == 0);
    CHECK(r.fn == 0);
    CHECK(*r.precision == doctest::Approx(1.0));
    CHECK(*r.recall == doctest::Approx(1.0));
  }
  SUBCASE("eight of ten predictions are right") {
    const std::set<UserId> predicted = {1, 2, 3, 4, 5, 6, 7, 8, 100, 101};
    const std::set<UserId> truth = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    const EvalReport r = score(predicted, truth);
    CHECK(r.tp == 8);
    CHECK(r.fp == 2);
    CHECK(r.fn == 1);
    CHECK(*r.precision == doctest::Approx(0.8));
  }
  SUBCASE("empty prediction leaves precision undefined, not zero") {
    const std::set<UserId> truth = {1, 2, 3};
    const EvalReport r = score({}, truth);
    CHECK(!r.precision.has_value());
    CHECK(r.recall.has_value());
    CHECK(*r.recall == doctest::Approx(0.0));
    CHECK(r.fn == 3);
  }
  SUBCASE("set identities hold on random inputs") {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
      std::set<UserId> predicted;
      std::set<UserId> truth;
      for (int i = 0; i < 60; ++i) {
        if (rng.next_unit() < 0.5) predicted.insert(rng.uniform_int(1, 40));
        if (rng.next_unit() < 0.5) truth.insert(rng.uniform_int(1, 40));
      }
      const EvalReport r = score(predicted, truth);
      CHECK(r.tp + r.fp == static_cast<std::int64_t>(predicted.size()));
      CHECK(r.tp + r.fn == static_cast<std::int64_t>(truth.size()));
    }
  }
}

TEST_CASE("report CSV prints NA for undefined metrics") {
  CellResult cell;
  cell.report = score({}, {1, 2});
  cell.report.model = AttackModel::Random;
  cell.report.attack_size = 0.01;
  cell.report.filler_size = 0.05;
  cell.report.conf_total = 0.99;
  cell.report.conf_avg = 0.90;
  cell.report.seed = 7;
  std::ostringstream out;
  write_report_csv(out, std::vector<CellResult>{cell});
  CHECK(out.str() ==
        "model,intent,attack_size,filler_size,conf_total,conf_avg,seed,tp,fp,fn,precision,"
        "recall\n"
        "random,push,0.01,0.05,0.99,0.9,7,0,0,2,NA,0.000000\n");
}

TEST_CASE("experiment grids expand to the cell product") {
  ExperimentGrid grid;
  grid.models = {AttackModel::Average, AttackModel::Random};
  grid.attack_sizes = {0.05, 0.10};
  grid.filler_sizes = {0.05};
  grid.conf_totals = {0.99};
  grid.conf_avgs = {0.90};
  grid.replicates = 3;
  CHECK(grid.cell_count() == 12);

  grid.models.clear();
  CHECK(grid.cell_count() == 0);
  const auto results = run_experiment(fixture::ml100k(), grid, TrainSpec{}, 1);
  CHECK(results.empty());
}

TEST_CASE("a small experiment run is deterministic and ordered") {
  ExperimentGrid grid;
  grid.models = {AttackModel::Average};
  grid.attack_sizes = {0.10, 0.05};
  grid.filler_sizes = {0.05};
  grid.replicates = 2;
  grid.injection_block = 27;

  const auto a = run_experiment(fixture::ml100k(), grid, TrainSpec{}, 42);
  const auto b = run_experiment(fixture::ml100k(), grid, TrainSpec{}, 42);
  REQUIRE(a.size() == 4);

  std::ostringstream csv_a;
  std::ostringstream csv_b;
  write_report_csv(csv_a, a);
  write_report_csv(csv_b, b);
  CHECK(csv_a.str() == csv_b.str());

  // rows keep grid order: sizes vary slower than replicates
  CHECK(a[0].report.attack_size == doctest::Approx(0.10));
  CHECK(a[1].report.attack_size == doctest::Approx(0.10));
  CHECK(a[2].report.attack_size == doctest::Approx(0.05));
  CHECK(a[3].report.attack_size == doctest::Approx(0.05));

  // replicates get distinct derived seeds
  CHECK(a[0].report.seed != a[1].report.seed);

  // truth size is round(attack_size * 943) and tp + fn equals it
  CHECK(a[0].report.tp + a[0].report.fn == 94);
  CHECK(a[2].report.tp + a[2].report.fn == 47);
}

TEST_CASE("adding grid cells never changes earlier rows") {
  ExperimentGrid small;
  small.models = {AttackModel::Average};
  small.attack_sizes = {0.10};
  small.replicates = 2;
  small.injection_block = 27;

  ExperimentGrid bigger = small;
  bigger.replicates = 4;

  const auto a = run_experiment(fixture::ml100k(), small, TrainSpec{}, 9);
  const auto b = run_experiment(fixture::ml100k(), bigger, TrainSpec{}, 9);
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].report.seed == b[i].report.seed);
    CHECK(a[i].report.tp == b[i].report.tp);
    CHECK(a[i].report.fp == b[i].report.fp);
    CHECK(a[i].suspicious_users == b[i].suspicious_users);
  }
}

TEST_CASE("a bad grid cell surfaces as an error, not a crash") {
  ExperimentGrid grid;
  grid.models = {AttackModel::Average};
  grid.attack_sizes = {0.05};
  grid.injection_block = 100000;  // far outside the partition
  CHECK_THROWS_AS(run_experiment(fixture::ml100k(), grid, TrainSpec{}, 1), ValidationError);
}

TEST_CASE("experiment config files parse into grids") {
  std::istringstream in(
      "# comment\n"
      "[attack]\n"
      "models = average, bandwagon\n"
      "intent = push\n"
      "attack_sizes = 0.01, 0.05\n"
      "filler_sizes = 0.05\n"
      "block = 27\n"
      "target_count = 5\n"
      "[thresholds]\n"
      "conf_total = 0.95, 0.99\n"
      "conf_avg = 0.90\n"
      "[train]\n"
      "fad = 12\n"
      "fashion = 6\n"
      "style = 32\n"
      "scallop = 50\n"
      "block_days = 4\n"
      "[run]\n"
      "replicates = 3\n");
  const ExperimentSpec spec = parse_experiment_file(in);
  CHECK(spec.grid.models == std::vector<AttackModel>{AttackModel::Average, AttackModel::Bandwagon});
  CHECK(spec.grid.attack_sizes == std::vector<double>{0.01, 0.05});
  CHECK(spec.grid.conf_totals == std::vector<double>{0.95, 0.99});
  CHECK(spec.grid.injection_block == 27);
  CHECK(spec.grid.replicates == 3);
  CHECK(spec.grid.cell_count() == 2 * 2 * 1 * 2 * 1 * 3);
  CHECK(spec.train.counts.style == 32);
  CHECK(spec.train.block_days == 4);
}

TEST_CASE("bad experiment configs are rejected") {
  SUBCASE("bad number") {
    std::istringstream in("[attack]\nattack_sizes = lots\n");
    CHECK_THROWS_AS(parse_experiment_file(in), ValidationError);
  }
  SUBCASE("bad line") {
    std::istringstream in("[attack]\nno equals sign here\n");
    CHECK_THROWS_AS(parse_experiment_file(in), ParseError);
  }
  SUBCASE("bad model name") {
    std::istringstream in("[attack]\nmodels = sneaky\n");
    CHECK_THROWS_AS(parse_experiment_file(in), ValidationError);
  }
  SUBCASE("zero replicates") {
    std::istringstream in("[run]\nreplicates = 0\n");
    CHECK_THROWS_AS(parse_experiment_file(in), ValidationError);
  }
}
