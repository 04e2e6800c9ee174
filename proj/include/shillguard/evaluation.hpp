#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "shillguard/attackgen.hpp"
#include "shillguard/dataset.hpp"
#include "shillguard/taxonomy.hpp"

namespace shillguard {

struct EvalReport {
  AttackModel model = AttackModel::Average;
  AttackIntent intent = AttackIntent::Push;
  double attack_size = 0.0;
  double filler_size = 0.0;
  double conf_total = 0.0;
  double conf_avg = 0.0;
  std::uint64_t seed = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::optional<double> precision;  // empty when tp + fp == 0
  std::optional<double> recall;     // empty when tp + fn == 0
};

EvalReport score(const std::set<UserId>& predicted, const std::set<UserId>& truth);

struct TrainSpec {
  StratifiedCounts counts;
  int block_days = 4;
};

// Axes of the experiment matrix; cells are their cross product expanded in
// declaration order with replicates innermost.
struct ExperimentGrid {
  std::vector<AttackModel> models{AttackModel::Average};
  AttackIntent intent = AttackIntent::Push;
  std::vector<double> attack_sizes{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10};
  std::vector<double> filler_sizes{0.05};
  std::vector<double> conf_totals{0.99};
  std::vector<double> conf_avgs{0.90};
  int replicates = 1;
  std::vector<ItemId> targets;      // empty: seeded default pick per cell
  std::size_t target_count = 5;     // size of the default pick
  std::vector<ItemId> selected;     // empty: most-rated item for bandwagon
  std::int64_t injection_block = -1;  // -1: middle block of the partition

  std::size_t cell_count() const;
};

struct ExperimentSpec {
  ExperimentGrid grid;
  TrainSpec train;
};

// Simple key=value sections: [attack], [thresholds], [train], [run].
ExperimentSpec parse_experiment_file(std::istream& in);

struct CellResult {
  EvalReport report;
  std::set<UserId> suspicious_users;
};

// Per cell: train thresholds on a seeded stratified item sample of the clean
// data, inject a seeded campaign, run the filters, flag, extract, score.
// Cell seeds are derived from the master seed by cell index, so results are
// reproducible and appending cells never changes earlier rows. Cells run in
// parallel; results keep grid order.
std::vector<CellResult> run_experiment(const Dataset& ds, const ExperimentGrid& grid,
                                       const TrainSpec& train, std::uint64_t master_seed);

// model,intent,attack_size,filler_size,conf_total,conf_avg,seed,tp,fp,fn,
// precision,recall; undefined metrics print as NA.
void write_report_csv(std::ostream& out, std::span<const CellResult> results);

}  // namespace shillguard
