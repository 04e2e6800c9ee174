#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shillguard/dataset.hpp"

namespace shillguard {

// Per-item filter state over the cumulative rating sum.
struct FilterState {
  double x = 0.0;        // cumulative rating sum absorbed so far
  double P = 0.0;        // scalar error magnitude, >= 0
  std::int64_t n_A = 0;  // ratings absorbed so far, >= 1 once seeded
  double q = 1.0;        // model-error constant
  double r = 1.0;        // measurement-error constant
};

struct Prediction {
  double x_hat = 0.0;
  double P_hat = 0.0;
};

// Evidence emitted per (item, block): how far the observed cumulative sum
// drifted from the prediction, in total and per rating.
struct DeviationRecord {
  ItemId item = 0;
  std::int64_t block = 0;
  double v = 0.0;        // y - x_hat
  double v_A = 0.0;      // v / n_P
  std::int64_t n_P = 0;  // ratings in the block, >= 1
  double y = 0.0;        // observed cumulative sum x + z
};

// State after the first non-empty block: x = z, n_A = n_P, P = 1.
// No deviation is emitted for the seed block.
FilterState seed_state(const BlockEntry& first, double q = 1.0, double r = 1.0);

// x_hat = x * (n_A + n_P) / n_A,  P_hat = P + q.
Prediction predict(const FilterState& s, std::int64_t n_P);

// Kg = P_hat / (P_hat + r); blends the prediction with the observed
// cumulative sum y and absorbs the block's rating count.
FilterState update(const FilterState& s, const Prediction& p, double y, std::int64_t n_P);

// Seeds on the first entry, then emits one record per later entry (empty
// blocks are absent from the series and cause no state change).
std::vector<DeviationRecord> run_item(const BlockSeries& series, double q = 1.0, double r = 1.0);

// All items, records grouped in series order. The OpenMP kernel and the
// serial reference are bit-identical; the filters share no state.
std::vector<DeviationRecord> run_items(std::span<const BlockSeries> series);
std::vector<DeviationRecord> run_items_serial(std::span<const BlockSeries> series);

}  // namespace shillguard
