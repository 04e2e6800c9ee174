#include "shillguard/rdakf.hpp"

#include "shillguard/error.hpp"

namespace shillguard {

FilterState seed_state(const BlockEntry& first, double q, double r) {
  if (first.n < 1) throw ValidationError("cannot seed the filter from an empty block");
  FilterState s;
  s.x = static_cast<double>(first.z);
  s.P = 1.0;
  s.n_A = first.n;
  s.q = q;
  s.r = r;
  return s;
}

Prediction predict(const FilterState& s, std::int64_t n_P) {
  if (s.n_A < 1) throw ValidationError("predict on an unseeded filter state");
  if (n_P < 1) throw ValidationError("predict requires a non-empty block");
  Prediction p;
  p.x_hat = s.x * static_cast<double>(s.n_A + n_P) / static_cast<double>(s.n_A);
  p.P_hat = s.P + s.q;
  return p;
}

FilterState update(const FilterState& s, const Prediction& p, double y, std::int64_t n_P) {
  if (p.P_hat < 0.0) throw ValidationError("negative predicted error");
  if (n_P < 1) throw ValidationError("update requires a non-empty block");
  const double gain = p.P_hat / (p.P_hat + s.r);
  FilterState next = s;
  next.x = p.x_hat + gain * (y - p.x_hat);
  next.P = (1.0 - gain) * p.P_hat;
  next.n_A = s.n_A + n_P;
  return next;
}

std::vector<DeviationRecord> run_item(const BlockSeries& series, double q, double r) {
  if (series.entries.empty()) throw ValidationError("empty block series");

  std::vector<DeviationRecord> records;
  records.reserve(series.entries.size() - 1);
  FilterState state = seed_state(series.entries.front(), q, r);
  for (std::size_t i = 1; i < series.entries.size(); ++i) {
    const BlockEntry& e = series.entries[i];
    const Prediction p = predict(state, e.n);
    const double y = state.x + static_cast<double>(e.z);
    const double v = y - p.x_hat;
    records.push_back({series.item, e.block, v, v / static_cast<double>(e.n), e.n, y});
    state = update(state, p, y, e.n);
  }
  return records;
}

namespace {

std::vector<DeviationRecord> flatten(std::vector<std::vector<DeviationRecord>>& per_item) {
  std::size_t total = 0;
  for (const auto& recs : per_item) total += recs.size();
  std::vector<DeviationRecord> out;
  out.reserve(total);
  for (auto& recs : per_item) out.insert(out.end(), recs.begin(), recs.end());
  return out;
}

}  // namespace

std::vector<DeviationRecord> run_items(std::span<const BlockSeries> series) {
  std::vector<std::vector<DeviationRecord>> per_item(series.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < series.size(); ++i) per_item[i] = run_item(series[i]);
  return flatten(per_item);
}

std::vector<DeviationRecord> run_items_serial(std::span<const BlockSeries> series) {
  std::vector<std::vector<DeviationRecord>> per_item(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) per_item[i] = run_item(series[i]);
  return flatten(per_item);
}

}  // namespace shillguard
