#include "shillguard/taxonomy.hpp"

#include <algorithm>
#include <cmath>

#include "shillguard/error.hpp"
#include "shillguard/rng.hpp"

namespace shillguard {

std::string_view to_string(ItemCategory c) {
  switch (c) {
    case ItemCategory::Fad: return "fad";
    case ItemCategory::Fashion: return "fashion";
    case ItemCategory::Style: return "style";
    case ItemCategory::Scallop: return "scallop";
  }
  return "?";
}

double zscore_life_cycle(double x, double mean, double stddev) {
  if (!(stddev > 0.0))
    throw ValidationError("degenerate life-cycle population: standard deviation is not positive");
  return (x - mean) / stddev;
}

double mean_item_count(const GlobalStats& stats) {
  if (stats.items.empty()) throw ValidationError("no items in stats");
  std::int64_t total = 0;
  for (const auto& [item, s] : stats.items) total += s.count;
  return static_cast<double>(total) / static_cast<double>(stats.items.size());
}

std::vector<ItemProfile> build_profiles(const GlobalStats& stats) {
  if (stats.items.empty()) throw ValidationError("no items in stats");

  std::vector<ItemProfile> profiles;
  profiles.reserve(stats.items.size());
  for (const auto& [item, s] : stats.items)
    profiles.push_back({item, s.last_ts - s.first_ts, s.count, 0.0});
  std::sort(profiles.begin(), profiles.end(),
            [](const ItemProfile& a, const ItemProfile& b) { return a.item < b.item; });

  const auto n = static_cast<double>(profiles.size());
  double mean = 0.0;
  for (const ItemProfile& p : profiles) mean += static_cast<double>(p.life_cycle);
  mean /= n;
  double sq = 0.0;
  for (const ItemProfile& p : profiles) {
    const double d = static_cast<double>(p.life_cycle) - mean;
    sq += d * d;
  }
  const double stddev = profiles.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;

  for (ItemProfile& p : profiles)
    p.zscore = zscore_life_cycle(static_cast<double>(p.life_cycle), mean, stddev);
  return profiles;
}

ItemCategory classify(const ItemProfile& p, double mean_count) {
  const bool few = static_cast<double>(p.n) <= mean_count;
  if (p.zscore < 0.0) return few ? ItemCategory::Fad : ItemCategory::Fashion;
  return few ? ItemCategory::Style : ItemCategory::Scallop;
}

std::vector<ItemId> stratified_sample(const std::vector<ItemProfile>& profiles, double mean_count,
                                      const StratifiedCounts& counts, std::uint64_t seed) {
  std::vector<ItemId> buckets[4];
  for (const ItemProfile& p : profiles)
    buckets[static_cast<int>(classify(p, mean_count))].push_back(p.item);
  for (auto& bucket : buckets) std::sort(bucket.begin(), bucket.end());

  const int quotas[4] = {counts.fad, counts.fashion, counts.style, counts.scallop};
  std::vector<ItemId> out;
  out.reserve(static_cast<std::size_t>(counts.total()));
  for (int c = 0; c < 4; ++c) {
    if (quotas[c] < 0) throw ValidationError("negative category quota");
    if (static_cast<std::size_t>(quotas[c]) > buckets[c].size())
      throw ValidationError("quota for category '" +
                            std::string(to_string(static_cast<ItemCategory>(c))) + "' (" +
                            std::to_string(quotas[c]) + ") exceeds its population (" +
                            std::to_string(buckets[c].size()) + ")");
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    const auto picks = rng.sample(buckets[c], static_cast<std::size_t>(quotas[c]));
    out.insert(out.end(), picks.begin(), picks.end());
  }
  return out;
}

}  // namespace shillguard
