#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "shillguard/dataset.hpp"

namespace shillguard {

enum class ItemCategory { Fad, Fashion, Style, Scallop };

std::string_view to_string(ItemCategory c);

struct ItemProfile {
  ItemId item = 0;
  std::int64_t life_cycle = 0;  // seconds between first and last rating
  std::int64_t n = 0;           // rating count
  double zscore = 0.0;          // life cycle against the item population
};

// (x - mean) / stddev; stddev must be positive.
double zscore_life_cycle(double x, double mean, double stddev);

// Mean rating count per rated item; the n-bar classify() compares against.
double mean_item_count(const GlobalStats& stats);

// Profiles for every rated item, sorted by item id, z-scored against the
// life-cycle population of all items.
std::vector<ItemProfile> build_profiles(const GlobalStats& stats);

ItemCategory classify(const ItemProfile& p, double mean_count);

struct StratifiedCounts {
  int fad = 12;
  int fashion = 6;
  int style = 32;
  int scallop = 50;

  int total() const { return fad + fashion + style + scallop; }
};

// Seeded uniform pick of the requested number of items per category.
// Deterministic for a fixed seed; quotas must fit the category populations.
std::vector<ItemId> stratified_sample(const std::vector<ItemProfile>& profiles,
                                      double mean_count, const StratifiedCounts& counts,
                                      std::uint64_t seed);

}  // namespace shillguard
