#include "shillguard/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>
#include <tuple>

#include "shillguard/error.hpp"
#include "shillguard/rng.hpp"
#include "shillguard/taxonomy.hpp"

namespace shillguard {

namespace {

constexpr std::int64_t kUsers = 943;
constexpr std::int64_t kItems = 1682;
constexpr std::int64_t kRatings = 100000;
constexpr std::int64_t kOrigin = 874724710;        // first timestamp
constexpr std::int64_t kBlockWidth = 4 * kSecondsPerDay;
constexpr std::int64_t kBlocks = 54;
constexpr std::int64_t kAnchorWindow = kBlockWidth / 16;
constexpr std::int64_t kMinPerUser = 20;

// Category tier sizes; the shuffled item list is cut in this order.
constexpr std::int64_t kFadItems = 120;      // short life, light count
constexpr std::int64_t kFashionItems = 60;   // short life, heavy count
constexpr std::int64_t kStyleItems = 500;    // long life, light count
constexpr std::int64_t kHotItems = 6;        // long life, far more raters; polarizing
// remaining items are regular scallop: long life, heavy count

// Rating-count classes. The catalog mean is 100000/1682 = 59.45, so light
// items stay at or below it and heavy items above it under any draw. Hot
// items carry enough ratings per block that their average deviation stays
// calm on clean data.
constexpr std::int64_t kLightLo = 53, kLightHi = 58;
constexpr std::int64_t kHeavyLo = 60, kHeavyHi = 61;
constexpr std::int64_t kHotLo = 580, kHotHi = 650;

// Short-life items span blocks 2..51; long-life items span the full range.
constexpr std::int64_t kShortFirst = 2, kShortLast = 51;

// Per-item value model: a mediocre catalog where top marks are scarce, so
// genuine scale-max votes concentrate in the hot items below.
constexpr double kMeanLo = 2.90, kMeanHi = 3.45;
constexpr double kStddevLo = 0.25, kStddevHi = 0.32;
// Hot items are love-or-lukewarm: a fixed share of top ratings over a
// mediocre base, which keeps their mean moderate while they stay full of
// extreme votes. The share is laid down as a per-block quota (at least one
// top vote per block) rather than per-rating coin flips, so every hot block
// carries extreme votes.
constexpr double kHotTopShare = 0.10;
constexpr double kHotBaseMean = 3.05, kHotBaseStddev = 0.22;

struct ItemPlan {
  ItemId id = 0;
  bool long_life = true;
  bool heavy = true;
  bool hot = false;
  std::int64_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

int clamp_round(double v) {
  return std::clamp(static_cast<int>(std::llround(v)), 1, 5);
}

}  // namespace

Dataset synthetic_movielens(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xDA7A));

  std::vector<ItemId> ids(kItems);
  std::iota(ids.begin(), ids.end(), ItemId{1});
  rng.shuffle(ids);

  std::vector<ItemPlan> plan(kItems);
  for (std::int64_t i = 0; i < kItems; ++i) {
    ItemPlan& p = plan[i];
    p.id = ids[i];
    if (i < kFadItems) {
      p.long_life = false;
      p.heavy = false;
    } else if (i < kFadItems + kFashionItems) {
      p.long_life = false;
      p.heavy = true;
    } else if (i < kFadItems + kFashionItems + kStyleItems) {
      p.long_life = true;
      p.heavy = false;
    } else if (i < kFadItems + kFashionItems + kStyleItems + kHotItems) {
      p.long_life = true;
      p.heavy = true;
      p.hot = true;
    } else {
      p.long_life = true;
      p.heavy = true;
    }
    p.n = p.hot    ? rng.uniform_int(kHotLo, kHotHi)
          : p.heavy ? rng.uniform_int(kHeavyLo, kHeavyHi)
                    : rng.uniform_int(kLightLo, kLightHi);
    p.mean = kMeanLo + (kMeanHi - kMeanLo) * rng.next_unit();
    p.stddev = kStddevLo + (kStddevHi - kStddevLo) * rng.next_unit();
  }

  // Repair the draw so the counts sum to exactly kRatings without leaving
  // any item's class bounds.
  std::int64_t total = 0;
  for (const ItemPlan& p : plan) total += p.n;
  for (std::size_t i = 0; total != kRatings; i = (i + 1) % plan.size()) {
    ItemPlan& p = plan[i];
    const std::int64_t lo = p.hot ? kHotLo : p.heavy ? kHeavyLo : kLightLo;
    const std::int64_t hi = p.hot ? kHotHi : p.heavy ? kHeavyHi : kLightHi;
    if (total > kRatings && p.n > lo) {
      --p.n;
      --total;
    } else if (total < kRatings && p.n < hi) {
      ++p.n;
      ++total;
    }
  }

  std::vector<Rating> ratings;
  ratings.reserve(static_cast<std::size_t>(kRatings));
  std::vector<std::unordered_set<UserId>> item_users(kItems + 1);
  std::vector<std::int64_t> user_count(kUsers + 1, 0);

  for (const ItemPlan& p : plan) {
    const std::int64_t first = p.long_life ? 0 : kShortFirst;
    const std::int64_t last = p.long_life ? kBlocks - 1 : kShortLast;
    const std::int64_t span = last - first + 1;

    // Blocks the item is rated in; life-cycle anchors are always kept.
    std::vector<std::int64_t> blocks;
    if (p.n >= span) {
      blocks.resize(static_cast<std::size_t>(span));
      std::iota(blocks.begin(), blocks.end(), first);
    } else {
      std::vector<std::int64_t> middle;
      for (std::int64_t b = first + 1; b < last; ++b) middle.push_back(b);
      blocks = rng.sample(std::move(middle), static_cast<std::size_t>(p.n - 2));
      blocks.push_back(first);
      blocks.push_back(last);
      std::sort(blocks.begin(), blocks.end());
    }
    std::unordered_map<std::int64_t, std::int64_t> per_block;
    for (const std::int64_t b : blocks) per_block[b] = 1;
    for (std::int64_t extra = p.n - static_cast<std::int64_t>(blocks.size()); extra > 0; --extra)
      per_block[blocks[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(blocks.size()) - 1))]] += 1;

    auto& used = item_users[static_cast<std::size_t>(p.id)];
    for (const std::int64_t b : blocks) {
      const std::int64_t start = kOrigin + b * kBlockWidth;
      const std::int64_t block_n = per_block.at(b);
      const std::int64_t top_quota =
          p.hot ? std::max<std::int64_t>(
                      1, std::llround(static_cast<double>(block_n) * kHotTopShare))
                : 0;
      for (std::int64_t k = 0; k < block_n; ++k) {
        std::int64_t ts = 0;
        if (b == first && k == 0) {  // life-cycle anchor ratings

          ts = rng.uniform_int(start, start + kAnchorWindow - 1);
        } else if (b == last && k == 0) {
          ts = rng.uniform_int(start + kBlockWidth - kAnchorWindow, start + kBlockWidth - 1);
        } else {
          ts = rng.uniform_int(start, start + kBlockWidth - 1);
        }

        UserId user = 0;
        do {
          user = rng.uniform_int(1, kUsers);
        } while (used.contains(user));
        used.insert(user);
        user_count[static_cast<std::size_t>(user)] += 1;

        int value = 0;
        if (p.hot) {
          value = k < top_quota ? 5 : clamp_round(rng.next_normal(kHotBaseMean, kHotBaseStddev));
        } else {
          value = clamp_round(rng.next_normal(p.mean, p.stddev));
        }
        ratings.push_back({user, p.id, value, ts});
      }
    }
  }

  // Pin the global extremes so the block grid is anchored exactly at kOrigin
  // and the last block index is kBlocks - 1.
  auto min_it = std::min_element(ratings.begin(), ratings.end(),
                                 [](const Rating& a, const Rating& b) {
                                   return a.timestamp < b.timestamp;
                                 });
  min_it->timestamp = kOrigin;
  auto max_it = std::max_element(ratings.begin(), ratings.end(),
                                 [](const Rating& a, const Rating& b) {
                                   return a.timestamp < b.timestamp;
                                 });
  max_it->timestamp = kOrigin + kBlocks * kBlockWidth - 1;

  // Every user holds at least kMinPerUser ratings; reassign surplus ratings
  // from the busiest users when a draw leaves someone short.
  for (UserId u = 1; u <= kUsers; ++u) {
    while (user_count[static_cast<std::size_t>(u)] < kMinPerUser) {
      bool moved = false;
      for (Rating& r : ratings) {
        auto& owner_count = user_count[static_cast<std::size_t>(r.user)];
        if (r.user == u || owner_count <= kMinPerUser * 2) continue;
        auto& users_of_item = item_users[static_cast<std::size_t>(r.item)];
        if (users_of_item.contains(u)) continue;
        users_of_item.erase(r.user);
        users_of_item.insert(u);
        owner_count -= 1;
        user_count[static_cast<std::size_t>(u)] += 1;
        r.user = u;
        moved = true;
        break;
      }
      if (!moved) throw ValidationError("synthetic dataset: cannot satisfy per-user minimum");
    }
  }

  std::sort(ratings.begin(), ratings.end(), [](const Rating& a, const Rating& b) {
    return std::tie(a.timestamp, a.user, a.item) < std::tie(b.timestamp, b.user, b.item);
  });

  Dataset ds = make_dataset(std::move(ratings));
  if (ds.size() != static_cast<std::size_t>(kRatings) ||
      ds.users.size() != static_cast<std::size_t>(kUsers) ||
      ds.items.size() != static_cast<std::size_t>(kItems))
    throw ValidationError("synthetic dataset: shape check failed");

  // The taxonomy quotas must hold for any seed; the life-cycle layout keeps
  // long items above the population mean and short items below it.
  const GlobalStats stats = global_stats(ds);
  const auto profiles = build_profiles(stats);
  const double nbar = mean_item_count(stats);
  std::int64_t cat[4] = {0, 0, 0, 0};
  for (const ItemProfile& p : profiles) cat[static_cast<int>(classify(p, nbar))] += 1;
  if (cat[0] < kFadItems || cat[1] < kFashionItems || cat[2] < kStyleItems ||
      cat[3] < kItems - kFadItems - kFashionItems - kStyleItems - kHotItems)
    throw ValidationError("synthetic dataset: taxonomy layout check failed");

  return ds;
}

}  // namespace shillguard
