#include "shillguard/attackgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "shillguard/error.hpp"
#include "shillguard/rng.hpp"

namespace shillguard {

namespace {

// Sub-stream tags for the campaign seed.
constexpr std::uint64_t kTargetStream = 101;
constexpr std::uint64_t kProfileStream = 202;

int clamp_round(double value, const RatingScale& scale) {
  const auto rounded = static_cast<int>(std::llround(value));  // half away from zero
  return std::clamp(rounded, scale.min, scale.max);
}

}  // namespace

std::string_view to_string(AttackModel m) {
  switch (m) {
    case AttackModel::Random: return "random";
    case AttackModel::Average: return "average";
    case AttackModel::Bandwagon: return "bandwagon";
  }
  return "?";
}

std::string_view to_string(AttackIntent i) {
  return i == AttackIntent::Push ? "push" : "nuke";
}

AttackModel attack_model_from_string(std::string_view s) {
  if (s == "random") return AttackModel::Random;
  if (s == "average") return AttackModel::Average;
  if (s == "bandwagon") return AttackModel::Bandwagon;
  throw ValidationError("unknown attack model '" + std::string(s) + "'");
}

AttackIntent attack_intent_from_string(std::string_view s) {
  if (s == "push") return AttackIntent::Push;
  if (s == "nuke") return AttackIntent::Nuke;
  throw ValidationError("unknown attack intent '" + std::string(s) + "'");
}

std::size_t AttackCampaign::rating_count() const {
  std::size_t total = 0;
  for (const AttackProfile& p : profiles) total += p.ratings.size();
  return total;
}

namespace {

std::unordered_map<ItemId, std::int64_t> rating_counts(const Dataset& ds) {
  std::unordered_map<ItemId, std::int64_t> counts;
  counts.reserve(ds.items.size() * 2);
  for (const Rating& r : ds.ratings) counts[r.item] += 1;
  return counts;
}

}  // namespace

std::vector<ItemId> default_targets(const Dataset& ds, std::size_t count, std::uint64_t seed) {
  if (ds.empty()) throw ValidationError("cannot pick targets from an empty dataset");
  const auto counts = rating_counts(ds);

  std::vector<ItemId> by_popularity = ds.items;
  std::sort(by_popularity.begin(), by_popularity.end(), [&counts](ItemId a, ItemId b) {
    const auto ca = counts.at(a);
    const auto cb = counts.at(b);
    return ca != cb ? ca > cb : a < b;
  });
  const std::size_t top_decile = (by_popularity.size() + 9) / 10;
  std::vector<ItemId> pool(by_popularity.begin() + static_cast<std::ptrdiff_t>(top_decile),
                           by_popularity.end());
  if (count > pool.size())
    throw ValidationError("not enough items outside the top decile to pick targets from");

  Rng rng(derive_seed(seed, kTargetStream));
  std::vector<ItemId> targets = rng.sample(std::move(pool), count);
  std::sort(targets.begin(), targets.end());
  return targets;
}

ItemId most_rated_item(const Dataset& ds) {
  if (ds.empty()) throw ValidationError("empty dataset");
  const auto counts = rating_counts(ds);
  ItemId best = ds.items.front();
  std::int64_t best_count = -1;
  for (const ItemId item : ds.items) {
    const auto c = counts.at(item);
    if (c > best_count) {
      best = item;
      best_count = c;
    }
  }
  return best;
}

AttackCampaign generate(const Dataset& ds, const GlobalStats& stats, const AttackConfig& cfg,
                        int block_days) {
  if (ds.empty()) throw ValidationError("cannot attack an empty dataset");
  if (!(cfg.attack_size > 0.0 && cfg.attack_size <= 1.0))
    throw ValidationError("attack_size must lie in (0, 1]");
  if (!(cfg.filler_size > 0.0 && cfg.filler_size < 1.0))
    throw ValidationError("filler_size must lie in (0, 1)");
  if (cfg.targets.empty()) throw ValidationError("attack needs at least one target item");
  if (cfg.model == AttackModel::Bandwagon && cfg.selected.empty())
    throw ValidationError("bandwagon attack needs at least one selected item");

  for (const ItemId t : cfg.targets)
    if (std::find(cfg.selected.begin(), cfg.selected.end(), t) != cfg.selected.end())
      throw ValidationError("target and selected sets overlap");

  const BlockGrid grid = make_grid(ds, block_days);
  const std::int64_t last_block = grid.block_of(ds.t_end);
  if (cfg.injection_block < 0 || cfg.injection_block > last_block) {
    std::ostringstream msg;
    msg << "injection block " << cfg.injection_block << " outside the dataset's range [0, "
        << last_block << "]";
    throw ValidationError(msg.str());
  }
  const std::int64_t block_lo = grid.origin + cfg.injection_block * grid.width;
  const std::int64_t block_hi = std::min(block_lo + grid.width - 1, ds.t_end);

  const auto profile_count = static_cast<std::size_t>(
      std::llround(cfg.attack_size * static_cast<double>(ds.users.size())));
  const auto filler_count = static_cast<std::size_t>(
      std::llround(cfg.filler_size * static_cast<double>(ds.items.size())));

  // Filler pool: the catalog minus targets and selected items.
  std::vector<ItemId> excluded = cfg.targets;
  excluded.insert(excluded.end(), cfg.selected.begin(), cfg.selected.end());
  std::sort(excluded.begin(), excluded.end());
  std::vector<ItemId> pool;
  pool.reserve(ds.items.size());
  std::set_difference(ds.items.begin(), ds.items.end(), excluded.begin(), excluded.end(),
                      std::back_inserter(pool));
  if (filler_count > pool.size())
    throw ValidationError("filler pool (" + std::to_string(pool.size()) +
                          " items) smaller than the required filler count (" +
                          std::to_string(filler_count) + ")");

  const int target_value = cfg.intent == AttackIntent::Push ? ds.scale.max : ds.scale.min;
  const UserId first_user = ds.users.back() + 1;

  AttackCampaign campaign;
  campaign.config = cfg;
  campaign.profiles.reserve(profile_count);

  Rng rng(derive_seed(cfg.seed, kProfileStream));
  for (std::size_t p = 0; p < profile_count; ++p) {
    AttackProfile profile;
    profile.user = first_user + static_cast<UserId>(p);

    const auto stamp = [&rng, block_lo, block_hi]() {
      return rng.uniform_int(block_lo, block_hi);
    };

    for (const ItemId t : cfg.targets)
      profile.ratings.push_back({profile.user, t, target_value, stamp()});

    if (cfg.model == AttackModel::Bandwagon)
      for (const ItemId s : cfg.selected)
        profile.ratings.push_back({profile.user, s, ds.scale.max, stamp()});

    for (const ItemId f : rng.sample(pool, filler_count)) {
      double value = 0.0;
      if (cfg.model == AttackModel::Random) {
        value = rng.next_normal(stats.mean, stats.stddev);
      } else {
        const ItemStats& s = stats.items.at(f);
        value = rng.next_normal(s.mean, s.stddev);
      }
      profile.ratings.push_back({profile.user, f, clamp_round(value, ds.scale), stamp()});
    }

    campaign.labels.insert(profile.user);
    campaign.profiles.push_back(std::move(profile));
  }
  return campaign;
}

InjectResult inject(const Dataset& ds, const AttackCampaign& campaign) {
  for (const UserId label : campaign.labels)
    if (std::binary_search(ds.users.begin(), ds.users.end(), label))
      throw ValidationError("synthetic user id " + std::to_string(label) +
                            " collides with a genuine user");

  std::vector<Rating> combined = ds.ratings;
  combined.reserve(ds.ratings.size() + campaign.rating_count());
  for (const AttackProfile& p : campaign.profiles)
    combined.insert(combined.end(), p.ratings.begin(), p.ratings.end());

  InjectResult result;
  // Campaign ratings are generated in-scale and per-profile unique, and the
  // synthetic ids are disjoint from genuine users, so no duplicate pair can
  // appear; skip the quadratic-ish recheck for large injections.
  result.data = make_dataset(std::move(combined), ds.scale, true);
  result.truth = campaign.labels;
  return result;
}

}  // namespace shillguard
