#pragma once

#include <cstdint>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "shillguard/dataset.hpp"

namespace shillguard {

enum class AttackModel { Random, Average, Bandwagon };
enum class AttackIntent { Push, Nuke };

std::string_view to_string(AttackModel m);
std::string_view to_string(AttackIntent i);
AttackModel attack_model_from_string(std::string_view s);
AttackIntent attack_intent_from_string(std::string_view s);

struct AttackConfig {
  AttackModel model = AttackModel::Average;
  AttackIntent intent = AttackIntent::Push;
  double attack_size = 0.10;   // profile count as a fraction of genuine users
  double filler_size = 0.05;   // filler count as a fraction of the item catalog
  std::vector<ItemId> targets;     // every profile rates every target
  std::vector<ItemId> selected;    // bandwagon only; rated at the scale maximum
  std::int64_t injection_block = 0;
  std::uint64_t seed = 0;
};

struct AttackProfile {
  UserId user = 0;
  std::vector<Rating> ratings;
};

struct AttackCampaign {
  std::vector<AttackProfile> profiles;
  std::unordered_set<UserId> labels;  // the synthetic user ids
  AttackConfig config;

  std::size_t rating_count() const;
};

// Seeded pick of `count` target items outside the top decile by rating count.
std::vector<ItemId> default_targets(const Dataset& ds, std::size_t count, std::uint64_t seed);

// Most-rated item (smallest id on ties); the bandwagon default selected set.
ItemId most_rated_item(const Dataset& ds);

// Profile count = round(attack_size * genuine users). Fillers are drawn from
// N(mean, std^2) of the whole dataset (random model) or of each filler item
// (average and bandwagon models), rounded half away from zero and clamped to
// the rating scale. Timestamps are uniform inside the injection block.
AttackCampaign generate(const Dataset& ds, const GlobalStats& stats, const AttackConfig& cfg,
                        int block_days);

struct InjectResult {
  Dataset data;
  std::unordered_set<UserId> truth;
};

// Appends the campaign to the dataset; the original ratings are unchanged.
InjectResult inject(const Dataset& ds, const AttackCampaign& campaign);

}  // namespace shillguard
