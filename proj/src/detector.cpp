#include "shillguard/detector.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace shillguard {

std::vector<FlaggedBlock> flag_blocks(std::span<const DeviationRecord> devs, const Thresholds& th,
                                      AttackIntent intent) {
  std::vector<FlaggedBlock> flagged;
  for (const DeviationRecord& d : devs) {
    const bool abnormal = intent == AttackIntent::Push
                              ? (d.v > th.eta && d.v_A > th.eta_A)
                              : (d.v < th.eta_lower && d.v_A < th.eta_A_lower);
    if (abnormal) flagged.push_back({d.item, d.block, d.v, d.v_A});
  }
  return flagged;
}

DetectionResult extract_suspects(const Dataset& ds, int block_days,
                                 std::span<const FlaggedBlock> flagged, AttackIntent intent) {
  DetectionResult result;
  result.flagged.assign(flagged.begin(), flagged.end());
  if (flagged.empty()) return result;

  const BlockGrid grid = make_grid(ds, block_days);
  std::unordered_map<ItemId, std::unordered_set<std::int64_t>> flagged_blocks;
  for (const FlaggedBlock& f : flagged) flagged_blocks[f.item].insert(f.block);

  const int extreme = intent == AttackIntent::Push ? ds.scale.max : ds.scale.min;
  for (const Rating& r : ds.ratings) {
    if (r.value != extreme) continue;
    const auto it = flagged_blocks.find(r.item);
    if (it == flagged_blocks.end()) continue;
    if (!it->second.contains(grid.block_of(r.timestamp))) continue;
    result.suspicious_ratings.push_back(r);
    result.suspicious_users.insert(r.user);
  }
  std::sort(result.suspicious_ratings.begin(), result.suspicious_ratings.end(),
            [](const Rating& a, const Rating& b) {
              return std::tie(a.timestamp, a.user, a.item) < std::tie(b.timestamp, b.user, b.item);
            });
  return result;
}

}  // namespace shillguard
