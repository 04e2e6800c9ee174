#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "shillguard/attackgen.hpp"
#include "shillguard/calibration.hpp"
#include "shillguard/dataset.hpp"
#include "shillguard/rdakf.hpp"

namespace shillguard {

struct FlaggedBlock {
  ItemId item = 0;
  std::int64_t block = 0;
  double v = 0.0;
  double v_A = 0.0;
};

struct DetectionResult {
  std::vector<FlaggedBlock> flagged;
  std::vector<Rating> suspicious_ratings;  // canonical (timestamp, user, item) order
  std::set<UserId> suspicious_users;
};

// Joint strict-inequality rule: push flags v > eta and v_A > eta_A; nuke
// flags v < eta_lower and v_A < eta_A_lower. A record abnormal in only one
// of the two deviations is never flagged.
std::vector<FlaggedBlock> flag_blocks(std::span<const DeviationRecord> devs, const Thresholds& th,
                                      AttackIntent intent);

// Keeps only ratings inside flagged (item, block) pairs whose value is the
// scale extreme for the intent, and maps them to their users.
DetectionResult extract_suspects(const Dataset& ds, int block_days,
                                 std::span<const FlaggedBlock> flagged, AttackIntent intent);

}  // namespace shillguard
