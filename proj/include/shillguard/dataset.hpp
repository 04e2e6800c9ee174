#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <unordered_map>
#include <vector>

namespace shillguard {

using UserId = std::int64_t;
using ItemId = std::int64_t;

inline constexpr std::int64_t kSecondsPerDay = 86400;

struct RatingScale {
  int min = 1;
  int max = 5;

  friend bool operator==(const RatingScale&, const RatingScale&) = default;
};

// One (user, item, value, timestamp) event.
struct Rating {
  UserId user = 0;
  ItemId item = 0;
  int value = 0;
  std::int64_t timestamp = 0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

struct Dataset {
  std::vector<Rating> ratings;  // input order preserved
  RatingScale scale;
  std::int64_t t_start = 0;  // min timestamp; 0 for an empty dataset
  std::int64_t t_end = 0;    // max timestamp; 0 for an empty dataset
  std::vector<UserId> users;  // distinct, ascending
  std::vector<ItemId> items;  // distinct, ascending

  bool empty() const { return ratings.empty(); }
  std::size_t size() const { return ratings.size(); }
};

struct LoadOptions {
  RatingScale scale;
  bool allow_duplicates = false;  // duplicate (user, item) pairs rejected by default
};

// Tab-separated "user item rating timestamp", one record per line, LF or CRLF.
Dataset parse_ratings(std::istream& in, const LoadOptions& opts = {});
Dataset load_ratings_file(const std::filesystem::path& path, const LoadOptions& opts = {});

// Validates invariants and fills in the derived fields.
Dataset make_dataset(std::vector<Rating> ratings, RatingScale scale = {},
                     bool allow_duplicates = false);

// Canonical serialization: TSV sorted by (timestamp, user, item).
void write_ratings(std::ostream& out, const Dataset& ds);
void write_ratings_file(const std::filesystem::path& path, const Dataset& ds);

// Fixed-width time blocks anchored at the dataset's first timestamp.
struct BlockGrid {
  std::int64_t origin = 0;
  std::int64_t width = 0;

  std::int64_t block_of(std::int64_t timestamp) const { return (timestamp - origin) / width; }
};

BlockGrid make_grid(const Dataset& ds, int block_days);

struct BlockEntry {
  std::int64_t block = 0;  // block index, >= 0
  std::int64_t z = 0;      // sum of rating values in the block
  std::int64_t n = 0;      // rating count in the block (n_P), > 0

  friend bool operator==(const BlockEntry&, const BlockEntry&) = default;
};

// Per-item rating signal: one entry per non-empty block, ascending.
struct BlockSeries {
  ItemId item = 0;
  std::vector<BlockEntry> entries;

  friend bool operator==(const BlockSeries&, const BlockSeries&) = default;
};

// One series per rated item, sorted by item id. The parallel kernel and the
// serial reference return identical results.
std::vector<BlockSeries> partition_blocks(const Dataset& ds, int block_days);
std::vector<BlockSeries> partition_blocks_serial(const Dataset& ds, int block_days);

std::int64_t distinct_block_count(const std::vector<BlockSeries>& series);

struct ItemStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1); 0 when n == 1
  std::int64_t count = 0;
  std::int64_t first_ts = 0;
  std::int64_t last_ts = 0;
};

struct GlobalStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::unordered_map<ItemId, ItemStats> items;
};

GlobalStats global_stats(const Dataset& ds);

}  // namespace shillguard
