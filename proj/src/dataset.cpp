#include "shillguard/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <utility>

#include "shillguard/error.hpp"

namespace shillguard {

namespace {

std::int64_t parse_int_field(std::string_view field, std::size_t line, const char* name) {
  std::int64_t value = 0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || field.empty())
    throw ParseError(std::string("non-numeric ") + name + " field '" + std::string(field) + "'",
                     line);
  return value;
}

void check_rating(const Rating& r, const RatingScale& scale, std::size_t line) {
  if (r.value < scale.min || r.value > scale.max) {
    std::ostringstream msg;
    msg << "rating outside scale [" << scale.min << ", " << scale.max << "]: " << r.value;
    if (line > 0) throw ParseError(msg.str(), line);
    throw ValidationError(msg.str());
  }
  if (r.timestamp < 0) {
    std::ostringstream msg;
    msg << "negative timestamp: " << r.timestamp;
    if (line > 0) throw ParseError(msg.str(), line);
    throw ValidationError(msg.str());
  }
}

struct PairHash {
  std::size_t operator()(const std::pair<UserId, ItemId>& p) const {
    auto h = static_cast<std::uint64_t>(p.first) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(p.second) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Shared finalizer; `checked` skips per-record validation when the caller
// already guarantees it (e.g. injection of a validated campaign).
Dataset finalize(std::vector<Rating> ratings, RatingScale scale, bool allow_duplicates,
                 bool checked) {
  Dataset ds;
  ds.scale = scale;
  ds.ratings = std::move(ratings);
  if (ds.ratings.empty()) return ds;

  if (!checked) {
    for (const Rating& r : ds.ratings) check_rating(r, scale, 0);
  }
  if (!allow_duplicates) {
    std::unordered_set<std::pair<UserId, ItemId>, PairHash> seen;
    seen.reserve(ds.ratings.size() * 2);
    for (const Rating& r : ds.ratings) {
      if (!seen.insert({r.user, r.item}).second) {
        std::ostringstream msg;
        msg << "duplicate rating for (user " << r.user << ", item " << r.item << ")";
        throw ValidationError(msg.str());
      }
    }
  }

  ds.t_start = ds.ratings.front().timestamp;
  ds.t_end = ds.t_start;
  ds.users.reserve(1024);
  ds.items.reserve(2048);
  for (const Rating& r : ds.ratings) {
    ds.t_start = std::min(ds.t_start, r.timestamp);
    ds.t_end = std::max(ds.t_end, r.timestamp);
    ds.users.push_back(r.user);
    ds.items.push_back(r.item);
  }
  std::sort(ds.users.begin(), ds.users.end());
  ds.users.erase(std::unique(ds.users.begin(), ds.users.end()), ds.users.end());
  std::sort(ds.items.begin(), ds.items.end());
  ds.items.erase(std::unique(ds.items.begin(), ds.items.end()), ds.items.end());
  return ds;
}

}  // namespace

Dataset make_dataset(std::vector<Rating> ratings, RatingScale scale, bool allow_duplicates) {
  return finalize(std::move(ratings), scale, allow_duplicates, false);
}

Dataset parse_ratings(std::istream& in, const LoadOptions& opts) {
  std::vector<Rating> ratings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::string_view rest = line;
    std::string_view field[4];
    for (int i = 0; i < 3; ++i) {
      const auto tab = rest.find('\t');
      if (tab == std::string_view::npos)
        throw ParseError("malformed line, expected 4 tab-separated fields", line_no);
      field[i] = rest.substr(0, tab);
      rest.remove_prefix(tab + 1);
    }
    if (rest.find('\t') != std::string_view::npos)
      throw ParseError("malformed line, expected 4 tab-separated fields", line_no);
    field[3] = rest;

    Rating r;
    r.user = parse_int_field(field[0], line_no, "user");
    r.item = parse_int_field(field[1], line_no, "item");
    const std::int64_t value = parse_int_field(field[2], line_no, "rating");
    if (value < opts.scale.min || value > opts.scale.max) {
      std::ostringstream msg;
      msg << "rating outside scale [" << opts.scale.min << ", " << opts.scale.max
          << "]: " << value;
      throw ParseError(msg.str(), line_no);
    }
    r.value = static_cast<int>(value);
    r.timestamp = parse_int_field(field[3], line_no, "timestamp");
    check_rating(r, opts.scale, line_no);
    ratings.push_back(r);
  }
  return finalize(std::move(ratings), opts.scale, opts.allow_duplicates, true);
}

Dataset load_ratings_file(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_ratings(in, opts);
}

void write_ratings(std::ostream& out, const Dataset& ds) {
  std::vector<Rating> sorted = ds.ratings;
  std::sort(sorted.begin(), sorted.end(), [](const Rating& a, const Rating& b) {
    return std::tie(a.timestamp, a.user, a.item) < std::tie(b.timestamp, b.user, b.item);
  });
  for (const Rating& r : sorted)
    out << r.user << '\t' << r.item << '\t' << r.value << '\t' << r.timestamp << '\n';
}

void write_ratings_file(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_ratings(out, ds);
  if (!out) throw IoError("write failed: " + path.string());
}

BlockGrid make_grid(const Dataset& ds, int block_days) {
  if (block_days < 1) throw ValidationError("block_days must be >= 1");
  if (ds.empty()) throw ValidationError("cannot build a block grid over an empty dataset");
  return BlockGrid{ds.t_start, static_cast<std::int64_t>(block_days) * kSecondsPerDay};
}

namespace {

// Per-item aggregation shared by the serial and parallel paths.
BlockSeries aggregate_item(ItemId item, std::vector<std::pair<std::int64_t, int>>& events) {
  std::sort(events.begin(), events.end());
  BlockSeries series;
  series.item = item;
  for (const auto& [block, value] : events) {
    if (series.entries.empty() || series.entries.back().block != block)
      series.entries.push_back({block, 0, 0});
    series.entries.back().z += value;
    series.entries.back().n += 1;
  }
  return series;
}

}  // namespace

std::vector<BlockSeries> partition_blocks(const Dataset& ds, int block_days) {
  const BlockGrid grid = make_grid(ds, block_days);

  std::unordered_map<ItemId, std::vector<std::pair<std::int64_t, int>>> per_item;
  per_item.reserve(ds.items.size() * 2);
  for (const Rating& r : ds.ratings)
    per_item[r.item].emplace_back(grid.block_of(r.timestamp), r.value);

  std::vector<BlockSeries> result(ds.items.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    const ItemId item = ds.items[i];
    result[i] = aggregate_item(item, per_item.at(item));
  }
  return result;
}

std::vector<BlockSeries> partition_blocks_serial(const Dataset& ds, int block_days) {
  const BlockGrid grid = make_grid(ds, block_days);

  // Straight-line reference: bucket every rating, then emit items in order.
  std::unordered_map<ItemId, std::vector<std::pair<std::int64_t, int>>> per_item;
  per_item.reserve(ds.items.size() * 2);
  for (const Rating& r : ds.ratings)
    per_item[r.item].emplace_back(grid.block_of(r.timestamp), r.value);

  std::vector<BlockSeries> result;
  result.reserve(ds.items.size());
  for (const ItemId item : ds.items) result.push_back(aggregate_item(item, per_item.at(item)));
  return result;
}

std::int64_t distinct_block_count(const std::vector<BlockSeries>& series) {
  std::unordered_set<std::int64_t> blocks;
  for (const BlockSeries& s : series)
    for (const BlockEntry& e : s.entries) blocks.insert(e.block);
  return static_cast<std::int64_t>(blocks.size());
}

GlobalStats global_stats(const Dataset& ds) {
  if (ds.empty()) throw ValidationError("global_stats requires a non-empty dataset");

  GlobalStats stats;
  stats.items.reserve(ds.items.size() * 2);

  // Two-pass mean/std, sample (n-1) denominator throughout.
  std::int64_t value_sum = 0;
  for (const Rating& r : ds.ratings) {
    value_sum += r.value;
    auto [it, inserted] = stats.items.try_emplace(r.item);
    ItemStats& s = it->second;
    if (inserted) {
      s.first_ts = r.timestamp;
      s.last_ts = r.timestamp;
    } else {
      s.first_ts = std::min(s.first_ts, r.timestamp);
      s.last_ts = std::max(s.last_ts, r.timestamp);
    }
    s.count += 1;
    s.mean += r.value;  // holds the sum until the division below
  }
  const auto n = static_cast<double>(ds.ratings.size());
  stats.mean = static_cast<double>(value_sum) / n;
  for (auto& [item, s] : stats.items) s.mean /= static_cast<double>(s.count);

  double total_sq = 0.0;
  for (const Rating& r : ds.ratings) {
    const double d = r.value - stats.mean;
    total_sq += d * d;
    ItemStats& s = stats.items.at(r.item);
    const double di = r.value - s.mean;
    s.stddev += di * di;  // holds the squared-residual sum until below
  }
  stats.stddev = ds.ratings.size() > 1 ? std::sqrt(total_sq / (n - 1.0)) : 0.0;
  for (auto& [item, s] : stats.items)
    s.stddev = s.count > 1 ? std::sqrt(s.stddev / static_cast<double>(s.count - 1)) : 0.0;
  return stats;
}

}  // namespace shillguard
