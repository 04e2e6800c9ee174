#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "shillguard/dataset.hpp"
#include "shillguard/rng.hpp"
#include "shillguard/synthdata.hpp"

namespace fixture {

// Shared MovieLens-100K-shaped dataset; generated once per test binary.
inline const shillguard::Dataset& ml100k() {
  static const shillguard::Dataset ds = shillguard::synthetic_movielens(1);
  return ds;
}

// The fixture serialized to a TSV file for subprocess/IO tests.
inline const std::filesystem::path& ml100k_file() {
  static const std::filesystem::path path = [] {
    const auto p = std::filesystem::temp_directory_path() / "shillguard_fixture_u.data";
    shillguard::write_ratings_file(p, ml100k());
    return p;
  }();
  return path;
}

// Small random dataset for property tests: distinct (user, item) pairs,
// values across the full scale, timestamps inside [t0, t0 + span).
inline shillguard::Dataset random_dataset(std::uint64_t seed, std::size_t count,
                                          std::int64_t users = 40, std::int64_t items = 25,
                                          std::int64_t span = 60 * 86400) {
  using namespace shillguard;
  Rng rng(seed);
  std::vector<Rating> ratings;
  std::vector<std::pair<UserId, ItemId>> pairs;
  for (UserId u = 1; u <= users; ++u)
    for (ItemId i = 1; i <= items; ++i) pairs.emplace_back(u, i);
  rng.shuffle(pairs);
  count = std::min(count, pairs.size());
  const std::int64_t t0 = 500000000;
  for (std::size_t k = 0; k < count; ++k) {
    ratings.push_back({pairs[k].first, pairs[k].second,
                       static_cast<int>(rng.uniform_int(1, 5)), t0 + rng.uniform_int(0, span - 1)});
  }
  return make_dataset(std::move(ratings));
}

}  // namespace fixture
