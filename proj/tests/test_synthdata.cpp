#include <doctest.h>

#include <map>

#include "fixture.hpp"
#include "shillguard/synthdata.hpp"
#include "shillguard/taxonomy.hpp"

using namespace shillguard;

TEST_CASE("the synthetic log reproduces the MovieLens-100K shape") {
  const Dataset& ds = fixture::ml100k();
  CHECK(ds.size() == 100000);
  CHECK(ds.users.size() == 943);
  CHECK(ds.items.size() == 1682);
  CHECK(ds.users.front() == 1);
  CHECK(ds.users.back() == 943);
  CHECK(ds.items.front() == 1);
  CHECK(ds.items.back() == 1682);

  const auto series = partition_blocks(ds, 4);
  CHECK(series.size() == 1682);
  CHECK(distinct_block_count(series) == 54);

  std::map<UserId, std::int64_t> per_user;
  for (const Rating& r : ds.ratings) per_user[r.user] += 1;
  std::int64_t least = 1 << 30;
  for (const auto& [user, n] : per_user) least = std::min(least, n);
  CHECK(least >= 20);
}

TEST_CASE("generation is deterministic per seed") {
  const Dataset a = synthetic_movielens(2);
  const Dataset b = synthetic_movielens(2);
  CHECK(a.ratings == b.ratings);
  const Dataset c = synthetic_movielens(3);
  CHECK(a.ratings != c.ratings);
}

TEST_CASE("other seeds keep the shape and taxonomy populations") {
  const Dataset ds = synthetic_movielens(9);
  CHECK(ds.size() == 100000);
  CHECK(ds.users.size() == 943);
  CHECK(ds.items.size() == 1682);

  const GlobalStats st = global_stats(ds);
  const auto profiles = build_profiles(st);
  const double nbar = mean_item_count(st);
  std::int64_t counts[4] = {0, 0, 0, 0};
  for (const ItemProfile& p : profiles) counts[static_cast<int>(classify(p, nbar))] += 1;
  CHECK(counts[0] >= 12);
  CHECK(counts[1] >= 6);
  CHECK(counts[2] >= 32);
  CHECK(counts[3] >= 50);
}
