#pragma once

#include <cstdint>

#include "shillguard/dataset.hpp"

namespace shillguard {

// Fabricates a rating log with the shape of MovieLens-100K: 943 users, 1682
// items, exactly 100000 integer ratings in [1, 5] spanning 54 four-day
// blocks, every user holding at least 20 ratings. Item life cycles and
// per-item rating counts are laid out so that all four taxonomy categories
// are populated well past the default stratification quotas. Deterministic
// for a fixed seed. Used by the test suites and benchmarks as a stand-in
// when the real dataset file is not available.
Dataset synthetic_movielens(std::uint64_t seed = 1);

}  // namespace shillguard
