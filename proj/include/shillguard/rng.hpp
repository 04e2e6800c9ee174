#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace shillguard {

// Splitmix64 finalizer; spreads low-entropy seeds over the full word.
std::uint64_t mix_seed(std::uint64_t x);

// Independent sub-seed for stream `index` of a master seed. Adding streams
// never perturbs earlier ones.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Deterministic random source. All draws go through explicit methods here
// instead of std::*_distribution, whose output is not pinned by the standard;
// a (seed, call sequence) pair reproduces bit-identical values everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix_seed(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double next_unit();

  // Box-Muller normal draw.
  double next_normal(double mean, double stddev);

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i - 1)));
      std::swap(v[i - 1], v[j]);
    }
  }

  // First k elements of a seeded shuffle of v; order is the draw order.
  template <typename T>
  std::vector<T> sample(std::vector<T> v, std::size_t k) {
    std::vector<T> out;
    out.reserve(k);
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < k && i < n; ++i) {
      const auto j = static_cast<std::size_t>(
          uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)));
      std::swap(v[i], v[j]);
      out.push_back(v[i]);
    }
    return out;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace shillguard
