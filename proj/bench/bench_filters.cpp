#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "shillguard/dataset.hpp"
#include "shillguard/rdakf.hpp"
#include "shillguard/rng.hpp"
#include "shillguard/synthdata.hpp"

// Times the OpenMP kernels against their serial references and checks that
// both produce identical output.
//
//   bench_filters [items] [max_blocks] [reps]

namespace {

using namespace shillguard;
using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point start) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

std::vector<BlockSeries> random_series(std::size_t items, std::int64_t max_blocks,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<BlockSeries> series(items);
  for (std::size_t i = 0; i < items; ++i) {
    series[i].item = static_cast<ItemId>(i + 1);
    const std::int64_t blocks = rng.uniform_int(2, max_blocks);
    std::int64_t block = 0;
    for (std::int64_t b = 0; b < blocks; ++b) {
      block += rng.uniform_int(1, 3);
      const std::int64_t n = rng.uniform_int(1, 20);
      std::int64_t z = 0;
      for (std::int64_t k = 0; k < n; ++k) z += rng.uniform_int(1, 5);
      series[i].entries.push_back({block, z, n});
    }
  }
  return series;
}

bool same_records(const std::vector<DeviationRecord>& a, const std::vector<DeviationRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].item != b[i].item || a[i].block != b[i].block || a[i].v != b[i].v ||
        a[i].v_A != b[i].v_A || a[i].n_P != b[i].n_P)
      return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t items = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
  const std::int64_t max_blocks = argc > 2 ? std::strtoll(argv[2], nullptr, 10) : 64;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 3;

  std::printf("workload: %zu series, up to %lld blocks each, best of %d\n", items,
              static_cast<long long>(max_blocks), reps);

  const auto series = random_series(items, max_blocks, 7);

  double serial_ms = 1e300;
  double parallel_ms = 1e300;
  std::vector<DeviationRecord> serial_out;
  std::vector<DeviationRecord> parallel_out;
  for (int r = 0; r < reps; ++r) {
    auto t0 = clock_type::now();
    serial_out = run_items_serial(series);
    serial_ms = std::min(serial_ms, ms_since(t0));

    t0 = clock_type::now();
    parallel_out = run_items(series);
    parallel_ms = std::min(parallel_ms, ms_since(t0));
  }
  if (!same_records(serial_out, parallel_out)) {
    std::printf("FAIL: parallel filter output differs from the serial reference\n");
    return 1;
  }
  std::printf("rdakf    serial %9.2f ms   omp %9.2f ms   speedup %.2fx   (%zu records)\n",
              serial_ms, parallel_ms, serial_ms / parallel_ms, serial_out.size());

  const Dataset ds = synthetic_movielens(1);
  double part_serial_ms = 1e300;
  double part_parallel_ms = 1e300;
  std::vector<BlockSeries> part_serial;
  std::vector<BlockSeries> part_parallel;
  for (int r = 0; r < reps; ++r) {
    auto t0 = clock_type::now();
    part_serial = partition_blocks_serial(ds, 4);
    part_serial_ms = std::min(part_serial_ms, ms_since(t0));

    t0 = clock_type::now();
    part_parallel = partition_blocks(ds, 4);
    part_parallel_ms = std::min(part_parallel_ms, ms_since(t0));
  }
  if (part_serial != part_parallel) {
    std::printf("FAIL: parallel partition output differs from the serial reference\n");
    return 1;
  }
  std::printf("partition serial %8.2f ms   omp %9.2f ms   speedup %.2fx   (%zu items)\n",
              part_serial_ms, part_parallel_ms, part_serial_ms / part_parallel_ms,
              part_serial.size());
  return 0;
}
