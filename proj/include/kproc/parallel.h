#ifndef KPROC_PARALLEL_H_
#define KPROC_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "kproc/rng.h"

namespace kproc {

// Replicas are grouped into fixed-size blocks. Each block is reduced
// sequentially in replica order into its own accumulator and the block
// accumulators are merged pairwise in block order, so results depend on
// (seed, replicas) only, never on the worker count.
inline constexpr std::uint64_t kReplicaBlock = 2048;

// body(replica_index, rng, accumulator) runs once per replica with the
// replica's own stream. Accum must be copyable from `prototype` and provide
// merge(const Accum&).
template <class Accum, class Body>
Accum run_replicas(std::uint64_t seed, std::uint64_t replicas, int jobs, const Accum& prototype,
                   Body&& body) {
  const std::uint64_t blocks = (replicas + kReplicaBlock - 1) / kReplicaBlock;
  std::vector<Accum> partial(blocks, prototype);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t b = next++; b < blocks; b = next++) {
      const std::uint64_t first = b * kReplicaBlock;
      const std::uint64_t last = std::min(replicas, first + kReplicaBlock);
      for (std::uint64_t r = first; r < last; ++r) {
        Rng rng = replica_rng(seed, r);
        body(r, rng, partial[b]);
      }
    }
  };
  const auto workers = static_cast<std::uint64_t>(std::max(1, jobs));
  if (workers == 1 || blocks <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::uint64_t w = 0; w < std::min(workers, blocks); ++w) pool.emplace_back(worker);
  }
  if (blocks == 0) return prototype;
  for (std::uint64_t stride = 1; stride < blocks; stride *= 2) {
    for (std::uint64_t i = 0; i + stride < blocks; i += 2 * stride) {
      partial[i].merge(partial[i + stride]);
    }
  }
  return std::move(partial[0]);
}

}  // namespace kproc

#endif  // KPROC_PARALLEL_H_
