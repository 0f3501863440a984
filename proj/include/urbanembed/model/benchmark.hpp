#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace urbanembed {

struct FusionTiming {
  std::size_t regions = 0;
  double attentive_ms = 0.0;       // memory attention over 4 views
  double self_attention_ms = 0.0;  // quadratic self-attention over 4 views
};

/// Median-of-`runs` forward time of both fusion operators on random views
/// of `regions` x `dim`. After one warm-up call, each run repeats the call
/// at least `inner` times and long enough to span about 100 ms.
FusionTiming time_fusion(std::size_t regions, std::size_t dim = 144, std::size_t memory = 32, std::size_t runs = 5,
                         std::size_t inner = 3, std::uint64_t seed = 0);

/// Same, for several sizes at once. Runs are interleaved across sizes and
/// operators, so ratios between sizes are not skewed by machine load that
/// drifts over the course of the benchmark.
std::vector<FusionTiming> time_fusion(const std::vector<std::size_t>& sizes, std::size_t dim = 144,
                                      std::size_t memory = 32, std::size_t runs = 5, std::size_t inner = 3,
                                      std::uint64_t seed = 0);

}  // namespace urbanembed
