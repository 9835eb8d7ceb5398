#pragma once

#include <cstdint>
#include <optional>

#include "tbp/pop1.hpp"
#include "tbp/pop2.hpp"
#include "tbp/sample.hpp"

namespace tbp {

struct SimulateOptions {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool retain_counterfactuals = false;
  // Pop1: also emit the h column for this predictor. Pop2 always emits
  // h = x1 + x2.
  std::optional<Pop1TbpKind> tbp;
};

// iid draws from the generative model. Every record consumes its own RNG
// stream keyed by (seed, record index), so output is byte-reproducible for
// any worker count. The _serial variants are single-threaded references that
// produce identical samples.
Sample simulate(const ValidatedPop1Spec& spec, const SimulateOptions& options);
Sample simulate(const Pop2Spec& spec, const SimulateOptions& options);
Sample simulate_serial(const ValidatedPop1Spec& spec, const SimulateOptions& options);
Sample simulate_serial(const Pop2Spec& spec, const SimulateOptions& options);

}  // namespace tbp
