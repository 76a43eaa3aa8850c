#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dynq/common.hpp"

namespace dynq {

// Update-cost ledger for one step. Rounds are synchronous rule applications;
// block events record work that the cost model treats as a single unit even
// though it is not one rule application (small-structure solves, fixpoint
// verification, full reinversions).
struct RoundMeter {
  uint64_t rounds_used = 0;
  uint64_t bound = 0;
  std::vector<std::pair<std::string, uint64_t>> block_events;

  void block(const std::string& label, uint64_t count = 1) {
    for (auto& [l, c] : block_events) {
      if (l == label) {
        c += count;
        return;
      }
    }
    block_events.emplace_back(label, count);
  }

  void reset(uint64_t new_bound) {
    rounds_used = 0;
    bound = new_bound;
    block_events.clear();
  }
};

// Iterates `round_fn` (a pure map from the previous round's relations to the
// next round's) until it makes no change, erroring if the declared bound
// rounds do not reach the fixpoint.
//
// Each invocation reads only the state produced by the previous one, so the
// rounds are synchronous by construction. An invocation that returns its
// input unchanged counts toward rounds_used: detecting quiescence costs a
// round. When all `bound` rounds changed something, one extra uncounted
// invocation verifies the fixpoint; it is recorded as a "fixpoint-verify"
// block so the ledger still reflects the work done.
template <class State, class RoundFn>
State run_rounds(State state, uint64_t bound, RoundMeter& meter, RoundFn&& round_fn) {
  for (uint64_t i = 0; i < bound; ++i) {
    State next = round_fn(static_cast<const State&>(state));
    meter.rounds_used += 1;
    if (next == state) return state;
    state = std::move(next);
  }
  State check = round_fn(static_cast<const State&>(state));
  meter.block("fixpoint-verify");
  if (!(check == state)) {
    fail(Err::BoundExceededWithoutFixpoint,
         "still changing after " + std::to_string(bound) + " rounds");
  }
  return state;
}

}  // namespace dynq
