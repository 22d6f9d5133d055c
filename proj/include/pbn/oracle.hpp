#pragma once

#include <optional>
#include <vector>

#include "pbn/dynamics.hpp"
#include "pbn/env.hpp"

namespace pbn {

/// One prescribed intervention: the attractor state to act at, and the
/// genes flipped there.
struct StrategyStep {
  State at_state = 0;
  Intervention intervention;
};

struct ControlStrategy {
  std::vector<StrategyStep> steps;
  int length() const { return static_cast<int>(steps.size()); }
};

/// Shortest guaranteed strategy from the source to the target attractor:
/// each intervention must land inside the strong basin of the next
/// attractor, so every asynchronous execution reaches the target. Flip sets
/// are tried by cardinality then lexicographically, source states in
/// ascending order; the first shortest strategy found is returned.
/// Empty result when no guaranteed strategy exists.
std::optional<ControlStrategy> minimal_control(
    const Stg& stg, const std::vector<Attractor>& all, int source_id,
    int target_id, int max_flips);

/// Independent check: enumerates intervention sequences up to max_len,
/// validating each step by forward reachability (the flipped state must
/// reach exactly one attractor). Does not use basin computations.
std::optional<int> brute_force_min_length(const Stg& stg,
                                          const std::vector<Attractor>& all,
                                          int source_id, int target_id,
                                          int max_flips, int max_len);

/// All flip sets of size 1..max_flips, by cardinality then lexicographic.
std::vector<std::vector<int>> enumerate_flip_sets(int gene_count,
                                                  int max_flips);

}  // namespace pbn
