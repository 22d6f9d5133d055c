#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pbn/model.hpp"

namespace pbn {

/// Bit-packed network state: bit i holds the value of gene i.
using State = std::uint64_t;

std::string to_bitstring(State s, int n);  // gene 0 printed leftmost
State from_bitstring(const std::string& bits);

inline bool get_bit(State s, int gene) { return (s >> gene) & 1u; }
inline State set_bit(State s, int gene, bool v) {
  return v ? (s | (State{1} << gene)) : (s & ~(State{1} << gene));
}
inline State flip_bits(State s, const std::vector<int>& genes) {
  for (int g : genes) s ^= State{1} << g;
  return s;
}

/// One asynchronous update: a uniformly random gene, a predictor drawn per
/// its selection distribution. May return the input state.
State async_step(const PbnModel& model, State state, std::mt19937_64& rng);

/// Uncontrolled one-step kernel P(s -> t), self-transition mass included.
double transition_probability(const PbnModel& model, State s, State t);

/// State transition graph over all 2^n states. Self-loops are excluded;
/// an edge s -> t requires t != s and a single-gene update reaching t.
struct Stg {
  int gene_count = 0;
  std::vector<std::vector<std::uint32_t>> successors;
  std::size_t state_count() const { return successors.size(); }
};

/// Exhaustive STG construction; refuses models above max_genes (memory cap).
Stg build_stg(const PbnModel& model, int max_genes = 20);

/// Bottom strongly connected component of the STG.
struct Attractor {
  int id = 0;
  std::vector<State> states;  // sorted ascending
  bool is_fixed_point = false;
};

/// All bottom SCCs, ordered by smallest contained state.
std::vector<Attractor> attractors(const Stg& stg);

struct AttractorDistribution {
  int attractor_id = 0;
  std::vector<State> states;         // same order as the attractor
  std::vector<double> probability;   // sums to 1
};

/// Stationary distribution of the chain restricted to the attractor,
/// by power iteration (L1 tolerance 1e-12, cap 1e6 iterations).
AttractorDistribution stationary_distribution(const PbnModel& model,
                                              const Attractor& attractor);

/// The states of an attractor carrying at least 1/|A| stationary mass.
struct PseudoAttractor {
  int attractor_id = 0;
  std::vector<State> states;
};

PseudoAttractor pseudo_attractor(const AttractorDistribution& dist);

/// States from which the attractor is reachable (includes the attractor).
std::vector<State> weak_basin(const Stg& stg, const Attractor& attractor);

/// States from which no attractor other than the target is reachable.
/// `all` must be the complete attractor list of the STG.
std::vector<State> strong_basin(const Stg& stg,
                                const std::vector<Attractor>& all,
                                int target_id);

}  // namespace pbn
