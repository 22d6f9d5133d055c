#pragma once

#include <cstdint>
#include <random>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pbn/dynamics.hpp"

namespace pbn {

/// Tuning constants of the pseudo-attractor state identification runs.
struct PasipConfig {
  int k_initial_states = -1;     // -1 means min(2^n, 100)
  int burn_in_steps = 200;       // n0, discarded
  int counted_steps = 1000;      // n1, occupancy window
  double step1_threshold = 0.05; // "at least" this share of n1
  int stuck_steps = 1000;        // n2, repeat count for the stuck detector
  int history_size = 10000;      // n3, revisit-history window
  double step2_threshold = 0.15; // "more than" this revisit share

  int initial_states_for(int gene_count) const;
};

enum class DiscoverySource { Step1, Step2Stuck, Step2History };

struct Discovery {
  State state;
  std::uint64_t step;
  DiscoverySource source;
};

/// Append-only, duplicate-free set of discovered pseudo-attractor states.
class PaRegistry {
public:
  bool insert(State s, std::uint64_t step, DiscoverySource source);
  bool contains(State s) const { return known_.count(s) != 0; }
  std::size_t size() const { return states_.size(); }
  const std::vector<State>& states() const { return states_; }
  const std::vector<Discovery>& log() const { return log_; }

private:
  std::vector<State> states_;
  std::unordered_set<State> known_;
  std::vector<Discovery> log_;
};

/// Pre-processing scan: k random initial states, per-run burn-in then an
/// occupancy count; every state holding at least step1_threshold of the
/// counted window is registered. Occupancy is measured per run.
PaRegistry step1_scan(const PbnModel& model, const PasipConfig& config,
                      std::mt19937_64& rng);

/// Online detectors fed one state per environment micro-step:
///  - stuck: the same state repeated stuck_steps times in a row;
///  - history: once the window holds history_size entries, states revisited
///    more than step2_threshold of the time, unless a known pseudo-attractor
///    state appeared in the window (then the window is discarded).
class Step2Detector {
public:
  Step2Detector(const PasipConfig& config, PaRegistry& registry)
      : config_(config), registry_(registry) {}

  /// Returns the states newly registered by this observation.
  std::vector<State> feed(State s);

  void reset();  // clears both detectors, e.g. between episodes

private:
  PasipConfig config_;
  PaRegistry& registry_;
  State last_state_ = 0;
  int repeat_count_ = 0;
  std::unordered_map<State, int> history_counts_;
  int history_len_ = 0;
  bool window_hit_known_ = false;
  std::uint64_t step_ = 0;
};

/// Share of registered states that are true attractor states: TP/(TP+FP).
/// An empty registry yields 1.0 (nothing wrongly registered).
double precision(const PaRegistry& registry, const std::vector<State>& truth);

}  // namespace pbn
