#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pbn/dynamics.hpp"
#include "pbn/pasip.hpp"

namespace pbn {

enum class RewardScheme { Mixed, ShiftedPenalty };

/// Mixed: 1000 on reaching the target minus the flip count.
/// ShiftedPenalty: flip count plus 100 charged while off target.
double reward(RewardScheme scheme, bool reached_target, int flips);

/// A set of genes flipped simultaneously at a (pseudo-)attractor state.
struct Intervention {
  std::vector<int> genes;  // distinct, ascending
  int size() const { return static_cast<int>(genes.size()); }
};

std::string format_intervention(const Intervention& a);          // "0+2"
std::string format_strategy(const std::vector<Intervention>& s); // "0+2;1"

/// Source and target node of a control episode. Either side may be a full
/// attractor or a single pseudo-attractor state.
struct ControlProblem {
  std::vector<State> source;
  std::vector<State> target;
};

struct EnvConfig {
  int max_flips = 3;
  int micro_step_budget = 10000;  // free-evolution steps per intervention
  int episode_cap = 20;           // agent interventions per episode
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  bool success = false;
  State state = 0;
  std::vector<State> discovered;  // pseudo-attractor states found this step
};

/// Control environment: the agent intervenes at registered
/// (pseudo-)attractor states; between interventions the network evolves
/// freely until it reaches another registered state. Every micro-step is
/// fed to the online pseudo-attractor detector, so the registry can grow
/// during an episode.
class ControlEnv {
public:
  ControlEnv(const PbnModel& model, PaRegistry& registry,
             RewardScheme scheme, EnvConfig config = {},
             PasipConfig pasip = {});

  /// Starts an episode: uniform sample from the source node. The
  /// observation is the current state concatenated with the target
  /// representative (its smallest state), 2n entries of 0/1.
  std::vector<double> reset(const ControlProblem& problem,
                            std::mt19937_64& rng);

  /// Applies the flips, then evolves until a registered state or the
  /// micro-step budget. On budget exhaustion the env is left mid-transient
  /// and the next call resumes evolution instead of acting.
  StepResult apply_intervention(const Intervention& a, std::mt19937_64& rng);

  State current_state() const { return state_; }
  bool done() const { return done_; }
  bool at_registered_state() const { return registry_.contains(state_); }
  int interventions_used() const { return interventions_; }
  const ControlProblem& problem() const { return problem_; }
  std::vector<double> observation() const;

private:
  const PbnModel& model_;
  PaRegistry& registry_;
  RewardScheme scheme_;
  EnvConfig config_;
  Step2Detector detector_;
  ControlProblem problem_;
  State state_ = 0;
  State target_rep_ = 0;
  int interventions_ = 0;
  bool done_ = true;
  bool pending_continuation_ = false;
};

}  // namespace pbn
