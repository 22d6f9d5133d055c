#include "pbn/env.hpp"

#include <algorithm>
#include <stdexcept>

namespace pbn {

double reward(RewardScheme scheme, bool reached_target, int flips) {
  switch (scheme) {
    case RewardScheme::Mixed:
      return 1000.0 * (reached_target ? 1.0 : 0.0) - flips;
    case RewardScheme::ShiftedPenalty:
      return -flips + 100.0 * ((reached_target ? 1.0 : 0.0) - 1.0);
  }
  return 0.0;
}

std::string format_intervention(const Intervention& a) {
  std::string out;
  for (std::size_t i = 0; i < a.genes.size(); ++i) {
    if (i) out += "+";
    out += std::to_string(a.genes[i]);
  }
  return out;
}

std::string format_strategy(const std::vector<Intervention>& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ";";
    out += format_intervention(s[i]);
  }
  return out;
}

ControlEnv::ControlEnv(const PbnModel& model, PaRegistry& registry,
                       RewardScheme scheme, EnvConfig config,
                       PasipConfig pasip)
    : model_(model),
      registry_(registry),
      scheme_(scheme),
      config_(config),
      detector_(pasip, registry) {}

std::vector<double> ControlEnv::observation() const {
  const int n = model_.gene_count();
  std::vector<double> obs(2 * n);
  for (int i = 0; i < n; ++i) {
    obs[i] = get_bit(state_, i) ? 1.0 : 0.0;
    obs[n + i] = get_bit(target_rep_, i) ? 1.0 : 0.0;
  }
  return obs;
}

std::vector<double> ControlEnv::reset(const ControlProblem& problem,
                                      std::mt19937_64& rng) {
  if (problem.source.empty() || problem.target.empty())
    throw std::invalid_argument("control problem with empty node");
  for (State s : problem.source)
    if (!registry_.contains(s))
      throw std::invalid_argument("source state not in the registry");

  problem_ = problem;
  target_rep_ = *std::min_element(problem.target.begin(), problem.target.end());
  std::uniform_int_distribution<std::size_t> pick(0, problem.source.size() - 1);
  state_ = problem.source[pick(rng)];
  interventions_ = 0;
  done_ = false;
  pending_continuation_ = false;
  detector_.reset();
  return observation();
}

StepResult ControlEnv::apply_intervention(const Intervention& a,
                                          std::mt19937_64& rng) {
  if (done_) throw std::logic_error("apply_intervention after episode end");
  if (a.size() > config_.max_flips)
    throw std::invalid_argument("intervention exceeds max flips");
  for (std::size_t i = 0; i < a.genes.size(); ++i) {
    if (a.genes[i] < 0 || a.genes[i] >= model_.gene_count())
      throw std::invalid_argument("intervention gene out of range");
    if (i > 0 && a.genes[i] <= a.genes[i - 1])
      throw std::invalid_argument("intervention genes not distinct ascending");
  }

  StepResult result;
  int flips = a.size();
  if (pending_continuation_) {
    // Mid-transient after an exhausted budget: this step only resumes the
    // free evolution, the requested flips are not applied.
    flips = 0;
  } else {
    if (!registry_.contains(state_))
      throw std::logic_error(
          "intervention outside a registered (pseudo-)attractor state");
    state_ = flip_bits(state_, a.genes);
    for (State found : detector_.feed(state_))
      result.discovered.push_back(found);
  }

  // Empty flips would otherwise return immediately from the registered
  // state they were issued at; advance the chain by one update first.
  int steps = 0;
  if (!pending_continuation_ && a.genes.empty() &&
      config_.micro_step_budget > 0) {
    state_ = async_step(model_, state_, rng);
    for (State found : detector_.feed(state_))
      result.discovered.push_back(found);
    steps = 1;
  }
  while (!registry_.contains(state_) && steps < config_.micro_step_budget) {
    state_ = async_step(model_, state_, rng);
    for (State found : detector_.feed(state_))
      result.discovered.push_back(found);
    ++steps;
  }
  pending_continuation_ = !registry_.contains(state_);

  const bool on_target =
      std::find(problem_.target.begin(), problem_.target.end(), state_) !=
      problem_.target.end();
  result.success = on_target && !pending_continuation_;
  result.reward = reward(scheme_, on_target, flips);
  result.state = state_;
  ++interventions_;
  done_ = result.success || interventions_ >= config_.episode_cap;
  result.done = done_;
  result.observation = observation();
  return result;
}

}  // namespace pbn
