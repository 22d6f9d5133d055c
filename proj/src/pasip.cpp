#include "pbn/pasip.hpp"

#include <algorithm>

namespace pbn {

int PasipConfig::initial_states_for(int gene_count) const {
  if (k_initial_states > 0) return k_initial_states;
  if (gene_count >= 7) return 100;
  return std::min(1 << gene_count, 100);
}

bool PaRegistry::insert(State s, std::uint64_t step, DiscoverySource source) {
  if (!known_.insert(s).second) return false;
  states_.push_back(s);
  log_.push_back({s, step, source});
  return true;
}

PaRegistry step1_scan(const PbnModel& model, const PasipConfig& config,
                      std::mt19937_64& rng) {
  PaRegistry registry;
  const int n = model.gene_count();
  const int k = config.initial_states_for(n);
  const State mask =
      n >= 64 ? ~State{0} : ((State{1} << n) - 1);
  const double min_count = config.step1_threshold * config.counted_steps;

  for (int run = 0; run < k; ++run) {
    State s = rng() & mask;
    for (int t = 0; t < config.burn_in_steps; ++t)
      s = async_step(model, s, rng);
    std::unordered_map<State, int> counts;
    for (int t = 0; t < config.counted_steps; ++t) {
      s = async_step(model, s, rng);
      ++counts[s];
    }
    // Deterministic registration order within the run.
    std::vector<State> qualified;
    for (const auto& [state, count] : counts)
      if (count >= min_count) qualified.push_back(state);
    std::sort(qualified.begin(), qualified.end());
    for (State q : qualified)
      registry.insert(q, static_cast<std::uint64_t>(run),
                      DiscoverySource::Step1);
  }
  return registry;
}

std::vector<State> Step2Detector::feed(State s) {
  std::vector<State> fresh;
  ++step_;

  // Stuck-state detector.
  if (repeat_count_ > 0 && s == last_state_) {
    if (++repeat_count_ >= config_.stuck_steps) {
      if (registry_.insert(s, step_, DiscoverySource::Step2Stuck))
        fresh.push_back(s);
      repeat_count_ = 0;
    }
  } else {
    last_state_ = s;
    repeat_count_ = 1;
  }

  // Revisit-history detector.
  if (registry_.contains(s)) window_hit_known_ = true;
  ++history_counts_[s];
  if (++history_len_ >= config_.history_size) {
    if (!window_hit_known_) {
      std::vector<State> qualified;
      for (const auto& [state, count] : history_counts_)
        if (count > config_.step2_threshold * config_.history_size)
          qualified.push_back(state);
      std::sort(qualified.begin(), qualified.end());
      for (State q : qualified)
        if (registry_.insert(q, step_, DiscoverySource::Step2History))
          fresh.push_back(q);
    }
    history_counts_.clear();
    history_len_ = 0;
    window_hit_known_ = false;
  }
  return fresh;
}

void Step2Detector::reset() {
  repeat_count_ = 0;
  history_counts_.clear();
  history_len_ = 0;
  window_hit_known_ = false;
}

double precision(const PaRegistry& registry, const std::vector<State>& truth) {
  if (registry.states().empty()) return 1.0;
  std::size_t tp = 0;
  for (State s : registry.states())
    if (std::find(truth.begin(), truth.end(), s) != truth.end()) ++tp;
  return static_cast<double>(tp) /
         static_cast<double>(registry.states().size());
}

}  // namespace pbn
