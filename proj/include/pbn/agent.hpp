#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pbn/env.hpp"

namespace pbn {

struct AgentConfig {
  double gamma = 0.99;
  double learning_rate = 1e-4;
  int batch_size = 128;
  int target_sync_period = 1000;  // gradient steps between target syncs
  double eps_start = 1.0;
  double eps_end = 0.05;
  int eps_decay_steps = 3000;
  double epb_floor = 0.3;
  int max_flips = 3;
  int buffer_capacity = 100000;
  int warmup_transitions = 1000;
  int trunk_width = 128;
  int stream_width = 64;
};

/// Branching dueling Q-network over a 2n-wide observation: a shared
/// two-layer ReLU trunk, a state-value stream, and one two-action
/// advantage branch per gene (keep = column 0, flip = column 1).
class QNetwork {
public:
  QNetwork() = default;
  QNetwork(int gene_count, int trunk_width, int stream_width,
           std::mt19937_64& rng);

  int gene_count() const { return gene_count_; }
  int input_width() const { return 2 * gene_count_; }

  /// Q_d(s, a) = V(s) + A_d(s, a) - mean_a' A_d(s, a'), one row per branch.
  Eigen::MatrixXd q_values(const Eigen::VectorXd& obs) const;

  // Parameter layout: [trunk1, trunk2, value1, value2,
  //                    branch0_hidden, branch0_out, branch1_hidden, ...].
  // Biases share the indexing. Exposed for the optimizer, serialization
  // and gradient checks.
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

private:
  int gene_count_ = 0;
};

struct Transition {
  std::vector<double> observation;
  std::uint64_t action_mask = 0;  // bit d set = branch d flipped
  double reward = 0.0;
  std::vector<double> next_observation;
  bool done = false;
};

class ReplayBuffer {
public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}
  void push(Transition t);
  std::size_t size() const { return entries_.size(); }
  std::vector<const Transition*> sample(std::size_t count,
                                        std::mt19937_64& rng) const;

private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> entries_;
};

/// Greedy: each branch flips iff Q(flip) > Q(keep); past max_flips the
/// branches with the largest flip margins win. Exploring: a uniform flip
/// count in [0, max_flips], then a uniform gene subset of that size.
Intervention select_action(const QNetwork& net,
                           const std::vector<double>& observation, double eps,
                           std::mt19937_64& rng, int max_flips);

/// r for terminal entries, otherwise r + gamma * mean over branches of the
/// per-branch maximum next-state Q under the target network.
double bellman_target(const Transition& entry, const QNetwork& target_net,
                      double gamma);

/// Mean over batch and branches of (Q_d(s, a_d) - y_d)^2 with precomputed
/// per-entry targets.
double batch_loss(const QNetwork& net,
                  const std::vector<const Transition*>& batch,
                  const std::vector<double>& targets);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

Gradients batch_gradients(const QNetwork& net,
                          const std::vector<const Transition*>& batch,
                          const std::vector<double>& targets,
                          double* loss_out = nullptr);

/// Adam with coefficients (0.9, 0.999, 1e-8).
class AdamOptimizer {
public:
  explicit AdamOptimizer(double learning_rate) : lr_(learning_rate) {}
  void step(QNetwork& net, const Gradients& grads);

private:
  double lr_;
  int t_ = 0;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
};

/// One Bellman-target gradient update on a sampled batch; returns the loss.
/// Aborts on a non-finite loss.
double train_step(QNetwork& net, const QNetwork& target_net,
                  const std::vector<const Transition*>& batch,
                  AdamOptimizer& optimizer, double gamma);

/// Linear decay from eps_start to eps_end with discovery boosts that jump
/// to max(eps, floor) and then resume the original slope.
class EpsilonSchedule {
public:
  EpsilonSchedule(double start, double end, int decay_steps)
      : value_(start), end_(end),
        rate_((start - end) / static_cast<double>(decay_steps)) {}

  double value() const { return value_; }
  void advance() { value_ = std::max(end_, value_ - rate_); }
  void boost(double floor) { value_ = std::max(value_, floor); }

private:
  double value_, end_, rate_;
};

struct TrainLogRow {
  std::uint64_t step = 0;
  int episode = 0;
  double epsilon = 0.0;
  double reward = 0.0;
  int episode_len = 0;
  std::size_t n_pa_states = 0;
};

struct TrainResult {
  QNetwork net;
  std::vector<TrainLogRow> log;
};

/// Full training loop: uniform ordered source-target node pairs, eps-greedy
/// rollouts through ControlEnv, replay training after warm-up, periodic
/// target sync, and an exploration boost whenever the environment reports a
/// newly discovered pseudo-attractor state (which also becomes a new node).
TrainResult train(const PbnModel& model, PaRegistry& registry,
                  std::vector<std::vector<State>> nodes, RewardScheme scheme,
                  const AgentConfig& config, std::uint64_t total_steps,
                  std::mt19937_64& rng);

std::string train_log_csv(const std::vector<TrainLogRow>& log);

/// Versioned little-endian float32 checkpoint; round-trips bit-exactly.
void save_checkpoint(const QNetwork& net, const std::string& path);
QNetwork load_checkpoint(const std::string& path);

}  // namespace pbn
