#include "pbn/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pbn {

namespace {

Eigen::VectorXd relu(const Eigen::VectorXd& x) { return x.cwiseMax(0.0); }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

struct ForwardCache {
  Eigen::VectorXd x, h1, h2, hv;
  double v = 0.0;
  std::vector<Eigen::VectorXd> hb;
  std::vector<Eigen::Vector2d> adv;
  Eigen::MatrixXd q;  // gene_count x 2
};

ForwardCache forward(const QNetwork& net, const Eigen::VectorXd& obs) {
  const int n = net.gene_count();
  ForwardCache c;
  c.x = obs;
  c.h1 = relu(net.weights[0] * c.x + net.biases[0]);
  c.h2 = relu(net.weights[1] * c.h1 + net.biases[1]);
  c.hv = relu(net.weights[2] * c.h2 + net.biases[2]);
  c.v = (net.weights[3] * c.hv + net.biases[3])(0);
  c.hb.resize(n);
  c.adv.resize(n);
  c.q.resize(n, 2);
  for (int d = 0; d < n; ++d) {
    c.hb[d] = relu(net.weights[4 + 2 * d] * c.h2 + net.biases[4 + 2 * d]);
    c.adv[d] = net.weights[5 + 2 * d] * c.hb[d] + net.biases[5 + 2 * d];
    double mean = 0.5 * (c.adv[d](0) + c.adv[d](1));
    c.q(d, 0) = c.v + c.adv[d](0) - mean;
    c.q(d, 1) = c.v + c.adv[d](1) - mean;
  }
  return c;
}

}  // namespace

QNetwork::QNetwork(int gene_count, int trunk_width, int stream_width,
                   std::mt19937_64& rng)
    : gene_count_(gene_count) {
  auto init = [&rng](int rows, int cols) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / cols));
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
    return m;
  };
  auto add = [&](int rows, int cols) {
    weights.push_back(init(rows, cols));
    biases.push_back(Eigen::VectorXd::Zero(rows));
  };
  const int in = 2 * gene_count;
  add(trunk_width, in);
  add(trunk_width, trunk_width);
  add(stream_width, trunk_width);
  add(1, stream_width);
  for (int d = 0; d < gene_count; ++d) {
    add(stream_width, trunk_width);
    add(2, stream_width);
  }
}

Eigen::MatrixXd QNetwork::q_values(const Eigen::VectorXd& obs) const {
  return forward(*this, obs).q;
}

void ReplayBuffer::push(Transition t) {
  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(t));
  } else {
    entries_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
}

std::vector<const Transition*> ReplayBuffer::sample(
    std::size_t count, std::mt19937_64& rng) const {
  std::vector<const Transition*> batch;
  batch.reserve(count);
  std::uniform_int_distribution<std::size_t> pick(0, entries_.size() - 1);
  for (std::size_t i = 0; i < count; ++i) batch.push_back(&entries_[pick(rng)]);
  return batch;
}

Intervention select_action(const QNetwork& net,
                           const std::vector<double>& observation, double eps,
                           std::mt19937_64& rng, int max_flips) {
  const int n = net.gene_count();
  Intervention a;
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < eps) {
    int k = std::uniform_int_distribution<int>(0, max_flips)(rng);
    std::vector<int> genes(n);
    std::iota(genes.begin(), genes.end(), 0);
    for (int i = 0; i < k; ++i) {
      int j = std::uniform_int_distribution<int>(i, n - 1)(rng);
      std::swap(genes[i], genes[j]);
    }
    a.genes.assign(genes.begin(), genes.begin() + k);
    std::sort(a.genes.begin(), a.genes.end());
    return a;
  }

  Eigen::MatrixXd q = net.q_values(to_eigen(observation));
  std::vector<std::pair<double, int>> flips;  // (margin, gene)
  for (int d = 0; d < n; ++d) {
    double margin = q(d, 1) - q(d, 0);
    if (margin > 0.0) flips.emplace_back(margin, d);
  }
  if (static_cast<int>(flips.size()) > max_flips) {
    std::sort(flips.begin(), flips.end(), [](const auto& l, const auto& r) {
      return l.first != r.first ? l.first > r.first : l.second < r.second;
    });
    flips.resize(max_flips);
  }
  for (const auto& [margin, gene] : flips) a.genes.push_back(gene);
  std::sort(a.genes.begin(), a.genes.end());
  return a;
}

double bellman_target(const Transition& entry, const QNetwork& target_net,
                      double gamma) {
  if (entry.done) return entry.reward;
  Eigen::MatrixXd q = target_net.q_values(to_eigen(entry.next_observation));
  double mean_max = q.rowwise().maxCoeff().mean();
  return entry.reward + gamma * mean_max;
}

double batch_loss(const QNetwork& net,
                  const std::vector<const Transition*>& batch,
                  const std::vector<double>& targets) {
  const int n = net.gene_count();
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    ForwardCache c = forward(net, to_eigen(batch[i]->observation));
    for (int d = 0; d < n; ++d) {
      int act = (batch[i]->action_mask >> d) & 1u;
      double diff = c.q(d, act) - targets[i];
      loss += diff * diff;
    }
  }
  return loss / (static_cast<double>(batch.size()) * n);
}

namespace {

// Whole-batch forward pass, one column per sample.
struct BatchCache {
  Eigen::MatrixXd x, h1, h2, hv;
  Eigen::RowVectorXd v;
  std::vector<Eigen::MatrixXd> hb;   // per branch: stream x B
  std::vector<Eigen::MatrixXd> adv;  // per branch: 2 x B
};

Eigen::MatrixXd relu_cols(Eigen::MatrixXd m) { return m.cwiseMax(0.0); }

BatchCache forward_batch(const QNetwork& net, const Eigen::MatrixXd& x) {
  const int n = net.gene_count();
  BatchCache c;
  c.x = x;
  c.h1 = relu_cols((net.weights[0] * c.x).colwise() + net.biases[0]);
  c.h2 = relu_cols((net.weights[1] * c.h1).colwise() + net.biases[1]);
  c.hv = relu_cols((net.weights[2] * c.h2).colwise() + net.biases[2]);
  c.v = (net.weights[3] * c.hv).row(0).array() + net.biases[3](0);
  c.hb.resize(n);
  c.adv.resize(n);
  for (int d = 0; d < n; ++d) {
    c.hb[d] =
        relu_cols((net.weights[4 + 2 * d] * c.h2).colwise() + net.biases[4 + 2 * d]);
    c.adv[d] = (net.weights[5 + 2 * d] * c.hb[d]).colwise() + net.biases[5 + 2 * d];
  }
  return c;
}

Eigen::MatrixXd observations_matrix(
    const std::vector<const Transition*>& batch, bool next, int width) {
  Eigen::MatrixXd x(width, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& obs =
        next ? batch[i]->next_observation : batch[i]->observation;
    for (int r = 0; r < width; ++r) x(r, static_cast<Eigen::Index>(i)) = obs[r];
  }
  return x;
}

}  // namespace

Gradients batch_gradients(const QNetwork& net,
                          const std::vector<const Transition*>& batch,
                          const std::vector<double>& targets,
                          double* loss_out) {
  const int n = net.gene_count();
  const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
  Gradients g;
  g.weights.reserve(net.weights.size());
  g.biases.reserve(net.biases.size());
  for (const auto& w : net.weights)
    g.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : net.biases)
    g.biases.push_back(Eigen::VectorXd::Zero(b.size()));

  const double scale = 1.0 / (static_cast<double>(batch.size()) * n);
  double loss = 0.0;

  BatchCache c = forward_batch(net, observations_matrix(batch, false,
                                                        net.input_width()));
  Eigen::MatrixXd gh2 = Eigen::MatrixXd::Zero(c.h2.rows(), B);
  Eigen::RowVectorXd gv = Eigen::RowVectorXd::Zero(B);

  for (int d = 0; d < n; ++d) {
    // Chosen-action Q minus targets, per sample.
    Eigen::MatrixXd gadv(2, B);
    for (Eigen::Index i = 0; i < B; ++i) {
      int act = (batch[i]->action_mask >> d) & 1u;
      double mean = 0.5 * (c.adv[d](0, i) + c.adv[d](1, i));
      double diff = c.v(i) + c.adv[d](act, i) - mean - targets[i];
      loss += diff * diff;
      double gq = 2.0 * diff * scale;
      gv(i) += gq;
      // dQ(act)/dA(a) = [a == act] - 1/2 from the mean-centering.
      gadv(0, i) = -0.5 * gq;
      gadv(1, i) = -0.5 * gq;
      gadv(act, i) += gq;
    }

    const int wh = 4 + 2 * d, wo = 5 + 2 * d;
    g.weights[wo] += gadv * c.hb[d].transpose();
    g.biases[wo] += gadv.rowwise().sum();
    Eigen::MatrixXd ghb = net.weights[wo].transpose() * gadv;
    ghb = ghb.cwiseProduct((c.hb[d].array() > 0.0).cast<double>().matrix());
    g.weights[wh] += ghb * c.h2.transpose();
    g.biases[wh] += ghb.rowwise().sum();
    gh2 += net.weights[wh].transpose() * ghb;
  }

  // Value stream.
  g.weights[3] += gv * c.hv.transpose();
  g.biases[3](0) += gv.sum();
  Eigen::MatrixXd ghv = net.weights[3].transpose() * gv;
  ghv = ghv.cwiseProduct((c.hv.array() > 0.0).cast<double>().matrix());
  g.weights[2] += ghv * c.h2.transpose();
  g.biases[2] += ghv.rowwise().sum();
  gh2 += net.weights[2].transpose() * ghv;

  // Trunk.
  gh2 = gh2.cwiseProduct((c.h2.array() > 0.0).cast<double>().matrix());
  g.weights[1] += gh2 * c.h1.transpose();
  g.biases[1] += gh2.rowwise().sum();
  Eigen::MatrixXd gh1 = net.weights[1].transpose() * gh2;
  gh1 = gh1.cwiseProduct((c.h1.array() > 0.0).cast<double>().matrix());
  g.weights[0] += gh1 * c.x.transpose();
  g.biases[0] += gh1.rowwise().sum();

  if (loss_out) *loss_out = loss * scale;
  return g;
}

void AdamOptimizer::step(QNetwork& net, const Gradients& grads) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  if (mw_.empty()) {
    for (const auto& w : net.weights) {
      mw_.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
      vw_.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
    for (const auto& b : net.biases) {
      mb_.push_back(Eigen::VectorXd::Zero(b.size()));
      vb_.push_back(Eigen::VectorXd::Zero(b.size()));
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1, t_);
  const double bc2 = 1.0 - std::pow(beta2, t_);
  for (std::size_t i = 0; i < net.weights.size(); ++i) {
    mw_[i] = beta1 * mw_[i] + (1.0 - beta1) * grads.weights[i];
    vw_[i] = beta2 * vw_[i].array().matrix() +
             (1.0 - beta2) * grads.weights[i].cwiseProduct(grads.weights[i]);
    net.weights[i].array() -=
        lr_ * (mw_[i].array() / bc1) /
        ((vw_[i].array() / bc2).sqrt() + eps);
  }
  for (std::size_t i = 0; i < net.biases.size(); ++i) {
    mb_[i] = beta1 * mb_[i] + (1.0 - beta1) * grads.biases[i];
    vb_[i] = beta2 * vb_[i].array().matrix() +
             (1.0 - beta2) * grads.biases[i].cwiseProduct(grads.biases[i]);
    net.biases[i].array() -=
        lr_ * (mb_[i].array() / bc1) /
        ((vb_[i].array() / bc2).sqrt() + eps);
  }
}

double train_step(QNetwork& net, const QNetwork& target_net,
                  const std::vector<const Transition*>& batch,
                  AdamOptimizer& optimizer, double gamma) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  std::vector<double> targets(batch.size());
  // One batched target-network pass over the non-terminal successors.
  std::vector<const Transition*> open;
  std::vector<std::size_t> open_index;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    targets[i] = batch[i]->reward;
    if (!batch[i]->done) {
      open.push_back(batch[i]);
      open_index.push_back(i);
    }
  }
  if (!open.empty()) {
    const int n = target_net.gene_count();
    BatchCache c = forward_batch(
        target_net,
        observations_matrix(open, true, target_net.input_width()));
    for (std::size_t k = 0; k < open.size(); ++k) {
      double mean_max = 0.0;
      for (int d = 0; d < n; ++d) {
        double a0 = c.adv[d](0, static_cast<Eigen::Index>(k));
        double a1 = c.adv[d](1, static_cast<Eigen::Index>(k));
        mean_max += c.v(static_cast<Eigen::Index>(k)) +
                    std::max(a0, a1) - 0.5 * (a0 + a1);
      }
      targets[open_index[k]] += gamma * mean_max / n;
    }
  }
  double loss = 0.0;
  Gradients grads = batch_gradients(net, batch, targets, &loss);
  if (!std::isfinite(loss))
    throw std::runtime_error("non-finite training loss: " +
                             std::to_string(loss));
  optimizer.step(net, grads);
  return loss;
}

TrainResult train(const PbnModel& model, PaRegistry& registry,
                  std::vector<std::vector<State>> nodes, RewardScheme scheme,
                  const AgentConfig& config, std::uint64_t total_steps,
                  std::mt19937_64& rng) {
  if (nodes.size() < 2)
    throw std::invalid_argument("training needs at least two control nodes");

  QNetwork net(model.gene_count(), config.trunk_width, config.stream_width,
               rng);
  QNetwork target_net = net;
  AdamOptimizer optimizer(config.learning_rate);
  ReplayBuffer buffer(static_cast<std::size_t>(config.buffer_capacity));
  EpsilonSchedule eps(config.eps_start, config.eps_end,
                      config.eps_decay_steps);

  EnvConfig env_config;
  env_config.max_flips = config.max_flips;
  ControlEnv env(model, registry, scheme, env_config);

  TrainResult result;
  std::uint64_t step = 0;
  int episode = 0;
  int grad_steps = 0;

  while (step < total_steps) {
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
    std::size_t src = pick(rng);
    std::size_t dst = std::uniform_int_distribution<std::size_t>(
        0, nodes.size() - 2)(rng);
    if (dst >= src) ++dst;

    std::vector<double> obs = env.reset({nodes[src], nodes[dst]}, rng);
    double ep_reward = 0.0;
    int ep_len = 0;

    while (!env.done() && step < total_steps) {
      Intervention action =
          select_action(net, obs, eps.value(), rng, config.max_flips);
      StepResult res = env.apply_intervention(action, rng);

      Transition t;
      t.observation = std::move(obs);
      for (int g : action.genes) t.action_mask |= std::uint64_t{1} << g;
      t.reward = res.reward;
      t.next_observation = res.observation;
      t.done = res.done;
      buffer.push(std::move(t));

      obs = std::move(res.observation);
      ep_reward += res.reward;
      ++ep_len;
      ++step;
      eps.advance();

      for (State found : res.discovered) {
        nodes.push_back({found});
        eps.boost(config.epb_floor);
      }

      if (buffer.size() >=
          static_cast<std::size_t>(config.warmup_transitions)) {
        auto batch = buffer.sample(
            static_cast<std::size_t>(config.batch_size), rng);
        train_step(net, target_net, batch, optimizer, config.gamma);
        if (++grad_steps % config.target_sync_period == 0) target_net = net;
      }
    }

    result.log.push_back({step, episode, eps.value(), ep_reward, ep_len,
                          registry.size()});
    ++episode;
  }

  result.net = std::move(net);
  return result;
}

std::string train_log_csv(const std::vector<TrainLogRow>& log) {
  std::ostringstream out;
  out.precision(17);
  out << "step,episode,epsilon,reward,episode_len,n_pa_states\n";
  for (const TrainLogRow& row : log)
    out << row.step << "," << row.episode << "," << row.epsilon << ","
        << row.reward << "," << row.episode_len << "," << row.n_pa_states
        << "\n";
  return out.str();
}

namespace {
constexpr char kCheckpointMagic[8] = {'P', 'B', 'N', 'Q', 'N', 'E', 'T', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{buf[i]} << (8 * i);
  return v;
}

void write_f32(std::ostream& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  write_u32(out, bits);
}

float read_f32(std::istream& in) {
  std::uint32_t bits = read_u32(in);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}
}  // namespace

void save_checkpoint(const QNetwork& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  out.write(kCheckpointMagic, 8);
  write_u32(out, static_cast<std::uint32_t>(net.gene_count()));
  write_u32(out, static_cast<std::uint32_t>(net.weights.size()));
  for (const auto& w : net.weights) {
    write_u32(out, static_cast<std::uint32_t>(w.rows()));
    write_u32(out, static_cast<std::uint32_t>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        write_f32(out, static_cast<float>(w(r, c)));
  }
  for (const auto& b : net.biases) {
    write_u32(out, static_cast<std::uint32_t>(b.size()));
    for (Eigen::Index r = 0; r < b.size(); ++r)
      write_f32(out, static_cast<float>(b(r)));
  }
}

QNetwork load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw std::runtime_error("bad checkpoint header in '" + path + "'");
  std::uint32_t genes = read_u32(in);
  std::uint32_t n_tensors = read_u32(in);

  std::mt19937_64 dummy(0);
  QNetwork net(static_cast<int>(genes), 1, 1, dummy);
  net.weights.clear();
  net.biases.clear();
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::uint32_t rows = read_u32(in), cols = read_u32(in);
    Eigen::MatrixXd w(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
      for (std::uint32_t c = 0; c < cols; ++c)
        w(r, c) = static_cast<double>(read_f32(in));
    net.weights.push_back(std::move(w));
  }
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::uint32_t rows = read_u32(in);
    Eigen::VectorXd b(rows);
    for (std::uint32_t r = 0; r < rows; ++r)
      b(r) = static_cast<double>(read_f32(in));
    net.biases.push_back(std::move(b));
  }
  if (!in) throw std::runtime_error("truncated checkpoint '" + path + "'");
  return net;
}

}  // namespace pbn
