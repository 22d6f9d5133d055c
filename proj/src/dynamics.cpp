#include "pbn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace pbn {

std::string to_bitstring(State s, int n) {
  std::string out(n, '0');
  for (int i = 0; i < n; ++i)
    if (get_bit(s, i)) out[i] = '1';
  return out;
}

State from_bitstring(const std::string& bits) {
  State s = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1')
      s |= State{1} << i;
    else if (bits[i] != '0')
      throw std::invalid_argument("bad bit-string '" + bits + "'");
  }
  return s;
}

State async_step(const PbnModel& model, State state, std::mt19937_64& rng) {
  const int n = model.gene_count();
  int gene = std::uniform_int_distribution<int>(0, n - 1)(rng);
  const auto& preds = model.predictors(gene);
  std::size_t pick = 0;
  if (preds.size() > 1) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (; pick + 1 < preds.size(); ++pick) {
      acc += preds[pick].probability;
      if (u < acc) break;
    }
  }
  return set_bit(state, gene, preds[pick].expr.evaluate(state));
}

double transition_probability(const PbnModel& model, State s, State t) {
  const int n = model.gene_count();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (const Predictor& p : model.predictors(i)) {
      if (set_bit(s, i, p.expr.evaluate(s)) == t)
        total += p.probability / n;
    }
  }
  return total;
}

Stg build_stg(const PbnModel& model, int max_genes) {
  const int n = model.gene_count();
  if (n > max_genes)
    throw std::invalid_argument("exhaustive STG refused: " +
                                std::to_string(n) + " genes exceeds cap " +
                                std::to_string(max_genes));
  Stg stg;
  stg.gene_count = n;
  stg.successors.resize(std::size_t{1} << n);
  for (State s = 0; s < stg.state_count(); ++s) {
    auto& out = stg.successors[s];
    for (int i = 0; i < n; ++i) {
      for (const Predictor& p : model.predictors(i)) {
        State t = set_bit(s, i, p.expr.evaluate(s));
        if (t != s) out.push_back(static_cast<std::uint32_t>(t));
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return stg;
}

namespace {

// Iterative Tarjan; returns component id per state, components numbered
// in reverse topological order (successors first).
std::vector<int> scc_components(const Stg& stg, int& component_count) {
  const std::size_t n = stg.state_count();
  constexpr int kUnvisited = -1;
  std::vector<int> index(n, kUnvisited), lowlink(n), component(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  int next_index = 0;
  component_count = 0;

  struct Frame {
    std::uint32_t v;
    std::size_t child;
  };
  std::vector<Frame> call;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({static_cast<std::uint32_t>(root), 0});
    while (!call.empty()) {
      Frame& f = call.back();
      std::uint32_t v = f.v;
      if (f.child == 0) {
        index[v] = lowlink[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (f.child < stg.successors[v].size()) {
        std::uint32_t w = stg.successors[v][f.child++];
        if (index[w] == kUnvisited) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
      }
      if (descended) continue;
      if (lowlink[v] == index[v]) {
        while (true) {
          std::uint32_t w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component[w] = component_count;
          if (w == v) break;
        }
        ++component_count;
      }
      call.pop_back();
      if (!call.empty()) {
        Frame& parent = call.back();
        lowlink[parent.v] = std::min(lowlink[parent.v], lowlink[v]);
      }
    }
  }
  return component;
}

}  // namespace

std::vector<Attractor> attractors(const Stg& stg) {
  int n_comp = 0;
  std::vector<int> comp = scc_components(stg, n_comp);
  std::vector<char> has_exit(n_comp, 0);
  for (State s = 0; s < stg.state_count(); ++s)
    for (std::uint32_t t : stg.successors[s])
      if (comp[t] != comp[s]) has_exit[comp[s]] = 1;

  std::vector<std::vector<State>> members(n_comp);
  for (State s = 0; s < stg.state_count(); ++s)
    if (!has_exit[comp[s]]) members[comp[s]].push_back(s);

  std::vector<Attractor> result;
  for (auto& states : members) {
    if (states.empty()) continue;
    Attractor a;
    a.states = std::move(states);  // ascending: filled in state order
    a.is_fixed_point = a.states.size() == 1;
    result.push_back(std::move(a));
  }
  std::sort(result.begin(), result.end(),
            [](const Attractor& a, const Attractor& b) {
              return a.states.front() < b.states.front();
            });
  for (std::size_t i = 0; i < result.size(); ++i)
    result[i].id = static_cast<int>(i);
  return result;
}

AttractorDistribution stationary_distribution(const PbnModel& model,
                                              const Attractor& attractor) {
  const std::size_t m = attractor.states.size();
  AttractorDistribution dist;
  dist.attractor_id = attractor.id;
  dist.states = attractor.states;
  if (m == 1) {
    dist.probability = {1.0};
    return dist;
  }

  std::unordered_map<State, std::size_t> pos;
  for (std::size_t i = 0; i < m; ++i) pos[attractor.states[i]] = i;

  // Row-stochastic restricted kernel; a bottom SCC keeps all mass inside.
  const int n = model.gene_count();
  std::vector<double> kernel(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    State s = attractor.states[i];
    for (int g = 0; g < n; ++g) {
      for (const Predictor& p : model.predictors(g)) {
        State t = set_bit(s, g, p.expr.evaluate(s));
        auto it = pos.find(t);
        if (it == pos.end())
          throw std::logic_error("attractor is not a bottom SCC");
        kernel[i * m + it->second] += p.probability / n;
      }
    }
  }

  std::vector<double> pi(m, 1.0 / static_cast<double>(m)), next(m);
  const int cap = 1000000;
  for (int iter = 0; iter < cap; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        next[j] += pi[i] * kernel[i * m + j];
    double delta = 0.0;
    for (std::size_t j = 0; j < m; ++j) delta += std::abs(next[j] - pi[j]);
    pi.swap(next);
    if (delta < 1e-12) {
      dist.probability = std::move(pi);
      return dist;
    }
  }
  throw std::runtime_error("stationary distribution: no convergence");
}

PseudoAttractor pseudo_attractor(const AttractorDistribution& dist) {
  PseudoAttractor pa;
  pa.attractor_id = dist.attractor_id;
  const double threshold = 1.0 / static_cast<double>(dist.states.size());
  for (std::size_t i = 0; i < dist.states.size(); ++i)
    if (dist.probability[i] >= threshold - 1e-9)
      pa.states.push_back(dist.states[i]);
  return pa;
}

std::vector<State> weak_basin(const Stg& stg, const Attractor& attractor) {
  // Backward reachability from the attractor states.
  std::vector<std::vector<std::uint32_t>> pred(stg.state_count());
  for (State s = 0; s < stg.state_count(); ++s)
    for (std::uint32_t t : stg.successors[s])
      pred[t].push_back(static_cast<std::uint32_t>(s));

  std::vector<char> seen(stg.state_count(), 0);
  std::vector<std::uint32_t> queue;
  for (State s : attractor.states) {
    seen[s] = 1;
    queue.push_back(static_cast<std::uint32_t>(s));
  }
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (std::uint32_t p : pred[queue[head]])
      if (!seen[p]) {
        seen[p] = 1;
        queue.push_back(p);
      }

  std::vector<State> basin;
  for (State s = 0; s < stg.state_count(); ++s)
    if (seen[s]) basin.push_back(s);
  return basin;
}

std::vector<State> strong_basin(const Stg& stg,
                                const std::vector<Attractor>& all,
                                int target_id) {
  std::vector<char> in_target_weak(stg.state_count(), 0);
  std::vector<char> in_other_weak(stg.state_count(), 0);
  for (const Attractor& a : all) {
    auto basin = weak_basin(stg, a);
    auto& mark = (a.id == target_id) ? in_target_weak : in_other_weak;
    for (State s : basin) mark[s] = 1;
  }
  std::vector<State> result;
  for (State s = 0; s < stg.state_count(); ++s)
    if (in_target_weak[s] && !in_other_weak[s]) result.push_back(s);
  return result;
}

}  // namespace pbn
