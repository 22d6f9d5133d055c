#include "pbn/oracle.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace pbn {

std::vector<std::vector<int>> enumerate_flip_sets(int gene_count,
                                                  int max_flips) {
  std::vector<std::vector<int>> sets;
  for (int k = 1; k <= max_flips; ++k) {
    // Lexicographic k-combinations of [0, gene_count).
    if (k > gene_count) break;
    std::vector<int> combo(k);
    for (int i = 0; i < k; ++i) combo[i] = i;
    while (true) {
      sets.push_back(combo);
      int i = k - 1;
      while (i >= 0 && combo[i] == gene_count - k + i) --i;
      if (i < 0) break;
      ++combo[i];
      for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return sets;
}

std::optional<ControlStrategy> minimal_control(
    const Stg& stg, const std::vector<Attractor>& all, int source_id,
    int target_id, int max_flips) {
  if (source_id == target_id) return ControlStrategy{};

  // Strong-basin membership per state (-1 = no unique attractor).
  std::vector<int> basin_of(stg.state_count(), -1);
  for (const Attractor& a : all)
    for (State s : strong_basin(stg, all, a.id)) basin_of[s] = a.id;

  // One intervention edge A -> B per pair, first found in flip-set
  // (cardinality, lexicographic) then state order.
  const int n_attr = static_cast<int>(all.size());
  std::vector<std::map<int, StrategyStep>> edges(n_attr);
  auto flip_sets = enumerate_flip_sets(stg.gene_count, max_flips);
  for (const Attractor& a : all) {
    for (const auto& flips : flip_sets) {
      for (State s : a.states) {
        State t = flip_bits(s, flips);
        int b = basin_of[t];
        if (b < 0 || b == a.id) continue;
        edges[a.id].try_emplace(b, StrategyStep{s, Intervention{flips}});
      }
    }
  }

  // BFS over the attractor graph.
  std::vector<int> parent(n_attr, -1), via(n_attr, -1);
  std::vector<char> seen(n_attr, 0);
  std::vector<int> queue{source_id};
  seen[source_id] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int a = queue[head];
    if (a == target_id) break;
    for (const auto& [b, step] : edges[a]) {
      if (seen[b]) continue;
      seen[b] = 1;
      parent[b] = a;
      queue.push_back(b);
    }
  }
  if (!seen[target_id]) return std::nullopt;

  ControlStrategy strategy;
  for (int b = target_id; b != source_id; b = parent[b])
    strategy.steps.push_back(edges[parent[b]].at(b));
  std::reverse(strategy.steps.begin(), strategy.steps.end());
  return strategy;
}

namespace {

// Ids of attractors forward-reachable from `from`.
std::vector<int> reachable_attractors(const Stg& stg,
                                      const std::vector<int>& attractor_of,
                                      State from) {
  std::vector<char> seen(stg.state_count(), 0);
  std::vector<std::uint32_t> queue{static_cast<std::uint32_t>(from)};
  seen[from] = 1;
  std::vector<int> found;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::uint32_t s = queue[head];
    int a = attractor_of[s];
    if (a >= 0 &&
        std::find(found.begin(), found.end(), a) == found.end())
      found.push_back(a);
    for (std::uint32_t t : stg.successors[s])
      if (!seen[t]) {
        seen[t] = 1;
        queue.push_back(t);
      }
  }
  std::sort(found.begin(), found.end());
  return found;
}

struct BruteForceSearch {
  const Stg& stg;
  const std::vector<Attractor>& all;
  const std::vector<std::vector<int>>& flip_sets;
  std::vector<int> attractor_of;
  std::unordered_map<State, std::vector<int>> reach_cache;

  const std::vector<int>& reach(State s) {
    auto it = reach_cache.find(s);
    if (it != reach_cache.end()) return it->second;
    return reach_cache.emplace(s, reachable_attractors(stg, attractor_of, s))
        .first->second;
  }

  bool dfs(int current, int target, int remaining,
           std::vector<char>& on_path) {
    if (current == target) return true;
    if (remaining == 0) return false;
    for (State s : all[current].states) {
      for (const auto& flips : flip_sets) {
        State t = flip_bits(s, flips);
        const std::vector<int>& ids = reach(t);
        if (ids.size() != 1) continue;  // outcome must be guaranteed
        int b = ids.front();
        if (b == current || on_path[b]) continue;
        on_path[b] = 1;
        bool ok = dfs(b, target, remaining - 1, on_path);
        on_path[b] = 0;
        if (ok) return true;
      }
    }
    return false;
  }
};

}  // namespace

std::optional<int> brute_force_min_length(const Stg& stg,
                                          const std::vector<Attractor>& all,
                                          int source_id, int target_id,
                                          int max_flips, int max_len) {
  auto flip_sets = enumerate_flip_sets(stg.gene_count, max_flips);
  BruteForceSearch search{stg, all, flip_sets, {}, {}};
  search.attractor_of.assign(stg.state_count(), -1);
  for (const Attractor& a : all)
    for (State s : a.states) search.attractor_of[s] = a.id;

  for (int len = 0; len <= max_len; ++len) {
    std::vector<char> on_path(all.size(), 0);
    on_path[source_id] = 1;
    if (search.dfs(source_id, target_id, len, on_path)) return len;
  }
  return std::nullopt;
}

}  // namespace pbn
