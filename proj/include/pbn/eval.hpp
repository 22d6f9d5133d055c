#pragma once

#include <map>
#include <string>
#include <vector>

#include "pbn/agent.hpp"
#include "pbn/oracle.hpp"

namespace pbn {

struct EvalRow {
  int source_id = 0;
  int target_id = 0;
  int repeat = 0;
  bool success = false;
  int length = 0;  // interventions used
  std::vector<Intervention> interventions;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double success_percent = 0.0;
  double avg_success_length = 0.0;        // over successful runs only
  std::map<int, int> length_histogram;    // successful runs only
};

/// Greedy (eps = 0) evaluation of every ordered node pair, `repeats` runs
/// each, on per-pair derived seeds.
EvalReport evaluate(const QNetwork& net, const PbnModel& model,
                    PaRegistry& registry,
                    const std::vector<std::vector<State>>& nodes,
                    RewardScheme scheme, int repeats, std::uint64_t seed,
                    int max_flips = 3);

std::string eval_report_csv(const EvalReport& report);
std::string histogram_csv(const EvalReport& report);

/// CSV of exact minimal strategies for all ordered attractor pairs;
/// unreachable pairs get min_length -1 and an empty strategy.
std::string oracle_csv(const Stg& stg, const std::vector<Attractor>& all,
                       int max_flips);

struct CompareRow {
  int source_id = 0;
  int target_id = 0;
  double agent_mean_length = 0.0;
  int oracle_length = 0;
  double ratio = 0.0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  double mean_ratio = 0.0;
  std::vector<std::pair<int, int>> missing;  // pairs without an oracle entry
};

/// Joins an evaluation CSV with an oracle CSV on (source_id, target_id).
/// Pairs missing from the oracle output (or unreachable there) are excluded
/// and reported in `missing`.
CompareReport compare(const std::string& eval_text,
                      const std::string& oracle_text);

std::string compare_csv(const CompareReport& report);

}  // namespace pbn
