#include "pbn/eval.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace pbn {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, int i, int j, int repeat) {
  std::uint64_t h = seed;
  for (std::uint64_t v :
       {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j),
        static_cast<std::uint64_t>(repeat)}) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace

EvalReport evaluate(const QNetwork& net, const PbnModel& model,
                    PaRegistry& registry,
                    const std::vector<std::vector<State>>& nodes,
                    RewardScheme scheme, int repeats, std::uint64_t seed,
                    int max_flips) {
  if (net.gene_count() != model.gene_count())
    throw std::invalid_argument("checkpoint/model gene count mismatch");

  EnvConfig env_config;
  env_config.max_flips = max_flips;

  EvalReport report;
  int successes = 0;
  long total_success_length = 0;

  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    for (int j = 0; j < static_cast<int>(nodes.size()); ++j) {
      if (i == j) continue;
      for (int r = 0; r < repeats; ++r) {
        std::mt19937_64 rng(derive_seed(seed, i, j, r));
        ControlEnv env(model, registry, scheme, env_config);
        std::vector<double> obs = env.reset({nodes[i], nodes[j]}, rng);
        EvalRow row;
        row.source_id = i;
        row.target_id = j;
        row.repeat = r;
        while (!env.done()) {
          Intervention a = select_action(net, obs, 0.0, rng, max_flips);
          StepResult res = env.apply_intervention(a, rng);
          row.interventions.push_back(std::move(a));
          row.success = res.success;
          obs = std::move(res.observation);
        }
        row.length = static_cast<int>(row.interventions.size());
        if (row.success) {
          ++successes;
          total_success_length += row.length;
          ++report.length_histogram[row.length];
        }
        report.rows.push_back(std::move(row));
      }
    }
  }

  if (!report.rows.empty())
    report.success_percent =
        100.0 * successes / static_cast<double>(report.rows.size());
  if (successes > 0)
    report.avg_success_length =
        static_cast<double>(total_success_length) / successes;
  return report;
}

std::string eval_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "source_id,target_id,repeat,success,length,interventions\n";
  for (const EvalRow& row : report.rows)
    out << row.source_id << "," << row.target_id << "," << row.repeat << ","
        << (row.success ? 1 : 0) << "," << row.length << ","
        << format_strategy(row.interventions) << "\n";
  return out.str();
}

std::string histogram_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "length,count\n";
  for (const auto& [len, count] : report.length_histogram)
    out << len << "," << count << "\n";
  return out.str();
}

std::string oracle_csv(const Stg& stg, const std::vector<Attractor>& all,
                       int max_flips) {
  std::ostringstream out;
  out << "source_id,target_id,min_length,strategy\n";
  for (const Attractor& src : all) {
    for (const Attractor& dst : all) {
      if (src.id == dst.id) continue;
      auto strategy = minimal_control(stg, all, src.id, dst.id, max_flips);
      out << src.id << "," << dst.id << ",";
      if (strategy) {
        std::vector<Intervention> flips;
        for (const StrategyStep& step : strategy->steps)
          flips.push_back(step.intervention);
        out << strategy->length() << "," << format_strategy(flips) << "\n";
      } else {
        out << "-1,\n";
      }
    }
  }
  return out.str();
}

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {  // header
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream fin(line);
    std::string field;
    while (std::getline(fin, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

CompareReport compare(const std::string& eval_text,
                      const std::string& oracle_text) {
  struct PairStats {
    int successes = 0;
    long total_len = 0;
  };
  std::map<std::pair<int, int>, PairStats> agent;
  for (const auto& fields : parse_csv(eval_text)) {
    if (fields.size() < 5) continue;
    std::pair<int, int> key{std::stoi(fields[0]), std::stoi(fields[1])};
    auto& stats = agent[key];
    if (fields[3] == "1") {
      ++stats.successes;
      stats.total_len += std::stol(fields[4]);
    }
  }

  std::map<std::pair<int, int>, int> oracle;
  for (const auto& fields : parse_csv(oracle_text)) {
    if (fields.size() < 3) continue;
    int len = std::stoi(fields[2]);
    if (len >= 0)
      oracle[{std::stoi(fields[0]), std::stoi(fields[1])}] = len;
  }

  CompareReport report;
  double ratio_sum = 0.0;
  int ratio_count = 0;
  for (const auto& [key, stats] : agent) {
    auto it = oracle.find(key);
    if (it == oracle.end()) {
      report.missing.push_back(key);
      continue;
    }
    if (stats.successes == 0) continue;  // no successful run to compare
    CompareRow row;
    row.source_id = key.first;
    row.target_id = key.second;
    row.agent_mean_length =
        static_cast<double>(stats.total_len) / stats.successes;
    row.oracle_length = it->second;
    row.ratio = it->second > 0 ? row.agent_mean_length / it->second : 0.0;
    if (it->second > 0) {
      ratio_sum += row.ratio;
      ++ratio_count;
    }
    report.rows.push_back(row);
  }
  if (ratio_count > 0) report.mean_ratio = ratio_sum / ratio_count;
  return report;
}

std::string compare_csv(const CompareReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "source_id,target_id,agent_mean_length,oracle_length,ratio\n";
  for (const CompareRow& row : report.rows)
    out << row.source_id << "," << row.target_id << ","
        << row.agent_mean_length << "," << row.oracle_length << ","
        << row.ratio << "\n";
  return out.str();
}

}  // namespace pbn
