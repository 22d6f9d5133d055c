// Command-line front end for the PBN attractor-control toolkit.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pbn/agent.hpp"
#include "pbn/dynamics.hpp"
#include "pbn/eval.hpp"
#include "pbn/model.hpp"
#include "pbn/oracle.hpp"
#include "pbn/pasip.hpp"

namespace {

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string source_tag(pbn::DiscoverySource s) {
  switch (s) {
    case pbn::DiscoverySource::Step1: return "step1";
    case pbn::DiscoverySource::Step2Stuck: return "step2-1";
    case pbn::DiscoverySource::Step2History: return "step2-2";
  }
  return "?";
}

// Control nodes and a registry seeded from the exact attractors (small
// models) or a PASIP pre-processing scan.
struct ControlSetup {
  pbn::PaRegistry registry;
  std::vector<std::vector<pbn::State>> nodes;
};

ControlSetup make_setup(const pbn::PbnModel& model, bool use_pasip,
                        std::uint64_t seed) {
  ControlSetup setup;
  if (!use_pasip && model.gene_count() <= 20) {
    pbn::Stg stg = pbn::build_stg(model);
    for (const pbn::Attractor& a : pbn::attractors(stg)) {
      for (pbn::State s : a.states)
        setup.registry.insert(s, 0, pbn::DiscoverySource::Step1);
      setup.nodes.push_back(a.states);
    }
  } else {
    std::mt19937_64 rng(seed);
    setup.registry = pbn::step1_scan(model, {}, rng);
    for (pbn::State s : setup.registry.states()) setup.nodes.push_back({s});
  }
  return setup;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boolean / probabilistic Boolean network attractor control"};
  app.require_subcommand(1);

  std::string model_path, out_path;
  std::uint64_t seed = 0;
  app.fallthrough();  // --model/--seed/--out may follow the subcommand
  app.add_option("--model", model_path, "model file");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_path, "output file (default stdout)");

  auto* cmd_attractors = app.add_subcommand("attractors", "exact attractors");
  auto* cmd_basins = app.add_subcommand("basins", "weak and strong basins");

  auto* cmd_pasip =
      app.add_subcommand("pasip", "pseudo-attractor state scan (Step I)");
  int pasip_runs = -1;
  cmd_pasip->add_option("--runs", pasip_runs, "number of initial states");

  auto* cmd_oracle =
      app.add_subcommand("oracle", "exact minimal control strategies");
  int oracle_flips = 3;
  cmd_oracle->add_option("--max-flips", oracle_flips, "flip cap");

  auto* cmd_train = app.add_subcommand("train", "train the control agent");
  std::uint64_t train_steps = 50000;
  std::string reward_name = "mixed", checkpoint_path = "checkpoint.bin";
  int train_flips = 3;
  bool train_pasip = false;
  cmd_train->add_option("--steps", train_steps, "environment steps");
  cmd_train->add_option("--reward", reward_name, "mixed|shifted");
  cmd_train->add_option("--max-flips", train_flips, "flip cap");
  cmd_train->add_option("--checkpoint", checkpoint_path, "checkpoint file");
  cmd_train->add_flag("--pasip", train_pasip,
                      "seed the registry with a PASIP scan instead of exact "
                      "attractors");

  auto* cmd_eval = app.add_subcommand("eval", "evaluate a trained agent");
  std::string eval_checkpoint;
  int eval_repeats = 10, eval_flips = 3;
  std::string eval_reward = "mixed";
  bool eval_pasip = false;
  cmd_eval->add_option("--checkpoint", eval_checkpoint)->required();
  cmd_eval->add_option("--repeats", eval_repeats, "runs per ordered pair");
  cmd_eval->add_option("--max-flips", eval_flips, "flip cap");
  cmd_eval->add_option("--reward", eval_reward, "mixed|shifted");
  cmd_eval->add_flag("--pasip", eval_pasip, "use a PASIP-scanned registry");

  auto* cmd_compare =
      app.add_subcommand("compare", "agent vs oracle strategy lengths");
  std::string compare_eval, compare_oracle;
  cmd_compare->add_option("--eval", compare_eval, "evaluation CSV")->required();
  cmd_compare->add_option("--oracle", compare_oracle, "oracle CSV")
      ->required();

  CLI11_PARSE(app, argc, argv);

  auto parse_reward = [](const std::string& name) {
    if (name == "mixed") return pbn::RewardScheme::Mixed;
    if (name == "shifted") return pbn::RewardScheme::ShiftedPenalty;
    throw CLI::ValidationError("--reward", "expected 'mixed' or 'shifted'");
  };

  try {
    auto load = [&]() -> pbn::PbnModel {
      if (model_path.empty()) {
        std::cerr << "error: --model is required for this subcommand\n";
        std::exit(2);
      }
      try {
        return pbn::load_model(model_path);
      } catch (const pbn::ModelIoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(2);
      }
    };

    if (cmd_attractors->parsed()) {
      pbn::PbnModel model = load();
      pbn::Stg stg = pbn::build_stg(model);
      std::ostringstream out;
      for (const pbn::Attractor& a : pbn::attractors(stg)) {
        out << "A" << a.id << ": " << (a.is_fixed_point ? "fixed" : "cyclic")
            << ":";
        for (pbn::State s : a.states)
          out << " " << pbn::to_bitstring(s, model.gene_count());
        out << "\n";
      }
      write_output(out_path, out.str());
    } else if (cmd_basins->parsed()) {
      pbn::PbnModel model = load();
      pbn::Stg stg = pbn::build_stg(model);
      auto attrs = pbn::attractors(stg);
      std::ostringstream out;
      for (const pbn::Attractor& a : attrs) {
        out << "A" << a.id << " weak:";
        for (pbn::State s : pbn::weak_basin(stg, a))
          out << " " << pbn::to_bitstring(s, model.gene_count());
        out << "\nA" << a.id << " strong:";
        for (pbn::State s : pbn::strong_basin(stg, attrs, a.id))
          out << " " << pbn::to_bitstring(s, model.gene_count());
        out << "\n";
      }
      write_output(out_path, out.str());
    } else if (cmd_pasip->parsed()) {
      pbn::PbnModel model = load();
      pbn::PasipConfig config;
      config.k_initial_states = pasip_runs;
      std::mt19937_64 rng(seed);
      pbn::PaRegistry registry = pbn::step1_scan(model, config, rng);
      std::ostringstream out;
      for (const pbn::Discovery& d : registry.log())
        out << pbn::to_bitstring(d.state, model.gene_count()) << " "
            << source_tag(d.source) << "\n";
      write_output(out_path, out.str());
    } else if (cmd_oracle->parsed()) {
      pbn::PbnModel model = load();
      pbn::Stg stg = pbn::build_stg(model);
      auto attrs = pbn::attractors(stg);
      write_output(out_path, pbn::oracle_csv(stg, attrs, oracle_flips));
    } else if (cmd_train->parsed()) {
      pbn::PbnModel model = load();
      ControlSetup setup = make_setup(model, train_pasip, seed);
      pbn::AgentConfig config;
      config.max_flips = train_flips;
      std::mt19937_64 rng(seed);
      pbn::TrainResult result =
          pbn::train(model, setup.registry, setup.nodes,
                     parse_reward(reward_name), config, train_steps, rng);
      pbn::save_checkpoint(result.net, checkpoint_path);
      write_output(out_path, pbn::train_log_csv(result.log));
    } else if (cmd_eval->parsed()) {
      pbn::PbnModel model = load();
      ControlSetup setup = make_setup(model, eval_pasip, seed);
      pbn::QNetwork net = pbn::load_checkpoint(eval_checkpoint);
      pbn::EvalReport report =
          pbn::evaluate(net, model, setup.registry, setup.nodes,
                        parse_reward(eval_reward), eval_repeats, seed,
                        eval_flips);
      write_output(out_path, pbn::eval_report_csv(report));
      std::cerr << "success: " << report.success_percent
                << "%, avg successful length: " << report.avg_success_length
                << "\n";
    } else if (cmd_compare->parsed()) {
      pbn::CompareReport report =
          pbn::compare(read_file(compare_eval), read_file(compare_oracle));
      write_output(out_path, pbn::compare_csv(report));
      for (const auto& [s, t] : report.missing)
        std::cerr << "warning: pair " << s << "->" << t
                  << " missing from oracle output\n";
      std::cerr << "mean ratio: " << report.mean_ratio << "\n";
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
