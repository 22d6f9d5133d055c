#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "pbn/env.hpp"

using namespace pbn;

namespace {
const std::string kExample1 = std::string(PBN_DATA_DIR) + "/example1.pbn";

struct Setup {
  PbnModel model;
  PaRegistry registry;
  std::vector<Attractor> attrs;
};

Setup exact_setup() {
  Setup s{load_model(kExample1), {}, {}};
  s.attrs = attractors(build_stg(s.model));
  std::uint64_t step = 0;
  for (const auto& a : s.attrs)
    for (State st : a.states)
      s.registry.insert(st, step++, DiscoverySource::Step1);
  return s;
}

const State s0000 = from_bitstring("0000");
const State s1000 = from_bitstring("1000");
const State s1010 = from_bitstring("1010");
const State s0101 = from_bitstring("0101");
}  // namespace

TEST_CASE("reward arithmetic") {
  CHECK(reward(RewardScheme::Mixed, true, 2) == 998.0);
  CHECK(reward(RewardScheme::Mixed, true, 0) == 1000.0);
  CHECK(reward(RewardScheme::Mixed, false, 3) == -3.0);
  CHECK(reward(RewardScheme::Mixed, false, 0) == 0.0);
  CHECK(reward(RewardScheme::ShiftedPenalty, false, 1) == -101.0);
  CHECK(reward(RewardScheme::ShiftedPenalty, true, 1) == -1.0);
  CHECK(reward(RewardScheme::ShiftedPenalty, true, 0) == 0.0);
  CHECK(reward(RewardScheme::ShiftedPenalty, false, 3) == -103.0);
}

TEST_CASE("intervention and strategy formatting") {
  CHECK(format_intervention({{0, 2}}) == "0+2");
  CHECK(format_intervention({{1}}) == "1");
  CHECK(format_intervention({{}}) == "");
  CHECK(format_strategy({{{0, 2}}, {{1}}}) == "0+2;1");
  CHECK(format_strategy({}) == "");
}

TEST_CASE("reset samples the source uniformly and builds the observation") {
  Setup s = exact_setup();
  ControlEnv env(s.model, s.registry, RewardScheme::Mixed);
  std::mt19937_64 rng(17);

  // Source: two-state attractor; target: {(0,1,0,1)}.
  ControlProblem prob{s.attrs[1].states, s.attrs[2].states};
  std::map<State, int> starts;
  for (int i = 0; i < 4000; ++i) {
    env.reset(prob, rng);
    ++starts[env.current_state()];
  }
  CHECK(starts.size() == 2);
  CHECK(starts[s1000] > 1600);
  CHECK(starts[s1010] > 1600);

  auto obs = env.reset(prob, rng);
  REQUIRE(obs.size() == 8);
  for (int g = 0; g < 4; ++g) {
    CHECK(obs[g] == (get_bit(env.current_state(), g) ? 1.0 : 0.0));
    CHECK(obs[4 + g] == (get_bit(s0101, g) ? 1.0 : 0.0));
  }
}

TEST_CASE("a flip into the strong basin succeeds deterministically") {
  Setup s = exact_setup();
  ControlEnv env(s.model, s.registry, RewardScheme::Mixed);
  std::mt19937_64 rng(1);
  ControlProblem prob{{s1010}, {s0000}};
  env.reset(prob, rng);

  // (1,0,1,0) with genes 0 and 2 flipped is (0,0,0,0), the target itself.
  auto res = env.apply_intervention({{0, 2}}, rng);
  CHECK(res.state == s0000);
  CHECK(res.reward == 998.0);
  CHECK(res.success);
  CHECK(res.done);
  CHECK(env.interventions_used() == 1);
}

TEST_CASE("a single flip from the cycle has both stochastic outcomes") {
  Setup s = exact_setup();
  ControlEnv env(s.model, s.registry, RewardScheme::Mixed);
  std::mt19937_64 rng(23);
  ControlProblem prob{{s1010}, {s0000}};

  // Flipping gene 0 at (1,0,1,0) gives (0,0,1,0), in the weak basins of
  // both {(0,0,0,0)} and {(0,1,0,1)}; free evolution can land in either.
  std::set<State> landings;
  for (int i = 0; i < 200; ++i) {
    env.reset(prob, rng);
    auto res = env.apply_intervention({{0}}, rng);
    CHECK(env.at_registered_state());
    CHECK(res.reward == (res.success ? 999.0 : -1.0));
    landings.insert(res.state);
  }
  CHECK(landings.count(s0000) == 1);
  CHECK(landings.count(s0101) == 1);
}

TEST_CASE("the empty intervention waits inside the attractor") {
  Setup s = exact_setup();
  ControlEnv env(s.model, s.registry, RewardScheme::Mixed);
  std::mt19937_64 rng(2);
  ControlProblem prob{{s1000}, {s0000}};
  env.reset(prob, rng);

  auto res = env.apply_intervention({{}}, rng);
  CHECK(res.reward == 0.0);
  CHECK_FALSE(res.success);
  // Still somewhere in the source attractor.
  CHECK((res.state == s1000 || res.state == s1010));

  // At a fixed point it stays put.
  ControlProblem fixed{{s0101}, {s0000}};
  env.reset(fixed, rng);
  auto stay = env.apply_intervention({{}}, rng);
  CHECK(stay.state == s0101);
}

TEST_CASE("malformed interventions are rejected") {
  Setup s = exact_setup();
  ControlEnv env(s.model, s.registry, RewardScheme::Mixed);
  std::mt19937_64 rng(3);
  env.reset({{s1010}, {s0000}}, rng);

  CHECK_THROWS_AS(env.apply_intervention({{0, 1, 2, 3}}, rng),
                  std::invalid_argument);  // above max_flips
  CHECK_THROWS_AS(env.apply_intervention({{2, 0}}, rng),
                  std::invalid_argument);  // not ascending
  CHECK_THROWS_AS(env.apply_intervention({{1, 1}}, rng),
                  std::invalid_argument);  // duplicate
  CHECK_THROWS_AS(env.apply_intervention({{4}}, rng),
                  std::invalid_argument);  // gene out of range
}

TEST_CASE("episode terminates at the intervention cap") {
  Setup s = exact_setup();
  EnvConfig cfg;
  ControlEnv env(s.model, s.registry, RewardScheme::Mixed, cfg);
  std::mt19937_64 rng(4);
  // Gene-1 flips can never switch x0 on, so the cycle attractor stays
  // unreachable and the episode must run into the cap.
  ControlProblem prob{{s0101}, s.attrs[1].states};
  env.reset(prob, rng);

  int steps = 0;
  bool done = false;
  while (!done) {
    auto res = env.apply_intervention({{1}}, rng);
    CHECK_FALSE(res.success);
    done = res.done;
    ++steps;
    REQUIRE(steps <= cfg.episode_cap);
  }
  CHECK(steps == cfg.episode_cap);
  CHECK(env.interventions_used() == cfg.episode_cap);

  // After done, further interventions are refused.
  CHECK_THROWS_AS(env.apply_intervention({{}}, rng), std::logic_error);
}

TEST_CASE("interventions require a registered state") {
  PbnModel model = load_model(kExample1);
  PaRegistry reg;  // only one state registered
  reg.insert(s1010, 0, DiscoverySource::Step1);
  ControlEnv env(model, reg, RewardScheme::Mixed);
  std::mt19937_64 rng(5);
  CHECK_THROWS_AS(env.reset({{s0000}, {s1010}}, rng), std::invalid_argument);
}

TEST_CASE("free evolution can discover new pseudo-attractor states") {
  PbnModel model = load_model(kExample1);
  PaRegistry reg;
  reg.insert(s1000, 0, DiscoverySource::Step1);
  reg.insert(s1010, 0, DiscoverySource::Step1);
  ControlEnv env(model, reg, RewardScheme::Mixed);
  std::mt19937_64 rng(6);
  env.reset({{s1010}, {s1000}}, rng);

  // Flip gene 0 at (1,0,1,0): evolution ends in one of the two fixed
  // points, neither registered, so the stuck detector must fire and the
  // step reports the discovery.
  auto res = env.apply_intervention({{0}}, rng);
  REQUIRE(res.discovered.size() == 1);
  CHECK((res.discovered[0] == s0000 || res.discovered[0] == s0101));
  CHECK(reg.contains(res.discovered[0]));
  CHECK(res.state == res.discovered[0]);
}
