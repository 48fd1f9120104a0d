#include <cmath>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "lifemodel/agents.hpp"
#include "oracles.hpp"

using namespace lifemodel;

namespace {

const RuleTable kLife = rule_table_of(BuiltinRule::game_of_life());

GameState blinker_state() {
  GameState s{Grid(5, 5), 0, Objective::Maximize};
  for (int y = 1; y <= 3; ++y) s.grid.set(2, y, 1);
  return s;
}

ActionSequence noops(int n) { return ActionSequence(n, Action::noop()); }

// A 30x30 state with one Flip whose next-step score beats every other action,
// found by enumerating all 901 actions through the neighbour-counting oracle.
struct UniqueBest {
  GameState state;
  Action best;
};

UniqueBest find_unique_best() {
  Rng rng(2024);
  const ActionSpace space{30, 30};
  for (;;) {
    GameState s{random_start(30, 30, 0.08, rng), 0, Objective::Maximize};
    int top = -1;
    int ties = 0;
    Action arg;
    for (int i = 0; i < space.size(); ++i) {
      Grid g = s.grid;
      const Action a = space.at(i);
      if (!a.is_noop()) g.flip(a.x, a.y);
      const int v = oracle::step_life(g).alive_count();
      if (v > top) {
        top = v;
        ties = 1;
        arg = a;
      } else if (v == top) {
        ++ties;
      }
    }
    if (ties == 1 && !arg.is_noop()) return {s, arg};
  }
}

}  // namespace

TEST_CASE("evaluate_sequence examples") {
  RheaConfig c;
  GameState empty{Grid(10, 10), 0, Objective::Maximize};
  c.discountFactor = 0.3;
  CHECK(evaluate_sequence(empty, noops(7), kLife, c) == 0.0);

  Rng rng(1);
  GameState s{random_start(10, 10, 0.5, rng), 0, Objective::Maximize};
  const Action a = Action::flip(3, 4);
  const ActionSequence one{a};
  CHECK(evaluate_sequence(s, one, kLife, c) == game_tick(s, a, kLife).grid.alive_count());

  c.discountFactor = 0.5;
  CHECK(evaluate_sequence(blinker_state(), noops(3), kLife, c) == doctest::Approx(3 * (1 + 0.5 + 0.25)));

  GameState m = blinker_state();
  m.objective = Objective::Minimize;
  CHECK(evaluate_sequence(m, noops(3), kLife, c) == doctest::Approx(-5.25));
}

TEST_CASE("evaluate_sequence leaves the state alone") {
  Rng rng(2);
  RheaConfig c;
  const ActionSpace space{12, 12};
  for (int i = 0; i < 50; ++i) {
    const GameState s{random_start(12, 12, 0.5, rng), 3, Objective::Maximize};
    const GameState copy = s;
    evaluate_sequence(s, random_sequence(space, 10, rng), kLife, c);
    CHECK(s.grid == copy.grid);
    CHECK(s.tick == copy.tick);
  }
}

TEST_CASE("averaged fitness equals the mean of repeated evaluations") {
  Rng rng(3);
  RheaConfig c;
  c.nEvals = 7;
  const ActionSpace space{10, 10};
  for (int i = 0; i < 50; ++i) {
    const GameState s{random_start(10, 10, 0.5, rng), 0, Objective::Maximize};
    const ActionSequence seq = random_sequence(space, 8, rng);
    double sum = 0;
    for (int k = 0; k < c.nEvals; ++k) sum += evaluate_sequence(s, seq, kLife, c);
    CHECK(averaged_fitness(s, seq, kLife, c) == doctest::Approx(sum / c.nEvals));
  }
}

TEST_CASE("mutate_sequence examples") {
  Rng rng(4);
  const ActionSpace space{30, 30};
  const ActionSequence parent = random_sequence(space, 20, rng);

  RheaConfig still;
  still.probMutation = 0.0;
  still.mutationTransducer = false;
  still.flipMinOneValue = false;
  CHECK(mutate_sequence(parent, still, space, rng) == parent);

  RheaConfig all;
  all.probMutation = 1.0;
  all.mutationTransducer = false;
  all.flipMinOneValue = false;
  // Binomial(10000 * 20, 1/901): mean 222, sd about 14.9.
  long long matches = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const ActionSequence child = mutate_sequence(parent, all, space, rng);
    for (std::size_t i = 0; i < child.size(); ++i) matches += child[i] == parent[i];
  }
  const double n = trials * 20.0;
  const double p = 1.0 / 901;
  CHECK(std::abs(matches - n * p) < 4 * std::sqrt(n * p * (1 - p)));

  RheaConfig repeat;
  repeat.mutationTransducer = true;
  repeat.repeatProb = 1.0;
  repeat.probMutation = 0.0;
  for (int t = 0; t < 100; ++t) {
    const ActionSequence child = mutate_sequence(random_sequence(space, 5, rng), repeat, space, rng);
    for (int i = 1; i < 5; ++i) CHECK(child[i] == child[0]);
  }

  RheaConfig infeasible;
  infeasible.mutationTransducer = true;
  infeasible.repeatProb = 0.7;
  infeasible.probMutation = 0.4;
  CHECK_THROWS_AS(mutate_sequence(parent, infeasible, space, rng), std::invalid_argument);
  CHECK_THROWS_AS(RheaAgent(infeasible, 1), std::invalid_argument);
}

TEST_CASE("flipMinOneValue redraws one position of an unchanged child") {
  Rng rng(5);
  const ActionSpace space{3, 3};  // 10 actions, so the forced draw often lands back on the parent
  RheaConfig c;
  c.probMutation = 0.0;
  c.mutationTransducer = false;
  c.flipMinOneValue = true;
  int changed = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const ActionSequence parent = random_sequence(space, 4, rng);
    const ActionSequence child = mutate_sequence(parent, c, space, rng);
    int diff = 0;
    for (int i = 0; i < 4; ++i) diff += child[i] != parent[i];
    CHECK(diff <= 1);
    changed += diff;
  }
  // The forced redraw differs from the parent with probability 9/10.
  CHECK(std::abs(changed - 0.9 * trials) < 4 * std::sqrt(trials * 0.9 * 0.1));
}

TEST_CASE("shift_sequence examples") {
  Rng rng(6);
  const ActionSpace space{30, 30};
  const ActionSequence one{Action::flip(1, 1)};
  const ActionSequence s1 = shift_sequence(one, space, rng);
  CHECK(s1.size() == 1);
  CHECK(space.legal(s1[0]));

  const ActionSequence abc{Action::flip(0, 0), Action::flip(1, 0), Action::flip(2, 0)};
  const ActionSequence s3 = shift_sequence(abc, space, rng);
  REQUIRE(s3.size() == 3);
  CHECK(s3[0] == abc[1]);
  CHECK(s3[1] == abc[2]);

  // A marker action the 30x30 space can never draw; L shifts flush all of it.
  ActionSequence seq(6, Action::flip(35, 35));
  for (int i = 0; i < 5; ++i) seq = shift_sequence(seq, space, rng);
  CHECK(seq.front() == Action::flip(35, 35));
  seq = shift_sequence(seq, space, rng);
  for (const Action& a : seq) CHECK(a != Action::flip(35, 35));
}

TEST_CASE("rhea with zero budget plays its initial random sequence") {
  RheaConfig c;
  c.budgetIterations = 0;
  c.sequenceLength = 4;
  RheaAgent agent(c, 77);
  const GameState s = blinker_state();
  const Action a = agent.act(s, kLife);
  REQUIRE(agent.survivor().has_value());
  CHECK(agent.survivor()->front() == a);

  Rng same(77);
  CHECK(random_sequence(ActionSpace::of(s.grid), 4, same).front() == a);
}

TEST_CASE("rhea finds the unique best flip") {
  const UniqueBest ub = find_unique_best();
  RheaConfig c;
  c.sequenceLength = 1;
  c.probMutation = 1.0;
  c.mutationTransducer = false;
  c.shiftBuffer = false;
  c.nEvals = 1;

  auto hits = [&](int budget) {
    c.budgetIterations = budget;
    int found = 0;
    for (int seed = 0; seed < 100; ++seed) {
      RheaAgent agent(c, static_cast<std::uint64_t>(seed) + 1);
      found += agent.act(ub.state, kLife) == ub.best;
    }
    return found;
  };

  // Each iteration draws one of 901 actions uniformly, so the best one is seen
  // with probability 1 - (900/901)^(budget+1): 0.891 at 2000, 0.988 at 4000.
  const int at_2000 = hits(2000);
  const double p2000 = 1 - std::pow(900.0 / 901.0, 2001);
  CHECK(std::abs(at_2000 - 100 * p2000) < 4 * std::sqrt(100 * p2000 * (1 - p2000)));
  CHECK(hits(4000) >= 95);
}

TEST_CASE("rhea incumbent fitness never decreases within a tick") {
  Rng rng(8);
  RheaConfig c;
  c.budgetIterations = 40;
  c.sequenceLength = 6;
  RheaAgent agent(c, 3);
  GameState s{random_start(12, 12, 0.5, rng), 0, Objective::Maximize};
  for (int t = 0; t < 20; ++t) {
    const Action a = agent.act(s, kLife);
    const auto& h = agent.incumbent_history();
    CHECK(h.size() == 41);
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] >= h[i - 1]);
    CHECK(h.back() == averaged_fitness(s, *agent.survivor(), kLife, c));
    s = game_tick(s, a, kLife);
  }
}

TEST_CASE("rhea is deterministic for a fixed seed") {
  Rng rng(9);
  const GameState s{random_start(10, 10, 0.5, rng), 0, Objective::Maximize};
  RheaConfig c;
  c.budgetIterations = 30;
  RheaAgent a(c, 5);
  RheaAgent b(c, 5);
  CHECK(a.act(s, kLife) == b.act(s, kLife));
  CHECK(a.act(s, kLife) == b.act(s, kLife));
}

TEST_CASE("rhea shift buffer carries the survivor forward") {
  Rng rng(10);
  GameState s{random_start(10, 10, 0.5, rng), 0, Objective::Maximize};
  RheaConfig c;
  c.budgetIterations = 0;
  c.sequenceLength = 5;
  c.shiftBuffer = true;
  RheaAgent agent(c, 1);
  agent.act(s, kLife);
  const ActionSequence first = *agent.survivor();
  agent.act(s, kLife);
  const ActionSequence second = *agent.survivor();
  for (int i = 0; i < 4; ++i) CHECK(second[i] == first[i + 1]);

  agent.reset();
  CHECK_FALSE(agent.survivor().has_value());
}

TEST_CASE("baseline agents") {
  DoNothingAgent idle;
  const GameState s = blinker_state();
  CHECK(idle.act(s, kLife).is_noop());

  Rng rng(11);
  GameState big{Grid(30, 30), 0, Objective::Maximize};
  const ActionSpace space = ActionSpace::of(big.grid);
  const int draws = 100000;
  int noop_count = 0;
  for (int i = 0; i < draws; ++i) {
    const Action a = RandomAgent::random_act(big, rng);
    CHECK(space.legal(a));
    noop_count += a.is_noop();
  }
  const double p = 1.0 / 901;
  CHECK(std::abs(noop_count - draws * p) < 3 * std::sqrt(draws * p * (1 - p)));
}

TEST_CASE("rhea config text round trip and validation") {
  RheaConfig c;
  c.probMutation = 0.45;
  c.sequenceLength = 7;
  c.mutationTransducer = true;
  c.discountFactor = 0.95;
  std::stringstream ss(c.to_text() + "# comment\n");
  CHECK(RheaConfig::from_text(ss) == c);

  RheaConfig d;
  CHECK(d.flipMinOneValue);
  CHECK(d.probMutation == 0.3);
  CHECK(d.sequenceLength == 20);
  CHECK(d.nEvals == 25);
  CHECK(d.shiftBuffer);
  CHECK_FALSE(d.mutationTransducer);
  CHECK(d.repeatProb == 0.2);
  CHECK(d.discountFactor == 0.8);
  CHECK(d.budgetIterations == 50);

  CHECK_THROWS(d.assign("bogus", "1"));
  d.assign("probMutation", "1.5");
  CHECK_THROWS(d.validate());
  CHECK_THROWS(d.assign("sequenceLength", "abc"));
  RheaConfig bad;
  bad.discountFactor = 0.0;
  CHECK_THROWS(bad.validate());
  bad = RheaConfig{};
  bad.sequenceLength = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("agent kind names") {
  for (AgentKind k : {AgentKind::Rhea, AgentKind::Random, AgentKind::Nothing}) {
    CHECK(parse_agent_kind(to_string(k)) == k);
    CHECK(make_agent(k, RheaConfig{}, 1)->name() == to_string(k));
  }
  CHECK_THROWS(parse_agent_kind("oracle"));
}
