// Randomized invariants, kCases draws each.
#include <algorithm>
#include <tuple>

#include "doctest.h"
#include "lifemodel/experiments.hpp"
#include "oracles.hpp"

using namespace lifemodel;

namespace {

constexpr int kCases = 1000;

RuleTable random_table(Rng& rng) {
  RuleTable t;
  for (int c = 0; c < kPatternCount; ++c) t.set(static_cast<PatternCode>(c), uniform01(rng) < 0.5);
  return t;
}

Grid random_grid(Rng& rng, int max_side = 12) {
  const int w = uniform_int(rng, 3, max_side);
  const int h = uniform_int(rng, 3, max_side);
  return random_start(w, h, uniform01(rng), rng, uniform01(rng) < 0.5 ? Boundary::Torus : Boundary::DeadBorder);
}

RheaConfig random_config(Rng& rng) {
  RheaConfig c;
  c.flipMinOneValue = uniform01(rng) < 0.5;
  c.probMutation = uniform01(rng);
  c.sequenceLength = uniform_int(rng, 1, 8);
  c.nEvals = uniform_int(rng, 1, 5);
  c.shiftBuffer = uniform01(rng) < 0.5;
  c.mutationTransducer = uniform01(rng) < 0.5;
  c.repeatProb = uniform01(rng) * (1.0 - c.probMutation);
  c.discountFactor = 0.5 + 0.5 * uniform01(rng);
  c.budgetIterations = uniform_int(rng, 0, 6);
  return c;
}

}  // namespace

TEST_CASE("property: fast kernel equals the reference kernel") {
  Rng rng(101);
  for (int i = 0; i < kCases; ++i) {
    const Grid g = random_grid(rng, 24);
    const RuleTable t = random_table(rng);
    Grid out(3, 3);
    const int alive = step_grid_into(g, t, out);
    REQUIRE(out == step_grid_reference(g, t));
    REQUIRE(alive == out.alive_count());
  }
}

TEST_CASE("property: builtin tables equal direct neighbour counting") {
  Rng rng(102);
  const RuleTable life = rule_table_of(BuiltinRule::game_of_life());
  for (int i = 0; i < kCases; ++i) {
    const Grid g = random_grid(rng);
    const int t = uniform_int(rng, 0, 8);
    REQUIRE(step_grid(g, life) == oracle::step_life(g));
    REQUIRE(step_grid(g, rule_table_of(BuiltinRule::cave(t))) == oracle::step_cave(g, t));
  }
}

TEST_CASE("property: stepping commutes with torus translation") {
  Rng rng(103);
  for (int i = 0; i < kCases; ++i) {
    const Grid g = random_start(8, 8, uniform01(rng), rng);
    const RuleTable t = random_table(rng);
    const int dx = uniform_int(rng, -20, 20);
    const int dy = uniform_int(rng, -20, 20);
    REQUIRE(step_grid(shift(g, dx, dy), t) == shift(step_grid(g, t), dx, dy));
  }
}

TEST_CASE("property: compiled tables simulate like their learners") {
  Rng rng(104);
  const RuleTable life = rule_table_of(BuiltinRule::game_of_life());
  std::vector<std::unique_ptr<Learner>> learners;
  for (int k = 0; k < 30; ++k) {
    auto l = make_learner(static_cast<LearnerKind>(k % 3), static_cast<std::uint64_t>(k) + 1);
    const RuleTable truth = k % 2 ? life : random_table(rng);
    const int samples = uniform_int(rng, 1, 400);
    for (int s = 0; s < samples; ++s) {
      const auto c = static_cast<PatternCode>(uniform_int(rng, 0, kPatternCount - 1));
      l->observe({c, truth[c]});
    }
    l->refit();
    learners.push_back(std::move(l));
  }
  for (int i = 0; i < kCases; ++i) {
    const Learner& l = *learners[i % learners.size()];
    const Grid g = random_grid(rng);
    Grid direct(g.width(), g.height(), g.boundary());
    for (int y = 0; y < g.height(); ++y)
      for (int x = 0; x < g.width(); ++x) direct.set(x, y, l.predict(encode_pattern(neighbourhood(g, x, y))));
    REQUIRE(step_grid(g, compile_to_table(l)) == direct);
  }
}

TEST_CASE("property: learners reproduce every observed sample") {
  Rng rng(105);
  for (int i = 0; i < kCases; ++i) {
    const RuleTable truth = random_table(rng);
    // The MLP is costly to fit on arbitrary tables; it gets every tenth case.
    const LearnerKind kind = i % 10 == 0 ? LearnerKind::Mlp : (i % 2 ? LearnerKind::Exact : LearnerKind::DecisionTree);
    auto l = make_learner(kind, static_cast<std::uint64_t>(i));
    const int samples = uniform_int(rng, 1, kind == LearnerKind::Mlp ? 12 : 200);
    std::vector<PatternCode> seen;
    for (int s = 0; s < samples; ++s) {
      const auto c = static_cast<PatternCode>(uniform_int(rng, 0, kPatternCount - 1));
      l->observe({c, truth[c]});
      seen.push_back(c);
    }
    l->refit();
    for (PatternCode c : seen) REQUIRE(l->predict(c) == truth[c]);
  }
}

TEST_CASE("property: decision tree predicts at least as many codes as it has seen") {
  Rng rng(106);
  const RuleTable life = rule_table_of(BuiltinRule::game_of_life());
  for (int i = 0; i < kCases; ++i) {
    DecisionTree tree;
    const int samples = uniform_int(rng, 1, 600);
    for (int s = 0; s < samples; ++s) {
      const auto c = static_cast<PatternCode>(uniform_int(rng, 0, kPatternCount - 1));
      tree.observe({c, life[c]});
    }
    tree.refit();
    REQUIRE(tree.depth() <= 9);
    REQUIRE(correct_patterns(compile_to_table(tree), life) >= tree.training_set().unique_count());
  }
}

TEST_CASE("property: mutation and shift keep sequences legal and fixed-length") {
  Rng rng(107);
  for (int i = 0; i < kCases; ++i) {
    const RheaConfig c = random_config(rng);
    const ActionSpace space{uniform_int(rng, 3, 30), uniform_int(rng, 3, 30)};
    const ActionSequence parent = random_sequence(space, c.sequenceLength, rng);
    const ActionSequence child = mutate_sequence(parent, c, space, rng);
    const ActionSequence shifted = shift_sequence(parent, space, rng);
    REQUIRE(child.size() == parent.size());
    REQUIRE(shifted.size() == parent.size());
    REQUIRE(std::all_of(child.begin(), child.end(), [&](const Action& a) { return space.legal(a); }));
    REQUIRE(std::all_of(shifted.begin(), shifted.end(), [&](const Action& a) { return space.legal(a); }));
    REQUIRE(std::equal(parent.begin() + 1, parent.end(), shifted.begin()));
  }
}

TEST_CASE("property: rhea planning uses exactly its budget of model queries") {
  // Rollouts run once per candidate (the nEvals mean of a pure evaluation):
  // (budget + 1) candidates of L steps over W*H cells, none with budget 0.
  Rng rng(108);
  const RuleTable life = rule_table_of(BuiltinRule::game_of_life());
  for (int i = 0; i < kCases; ++i) {
    const RheaConfig c = random_config(rng);
    const GameState s{random_grid(rng, 8), 0, uniform01(rng) < 0.5 ? Objective::Maximize : Objective::Minimize};
    RuleTable model = life;
    QueryCounter q;
    model.attach_counter(&q);
    RheaAgent agent(c, static_cast<std::uint64_t>(i));
    agent.act(s, model);
    const std::int64_t candidates = c.budgetIterations > 0 ? c.budgetIterations + 1 : 0;
    REQUIRE(q.queries == candidates * c.sequenceLength * s.grid.cell_count());
    REQUIRE(agent.incumbent_history().size() == static_cast<std::size_t>(candidates));
  }
}

TEST_CASE("property: ntbea spends exactly its budget") {
  Rng rng(109);
  const SearchSpace space = SearchSpace::rhea();
  for (int i = 0; i < kCases; ++i) {
    NtbeaOptions o;
    o.budget = uniform_int(rng, 1, 12);
    o.neighbourhood_size = uniform_int(rng, 1, 10);
    o.epsilon = uniform01(rng);
    o.k = 300 * uniform01(rng);
    int calls = 0;
    Rng noise(static_cast<std::uint64_t>(i));
    const TuningResult r = ntbea_tune(
        space,
        [&](const ConfigPoint& p) {
          ++calls;
          return p[0] + uniform01(noise);
        },
        o, rng);
    REQUIRE(calls == o.budget);
    REQUIRE(std::any_of(r.log.begin(), r.log.end(), [&](const auto& e) { return e.point == r.best; }));
  }
}

TEST_CASE("property: tuple statistics stay consistent") {
  Rng rng(110);
  const SearchSpace space = SearchSpace::rhea();
  TupleStats stats(space);
  for (int i = 0; i < kCases; ++i) {
    stats.update(random_point(space, rng), uniform01(rng));
    if (i % 100 == 99) {
      for (int t = 0; t < stats.tuple_count(); ++t) REQUIRE(stats.count_sum(t) == stats.total());
    }
  }
  REQUIRE(stats.total() == kCases);
}

TEST_CASE("property: repeated evaluation has the single-evaluation mean") {
  Rng rng(111);
  const RuleTable life = rule_table_of(BuiltinRule::game_of_life());
  for (int i = 0; i < kCases; ++i) {
    RheaConfig c = random_config(rng);
    const GameState s{random_grid(rng, 8), 0, Objective::Maximize};
    const ActionSequence seq = random_sequence(ActionSpace::of(s.grid), c.sequenceLength, rng);
    const Grid before = s.grid;
    const double one = evaluate_sequence(s, seq, life, c);
    REQUIRE(evaluate_sequence(s, seq, life, c) == one);
    REQUIRE(averaged_fitness(s, seq, life, c) == one);
    REQUIRE(s.grid == before);
  }
}

TEST_CASE("property: seeded pipelines are deterministic") {
  Rng meta(112);
  const RuleTable life = rule_table_of(BuiltinRule::game_of_life());
  for (int i = 0; i < kCases; ++i) {
    const std::uint64_t seed = meta();
    const RheaConfig c = random_config(meta);
    auto pipeline = [&] {
      Rng rng(seed);
      const Grid g = random_start(8, 8, 0.5, rng);
      const RuleTable model = degrade_table(life, uniform_int(rng, 0, 512), 0, rng).table;
      const RuleTable noisy = perturb_table(life, uniform_int(rng, 0, 40), rng);
      RheaAgent agent(c, seed);
      const GameState s{g, 0, Objective::Maximize};
      const EpisodeTrace t = run_episode(s, agent, model, noisy, 3);
      return std::make_tuple(g, model, noisy, t.scores, t.actions);
    };
    REQUIRE(pipeline() == pipeline());
  }
}

TEST_CASE("property: degraded and perturbed tables keep their error bounds") {
  Rng rng(113);
  const RuleTable life = rule_table_of(BuiltinRule::game_of_life());
  for (int i = 0; i < kCases; ++i) {
    const int known = uniform_int(rng, 0, 512);
    const DegradedTable d = degrade_table(life, known, 0, rng);
    REQUIRE(static_cast<int>(d.known.count()) == known);
    REQUIRE(hamming(d.table, life) <= std::min(512 - known, life.ones()));
    const int e = uniform_int(rng, 0, 512);
    REQUIRE(hamming(perturb_table(life, e, rng), life) == e);
  }
}

TEST_CASE("property: episodes keep scores within the grid") {
  Rng rng(114);
  const RuleTable life = rule_table_of(BuiltinRule::game_of_life());
  for (int i = 0; i < kCases; ++i) {
    const GameState s{random_grid(rng, 10), 0, Objective::Maximize};
    RandomAgent agent(static_cast<std::uint64_t>(i));
    const int steps = uniform_int(rng, 1, 10);
    const EpisodeTrace t = run_episode(s, agent, life, life, steps);
    REQUIRE(t.scores.size() == static_cast<std::size_t>(steps));
    for (int v : t.scores) REQUIRE((v >= 0 && v <= s.grid.cell_count()));
  }
}
