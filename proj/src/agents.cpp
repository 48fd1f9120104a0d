#include "lifemodel/agents.hpp"

#include <algorithm>
#include <stdexcept>

namespace lifemodel {

ActionSequence random_sequence(const ActionSpace& space, int length, Rng& rng) {
  ActionSequence seq;
  seq.reserve(length);
  for (int i = 0; i < length; ++i) seq.push_back(space.sample(rng));
  return seq;
}

double evaluate_sequence(const GameState& state, std::span<const Action> seq, const RuleTable& model,
                         const RheaConfig& config) {
  Grid current = state.grid;
  Grid next = state.grid;
  double fitness = 0.0;
  double weight = 1.0;
  for (const Action& action : seq) {
    if (!action.is_noop()) current.flip(action.x, action.y);
    const int alive = step_grid_into(current, model, next);
    std::swap(current, next);
    fitness += weight * alive;
    weight *= config.discountFactor;
  }
  return state.objective == Objective::Maximize ? fitness : -fitness;
}

double averaged_fitness(const GameState& state, std::span<const Action> seq, const RuleTable& model,
                        const RheaConfig& config) {
  return evaluate_sequence(state, seq, model, config);
}

ActionSequence mutate_sequence(const ActionSequence& parent, const RheaConfig& config, const ActionSpace& space,
                               Rng& rng) {
  if (!config.transducer_feasible()) {
    throw std::invalid_argument("mutation transducer needs repeatProb + probMutation <= 1");
  }
  ActionSequence child;
  child.reserve(parent.size());
  for (std::size_t i = 0; i < parent.size(); ++i) {
    const double u = uniform01(rng);
    if (config.mutationTransducer) {
      if (u < config.repeatProb && i > 0) {
        child.push_back(child[i - 1]);
      } else if (u < config.repeatProb + config.probMutation) {
        child.push_back(space.sample(rng));
      } else {
        child.push_back(parent[i]);
      }
    } else {
      child.push_back(u < config.probMutation ? space.sample(rng) : parent[i]);
    }
  }
  if (config.flipMinOneValue && !child.empty() && child == parent) {
    const auto pos = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(child.size()) - 1));
    child[pos] = space.sample(rng);
  }
  return child;
}

ActionSequence shift_sequence(const ActionSequence& seq, const ActionSpace& space, Rng& rng) {
  ActionSequence out;
  out.reserve(seq.size());
  for (std::size_t i = 1; i < seq.size(); ++i) out.push_back(seq[i]);
  if (!seq.empty()) out.push_back(space.sample(rng));
  return out;
}

RheaAgent::RheaAgent(RheaConfig config, std::uint64_t seed) : config_(config), rng_(seed) {
  config_.validate();
}

Action RheaAgent::act(const GameState& state, const RuleTable& model) {
  const ActionSpace space = ActionSpace::of(state.grid);
  const int length = config_.sequenceLength;

  ActionSequence current;
  if (config_.shiftBuffer && survivor_ && static_cast<int>(survivor_->size()) == length &&
      std::all_of(survivor_->begin(), survivor_->end(), [&](const Action& a) { return space.legal(a); })) {
    current = shift_sequence(*survivor_, space, rng_);
  } else {
    current = random_sequence(space, length, rng_);
  }

  history_.clear();
  if (config_.budgetIterations > 0) {
    double fitness = averaged_fitness(state, current, model, config_);
    history_.push_back(fitness);
    for (int it = 0; it < config_.budgetIterations; ++it) {
      ActionSequence child = mutate_sequence(current, config_, space, rng_);
      const double child_fitness = averaged_fitness(state, child, model, config_);
      if (child_fitness >= fitness) {
        current = std::move(child);
        fitness = child_fitness;
      }
      history_.push_back(fitness);
    }
  }
  survivor_ = current;
  return current.front();
}

std::unique_ptr<Agent> make_agent(AgentKind kind, const RheaConfig& config, std::uint64_t seed) {
  switch (kind) {
    case AgentKind::Rhea:
      return std::make_unique<RheaAgent>(config, seed);
    case AgentKind::Random:
      return std::make_unique<RandomAgent>(seed);
    case AgentKind::Nothing:
      return std::make_unique<DoNothingAgent>();
  }
  throw std::invalid_argument("unknown agent kind");
}

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Rhea:
      return "rhea";
    case AgentKind::Random:
      return "random";
    case AgentKind::Nothing:
      return "nothing";
  }
  return "?";
}

AgentKind parse_agent_kind(const std::string& text) {
  if (text == "rhea") return AgentKind::Rhea;
  if (text == "random") return AgentKind::Random;
  if (text == "nothing" || text == "donothing") return AgentKind::Nothing;
  throw std::invalid_argument("unknown agent '" + text + "' (expected rhea, random or nothing)");
}

}  // namespace lifemodel
