#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lifemodel/game.hpp"

namespace lifemodel {

/// RHEA hyper-parameters. Field names follow the flat key=value format
/// (`probMutation=0.3`); defaults are the tuned configuration.
struct RheaConfig {
  bool flipMinOneValue = true;
  double probMutation = 0.3;
  int sequenceLength = 20;
  int nEvals = 25;
  bool shiftBuffer = true;
  bool mutationTransducer = false;
  double repeatProb = 0.2;
  double discountFactor = 0.8;
  int budgetIterations = 50;

  /// Throws std::invalid_argument when a field is out of range or the
  /// transducer probabilities sum past 1.
  void validate() const;
  bool transducer_feasible() const { return !mutationTransducer || repeatProb + probMutation <= 1.0 + 1e-12; }

  std::string to_text() const;
  static RheaConfig from_text(std::istream& in);
  /// Applies one `key=value` assignment; throws on unknown keys or bad values.
  void assign(const std::string& key, const std::string& value);

  friend bool operator==(const RheaConfig&, const RheaConfig&) = default;
};

using ActionSequence = std::vector<Action>;

ActionSequence random_sequence(const ActionSpace& space, int length, Rng& rng);

/// Discounted sum of post-update scores along a model rollout, negated under Minimize.
/// The caller's state is not touched.
double evaluate_sequence(const GameState& state, std::span<const Action> seq, const RuleTable& model,
                         const RheaConfig& config);

/// Mean of `config.nEvals` evaluations. A rule table is deterministic, so every
/// repetition returns the same value; the rollout runs once and that value is the mean.
double averaged_fitness(const GameState& state, std::span<const Action> seq, const RuleTable& model,
                        const RheaConfig& config);

ActionSequence mutate_sequence(const ActionSequence& parent, const RheaConfig& config, const ActionSpace& space,
                               Rng& rng);

/// Drops the first action and appends a fresh random one.
ActionSequence shift_sequence(const ActionSequence& seq, const ActionSpace& space, Rng& rng);

/// (1+1)-EA rolling horizon agent.
class RheaAgent final : public Agent {
 public:
  RheaAgent(RheaConfig config, std::uint64_t seed);

  Action act(const GameState& state, const RuleTable& model) override;
  void reset() override { survivor_.reset(); }
  std::string_view name() const override { return "rhea"; }

  const RheaConfig& config() const { return config_; }
  /// Incumbent fitness after each iteration of the last act() call (first entry = initial sequence).
  const std::vector<double>& incumbent_history() const { return history_; }
  const std::optional<ActionSequence>& survivor() const { return survivor_; }

 private:
  RheaConfig config_;
  Rng rng_;
  std::optional<ActionSequence> survivor_;
  std::vector<double> history_;
};

class RandomAgent final : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}
  Action act(const GameState& state, const RuleTable&) override { return random_act(state, rng_); }
  std::string_view name() const override { return "random"; }

  static Action random_act(const GameState& state, Rng& rng) { return ActionSpace::of(state.grid).sample(rng); }

 private:
  Rng rng_;
};

class DoNothingAgent final : public Agent {
 public:
  Action act(const GameState&, const RuleTable&) override { return Action::noop(); }
  std::string_view name() const override { return "nothing"; }
};

enum class AgentKind { Rhea, Random, Nothing };

std::unique_ptr<Agent> make_agent(AgentKind kind, const RheaConfig& config, std::uint64_t seed);
std::string to_string(AgentKind kind);
AgentKind parse_agent_kind(const std::string& text);

}  // namespace lifemodel
