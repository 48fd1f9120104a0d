#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lifemodel/agents.hpp"
#include "lifemodel/learners.hpp"
#include "lifemodel/ntbea.hpp"

namespace lifemodel {

/// Where the acting agent's forward model comes from.
struct ModelSource {
  enum class Kind { Perfect, Degraded, Online };

  Kind kind = Kind::Perfect;
  int known = kPatternCount;                     // Degraded only
  LearnerKind learner = LearnerKind::Exact;      // Online only

  /// "perfect", "degraded:K" or "online:exact|dtree|mlp".
  static ModelSource parse(const std::string& text);
  std::string to_string() const;
};

struct ExperimentSpec {
  BuiltinRule rule = BuiltinRule::game_of_life();
  int width = 30;
  int height = 30;
  Boundary boundary = Boundary::Torus;
  double density = 0.5;
  int horizon = 100;
  int repeats = 1;  // independent models (or seeds)
  int games = 1;    // episodes per model
  std::uint64_t master_seed = 1;
  RheaConfig agent;
  ModelSource model;
  Objective objective = Objective::Maximize;
  /// Fan runs out over OpenMP threads. Output is identical either way.
  bool parallel = true;
  /// Replaces the builtin rule's table as the environment's true rule.
  std::optional<RuleTable> truth_override;
  /// Every run starts from this grid instead of a random one.
  std::optional<Grid> start_grid;

  RuleTable truth() const { return truth_override ? *truth_override : rule_table_of(rule); }
};

/// Seed streams drawn from (master seed, run index).
enum SeedStream : std::uint64_t {
  kStartStream = 1,
  kModelStream = 2,
  kAgentStream = 3,
  kLearnerStream = 4,
  kTunerStream = 5,
};

struct RunRecord {
  int run_id = 0;
  std::vector<int> scores;             // post-update alive count per tick
  std::vector<Action> actions;         // action taken per tick
  std::vector<int> prediction_errors;  // cells where the agent model's one-step prediction was wrong
  std::vector<int> observed;           // unique patterns observed so far (online runs)
  std::vector<int> correct;            // codes the learner's table gets right (online runs)
  std::vector<int> exact_correct;      // same, for an exact learner fed the same stream
  int table_error = 0;                 // final Hamming error of the agent model
};

/// Runs `body(i)` for i in [0, n), over OpenMP threads when `parallel`.
/// The first exception thrown by any run is rethrown after the loop.
void for_each_run(int n, bool parallel, const std::function<void(int)>& body);

int cell_mismatches(const Grid& a, const Grid& b);

/// Mean per-cell disagreement of one-step predictions over `test_grids`, in [0, 1].
double supervised_error(const RuleTable& model, const RuleTable& truth, std::span<const Grid> test_grids);

struct NStepResult {
  std::vector<std::vector<int>> errors;  // [start][step], step 0 = after the first update

  int horizon() const { return errors.empty() ? 0 : static_cast<int>(errors.front().size()); }
  std::vector<double> step_mean() const;
  std::vector<double> step_sd() const;
  /// Mismatch at step t (1-based) of every start.
  std::vector<double> at(int t) const;
  /// Mismatches summed over steps 1..t of every start.
  std::vector<double> cumulative(int t) const;
};

/// Free-running (NoOp) trajectories of `model` and `truth` from shared starts, never re-synchronised.
NStepResult nstep_prediction_test(const RuleTable& model, const RuleTable& truth, std::span<const Grid> starts,
                                  int horizon);

/// One recorded episode with per-tick one-step prediction errors of `model`.
RunRecord play_recorded(const GameState& start, Agent& agent, const RuleTable& model, const RuleTable& truth,
                        int steps, int run_id);

GameState start_state(const ExperimentSpec& spec, std::uint64_t seed);

/// Degraded table (fallback 0) for repeat `repeat` of a known-count condition.
RuleTable degraded_model(const RuleTable& truth, int known, std::uint64_t master_seed, int repeat);

/// `count` transitions of `truth`, each from a fresh random start of the spec's shape and density.
Dataset harvest_random_transitions(const ExperimentSpec& spec, const RuleTable& truth, int count);

/// Episode trace CSV rows for a recorded run.
void write_trace_rows(std::ostream& out, const RunRecord& record);

// ---------------------------------------------------------------------------
// Degradation sweep (known-pattern count -> score and prediction error).

struct SweepCell {
  int known = 0;
  AgentKind agent = AgentKind::Rhea;
  std::vector<RunRecord> runs;  // repeats * games, ordered by run_id
};

/// For each known count: `repeats` degraded tables, `games` episodes each, for every agent.
/// Start grids and agent seeds depend only on (repeat, game), so known counts and agents
/// are compared on common starts.
std::vector<SweepCell> degradation_sweep(const ExperimentSpec& spec, std::span<const int> known_values,
                                         std::span<const AgentKind> agents);

/// known,tick,agent,score_mean,score_sd,prederr_mean,prederr_sd plus +-1.5 sd band columns.
void write_fig4_csv(std::ostream& out, std::span<const SweepCell> cells);

// ---------------------------------------------------------------------------
// Truth-table errors -> score and 5-tick prediction error, for several rules.

struct ErrorSweepRow {
  std::string rule;
  int errors = 0;
  std::vector<double> scores;      // final score per run
  std::vector<double> pred_at;     // mismatch at the prediction tick per run
  std::vector<double> pred_cum;    // cumulative mismatch up to the prediction tick per run
};

std::vector<ErrorSweepRow> error_sweep(const ExperimentSpec& spec, std::span<const BuiltinRule> rules,
                                       std::span<const int> error_values, int prediction_tick = 5);

/// rule,errors,score_mean,score_sd,pred5_mean,pred5_sd,pred5_cum_mean,pred5_cum_sd
void write_fig2_csv(std::ostream& out, std::span<const ErrorSweepRow> rows);

// ---------------------------------------------------------------------------
// Online learning (a new model every tick).

RunRecord online_learning_run(LearnerKind learner, AgentKind agent, const ExperimentSpec& spec, int run_id);

struct OnlineCell {
  AgentKind agent = AgentKind::Rhea;
  std::vector<RunRecord> runs;
};

std::vector<OnlineCell> online_learning_experiment(LearnerKind learner, std::span<const AgentKind> agents,
                                                   const ExperimentSpec& spec);

/// tick,agent,score_mean,score_sd,observed_mean,correct_mean
void write_fig5_csv(std::ostream& out, std::span<const OnlineCell> cells);

// ---------------------------------------------------------------------------
// RHEA hyper-parameter tuning under a perfect or degraded model.

struct TuningOptions {
  NtbeaOptions ntbea;
  int reevaluations = 5;  // episodes used to re-measure the recommended configuration
};

struct TuningRun {
  int known = kPatternCount;
  int run = 0;
  ConfigPoint recommended;
  double fitness = 0.0;  // mean final score of the recommendation over the re-evaluation episodes
  TuningResult tuning;
  int fitness_calls = 0;
  int episodes = 0;
};

/// Final alive count of one episode played by RHEA with `config` under `model`.
/// A transducer configuration whose probabilities sum past 1 scores 0.
double tuning_episode_fitness(const ExperimentSpec& spec, const RheaConfig& config, const RuleTable& model,
                              const RuleTable& truth, std::uint64_t seed);

std::vector<TuningRun> tuning_experiment(int known, int runs, const ExperimentSpec& spec,
                                         const TuningOptions& options);

/// condition,run,fitness,phi0..phi7 (parameter values, booleans as 0/1)
void write_fig3_csv(std::ostream& out, std::span<const TuningRun> runs);
/// condition,parameter,value,count
void write_fig3_marginals_csv(std::ostream& out, std::span<const TuningRun> runs);

/// step,errors_mean,errors_sd
void write_nstep_csv(std::ostream& out, const NStepResult& result);

}  // namespace lifemodel
