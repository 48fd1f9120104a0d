#include "lifemodel/experiments.hpp"

#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "lifemodel/stats.hpp"

namespace lifemodel {

ModelSource ModelSource::parse(const std::string& text) {
  ModelSource m;
  if (text == "perfect") return m;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "degraded" && !tail.empty()) {
    m.kind = Kind::Degraded;
    try {
      m.known = std::stoi(tail);
    } catch (const std::exception&) {
      throw std::invalid_argument("degraded model needs an integer known count, got '" + tail + "'");
    }
    if (m.known < 0 || m.known > kPatternCount) throw std::invalid_argument("known count must lie in [0, 512]");
    return m;
  }
  if (head == "online" && !tail.empty()) {
    m.kind = Kind::Online;
    m.learner = parse_learner_kind(tail);
    return m;
  }
  throw std::invalid_argument("unknown model source '" + text + "' (expected perfect, degraded:K or online:KIND)");
}

std::string ModelSource::to_string() const {
  switch (kind) {
    case Kind::Perfect:
      return "perfect";
    case Kind::Degraded:
      return "degraded:" + std::to_string(known);
    case Kind::Online:
      return "online:" + lifemodel::to_string(learner);
  }
  return "?";
}

void for_each_run(int n, bool parallel, const std::function<void(int)>& body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic) if (parallel && n > 1)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

int cell_mismatches(const Grid& a, const Grid& b) {
  if (a.cell_count() != b.cell_count()) throw std::invalid_argument("cell_mismatches: grids differ in size");
  int diff = 0;
  const auto ca = a.cells();
  const auto cb = b.cells();
  for (std::size_t i = 0; i < ca.size(); ++i) diff += ca[i] != cb[i];
  return diff;
}

double supervised_error(const RuleTable& model, const RuleTable& truth, std::span<const Grid> test_grids) {
  if (test_grids.empty()) throw std::invalid_argument("supervised_error needs at least one test grid");
  double mismatches = 0.0;
  double cells = 0.0;
  for (const Grid& g : test_grids) {
    mismatches += cell_mismatches(step_grid(g, model), step_grid(g, truth));
    cells += g.cell_count();
  }
  return mismatches / cells;
}

std::vector<double> NStepResult::step_mean() const {
  std::vector<double> out;
  for (int t = 1; t <= horizon(); ++t) out.push_back(mean(at(t)));
  return out;
}

std::vector<double> NStepResult::step_sd() const {
  std::vector<double> out;
  for (int t = 1; t <= horizon(); ++t) out.push_back(stddev(at(t)));
  return out;
}

std::vector<double> NStepResult::at(int t) const {
  if (t < 1 || t > horizon()) throw std::out_of_range("n-step index out of range");
  std::vector<double> out;
  for (const auto& row : errors) out.push_back(row[t - 1]);
  return out;
}

std::vector<double> NStepResult::cumulative(int t) const {
  if (t < 1 || t > horizon()) throw std::out_of_range("n-step index out of range");
  std::vector<double> out;
  for (const auto& row : errors) {
    double sum = 0.0;
    for (int s = 0; s < t; ++s) sum += row[s];
    out.push_back(sum);
  }
  return out;
}

NStepResult nstep_prediction_test(const RuleTable& model, const RuleTable& truth, std::span<const Grid> starts,
                                  int horizon) {
  if (horizon < 1) throw std::invalid_argument("n-step horizon must be at least 1");
  NStepResult result;
  for (const Grid& start : starts) {
    Grid predicted = start;
    Grid actual = start;
    Grid scratch = start;
    std::vector<int> row;
    row.reserve(horizon);
    for (int t = 0; t < horizon; ++t) {
      step_grid_into(predicted, model, scratch);
      std::swap(predicted, scratch);
      step_grid_into(actual, truth, scratch);
      std::swap(actual, scratch);
      row.push_back(cell_mismatches(predicted, actual));
    }
    result.errors.push_back(std::move(row));
  }
  return result;
}

RunRecord play_recorded(const GameState& start, Agent& agent, const RuleTable& model, const RuleTable& truth,
                        int steps, int run_id) {
  if (steps < 1) throw std::invalid_argument("episode needs at least one step");
  RunRecord record;
  record.run_id = run_id;
  record.table_error = hamming(model, truth);
  agent.reset();
  GameState state = start;
  Grid predicted = start.grid;
  for (int t = 0; t < steps; ++t) {
    const Action action = agent.act(state, model);
    GameState acted = apply_action(state, action);
    GameState next{step_grid(acted.grid, truth), state.tick + 1, state.objective};
    step_grid_into(acted.grid, model, predicted);
    record.prediction_errors.push_back(cell_mismatches(predicted, next.grid));
    record.scores.push_back(score(next));
    record.actions.push_back(action);
    state = std::move(next);
  }
  return record;
}

GameState start_state(const ExperimentSpec& spec, std::uint64_t seed) {
  if (spec.start_grid) return GameState{*spec.start_grid, 0, spec.objective};
  Rng rng(seed);
  return GameState{random_start(spec.width, spec.height, spec.density, rng, spec.boundary), 0, spec.objective};
}

// ---------------------------------------------------------------------------

RuleTable degraded_model(const RuleTable& truth, int known, std::uint64_t master_seed, int repeat) {
  Rng rng(derive_seed(derive_seed(master_seed, static_cast<std::uint64_t>(known), kModelStream),
                      static_cast<std::uint64_t>(repeat)));
  return degrade_table(truth, known, 0, rng).table;
}

Dataset harvest_random_transitions(const ExperimentSpec& spec, const RuleTable& truth, int count) {
  if (count < 0) throw std::invalid_argument("transition count must be non-negative");
  Dataset data;
  for (int i = 0; i < count; ++i) {
    const GameState s = start_state(spec, derive_seed(spec.master_seed, static_cast<std::uint64_t>(i), kStartStream));
    data.merge(harvest_transitions(s.grid, step_grid(s.grid, truth)));
  }
  return data;
}

void write_trace_rows(std::ostream& out, const RunRecord& record) {
  EpisodeTrace trace;
  trace.scores = record.scores;
  trace.actions = record.actions;
  write_trace_rows(out, record.run_id, trace);
}

namespace {

std::vector<double> per_tick(const std::vector<RunRecord>& runs, int tick, std::vector<int> RunRecord::*field) {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back((r.*field)[tick]);
  return out;
}

}  // namespace

std::vector<SweepCell> degradation_sweep(const ExperimentSpec& spec, std::span<const int> known_values,
                                         std::span<const AgentKind> agents) {
  const RuleTable truth = spec.truth();
  const int per_cell = spec.repeats * spec.games;
  std::vector<SweepCell> cells;
  for (int known : known_values) {
    if (known < 0 || known > kPatternCount) throw std::invalid_argument("known count must lie in [0, 512]");
    for (AgentKind agent : agents) cells.push_back({known, agent, std::vector<RunRecord>(per_cell)});
  }

  // One degraded table per (known, repeat), shared by every agent and game.
  std::vector<RuleTable> models(known_values.size() * spec.repeats);
  for (std::size_t k = 0; k < known_values.size(); ++k) {
    for (int r = 0; r < spec.repeats; ++r) {
      models[k * spec.repeats + r] = degraded_model(truth, known_values[k], spec.master_seed, r);
    }
  }

  const int tasks = static_cast<int>(cells.size()) * per_cell;
  for_each_run(tasks, spec.parallel, [&](int task) {
    const int c = task / per_cell;
    const int run = task % per_cell;
    const int repeat = run / spec.games;
    const std::size_t k = static_cast<std::size_t>(c) / agents.size();
    const RuleTable& model = models[k * spec.repeats + repeat];
    const GameState start = start_state(spec, derive_seed(spec.master_seed, run, kStartStream));
    auto agent = make_agent(cells[c].agent, spec.agent, derive_seed(spec.master_seed, run, kAgentStream));
    cells[c].runs[run] = play_recorded(start, *agent, model, truth, spec.horizon, run);
  });
  return cells;
}

void write_fig4_csv(std::ostream& out, std::span<const SweepCell> cells) {
  out << "known,tick,agent,score_mean,score_sd,prederr_mean,prederr_sd,score_lo,score_hi,prederr_lo,prederr_hi\n";
  for (const auto& cell : cells) {
    if (cell.runs.empty()) continue;
    const int ticks = static_cast<int>(cell.runs.front().scores.size());
    for (int t = 0; t < ticks; ++t) {
      const auto s = per_tick(cell.runs, t, &RunRecord::scores);
      const auto e = per_tick(cell.runs, t, &RunRecord::prediction_errors);
      const double sm = mean(s), ss = stddev(s), em = mean(e), es = stddev(e);
      out << cell.known << ',' << t + 1 << ',' << to_string(cell.agent) << ',' << sm << ',' << ss << ',' << em << ','
          << es << ',' << sm - 1.5 * ss << ',' << sm + 1.5 * ss << ',' << em - 1.5 * es << ',' << em + 1.5 * es
          << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<ErrorSweepRow> error_sweep(const ExperimentSpec& spec, std::span<const BuiltinRule> rules,
                                       std::span<const int> error_values, int prediction_tick) {
  const int per_row = spec.repeats * spec.games;
  std::vector<ErrorSweepRow> rows;
  std::vector<RuleTable> truths;
  for (const auto& rule : rules) {
    truths.push_back(rule_table_of(rule));
    for (int e : error_values) {
      if (e < 0 || e > kPatternCount) throw std::invalid_argument("error count must lie in [0, 512]");
      ErrorSweepRow row;
      row.rule = rule.kind == RuleKind::GameOfLife ? "gol" : "cave";
      row.errors = e;
      row.scores.resize(per_row);
      row.pred_at.resize(per_row);
      row.pred_cum.resize(per_row);
      rows.push_back(std::move(row));
    }
  }

  std::vector<RuleTable> models(rows.size() * spec.repeats);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const RuleTable& truth = truths[i / error_values.size()];
    for (int r = 0; r < spec.repeats; ++r) {
      Rng rng(derive_seed(derive_seed(spec.master_seed, static_cast<std::uint64_t>(rows[i].errors), kModelStream),
                          static_cast<std::uint64_t>(r)));
      models[i * spec.repeats + r] = perturb_table(truth, rows[i].errors, rng);
    }
  }

  const int tasks = static_cast<int>(rows.size()) * per_row;
  for_each_run(tasks, spec.parallel, [&](int task) {
    const std::size_t i = static_cast<std::size_t>(task / per_row);
    const int run = task % per_row;
    const RuleTable& truth = truths[i / error_values.size()];
    const RuleTable& model = models[i * spec.repeats + run / spec.games];
    const GameState start = start_state(spec, derive_seed(spec.master_seed, run, kStartStream));
    RheaAgent agent(spec.agent, derive_seed(spec.master_seed, run, kAgentStream));
    const EpisodeTrace trace = run_episode(start, agent, model, truth, spec.horizon);
    rows[i].scores[run] = trace.scores.back();
    const Grid starts[] = {start.grid};
    const NStepResult n = nstep_prediction_test(model, truth, starts, prediction_tick);
    rows[i].pred_at[run] = n.at(prediction_tick).front();
    rows[i].pred_cum[run] = n.cumulative(prediction_tick).front();
  });
  return rows;
}

void write_fig2_csv(std::ostream& out, std::span<const ErrorSweepRow> rows) {
  out << "rule,errors,score_mean,score_sd,pred5_mean,pred5_sd,pred5_cum_mean,pred5_cum_sd\n";
  for (const auto& r : rows) {
    out << r.rule << ',' << r.errors << ',' << mean(r.scores) << ',' << stddev(r.scores) << ',' << mean(r.pred_at)
        << ',' << stddev(r.pred_at) << ',' << mean(r.pred_cum) << ',' << stddev(r.pred_cum) << '\n';
  }
}

// ---------------------------------------------------------------------------

RunRecord online_learning_run(LearnerKind learner_kind, AgentKind agent_kind, const ExperimentSpec& spec,
                              int run_id) {
  const RuleTable truth = spec.truth();
  auto learner = make_learner(learner_kind, derive_seed(spec.master_seed, run_id, kLearnerStream));
  ExactLearner shadow;
  auto agent = make_agent(agent_kind, spec.agent, derive_seed(spec.master_seed, run_id, kAgentStream));

  RunRecord record;
  record.run_id = run_id;
  GameState state = start_state(spec, derive_seed(spec.master_seed, run_id, kStartStream));
  RuleTable model = compile_to_table(*learner);
  Grid predicted = state.grid;
  for (int t = 0; t < spec.horizon; ++t) {
    const Action action = agent->act(state, model);
    GameState acted = apply_action(state, action);
    GameState next{step_grid(acted.grid, truth), state.tick + 1, state.objective};
    step_grid_into(acted.grid, model, predicted);
    record.prediction_errors.push_back(cell_mismatches(predicted, next.grid));
    record.scores.push_back(score(next));
    record.actions.push_back(action);

    const Dataset observed = harvest_transitions(acted.grid, next.grid);
    learner->observe(observed);
    learner->refit();
    shadow.observe(observed);

    model = compile_to_table(*learner);
    record.observed.push_back(learner->training_set().unique_count());
    record.correct.push_back(correct_patterns(model, truth));
    record.exact_correct.push_back(correct_patterns(compile_to_table(shadow), truth));
    state = std::move(next);
  }
  record.table_error = hamming(model, truth);
  return record;
}

std::vector<OnlineCell> online_learning_experiment(LearnerKind learner, std::span<const AgentKind> agents,
                                                   const ExperimentSpec& spec) {
  const int per_cell = spec.repeats * spec.games;
  std::vector<OnlineCell> cells;
  for (AgentKind a : agents) cells.push_back({a, std::vector<RunRecord>(per_cell)});
  for_each_run(static_cast<int>(cells.size()) * per_cell, spec.parallel, [&](int task) {
    const int c = task / per_cell;
    const int run = task % per_cell;
    cells[c].runs[run] = online_learning_run(learner, cells[c].agent, spec, run);
  });
  return cells;
}

void write_fig5_csv(std::ostream& out, std::span<const OnlineCell> cells) {
  out << "tick,agent,score_mean,score_sd,observed_mean,correct_mean\n";
  for (const auto& cell : cells) {
    if (cell.runs.empty()) continue;
    const int ticks = static_cast<int>(cell.runs.front().scores.size());
    for (int t = 0; t < ticks; ++t) {
      const auto s = per_tick(cell.runs, t, &RunRecord::scores);
      out << t + 1 << ',' << to_string(cell.agent) << ',' << mean(s) << ',' << stddev(s) << ','
          << mean(per_tick(cell.runs, t, &RunRecord::observed)) << ','
          << mean(per_tick(cell.runs, t, &RunRecord::correct)) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

double tuning_episode_fitness(const ExperimentSpec& spec, const RheaConfig& config, const RuleTable& model,
                              const RuleTable& truth, std::uint64_t seed) {
  if (!config.transducer_feasible()) return 0.0;
  const GameState start = start_state(spec, derive_seed(seed, 0, kStartStream));
  RheaAgent agent(config, derive_seed(seed, 0, kAgentStream));
  const EpisodeTrace trace = run_episode(start, agent, model, truth, spec.horizon);
  return signed_score(trace.scores.back(), spec.objective);
}

std::vector<TuningRun> tuning_experiment(int known, int runs, const ExperimentSpec& spec,
                                         const TuningOptions& options) {
  if (runs < 1) throw std::invalid_argument("tuning experiment needs at least one run");
  const RuleTable truth = spec.truth();
  const SearchSpace space = SearchSpace::rhea();
  std::vector<TuningRun> out(runs);

  for_each_run(runs, spec.parallel, [&](int r) {
    TuningRun& run = out[r];
    run.known = known;
    run.run = r;
    const RuleTable model = degraded_model(truth, known, spec.master_seed, r);
    const std::uint64_t run_seed = derive_seed(spec.master_seed, static_cast<std::uint64_t>(r), kTunerStream);

    int calls = 0;
    const FitnessFunction fitness = [&](const ConfigPoint& p) {
      const RheaConfig config = to_rhea_config(space, p, spec.agent.budgetIterations);
      const double f = tuning_episode_fitness(spec, config, model, truth, derive_seed(run_seed, calls, 0));
      ++calls;
      return f;
    };
    Rng rng(derive_seed(run_seed, static_cast<std::uint64_t>(known), kTunerStream));
    run.tuning = ntbea_tune(space, fitness, options.ntbea, rng);
    run.recommended = run.tuning.best;
    run.fitness_calls = calls;

    const RheaConfig best = to_rhea_config(space, run.recommended, spec.agent.budgetIterations);
    std::vector<double> scores;
    for (int j = 0; j < options.reevaluations; ++j) {
      scores.push_back(tuning_episode_fitness(spec, best, model, truth, derive_seed(run_seed, j, 1)));
    }
    run.fitness = mean(scores);
    run.episodes = calls + options.reevaluations;
  });
  return out;
}

void write_fig3_csv(std::ostream& out, std::span<const TuningRun> runs) {
  const SearchSpace space = SearchSpace::rhea();
  out << "condition,run,fitness";
  for (int d = 0; d < space.dimensions(); ++d) out << ",phi" << d;
  out << '\n';
  for (const auto& r : runs) {
    out << r.known << ',' << r.run << ',' << r.fitness;
    for (int d = 0; d < space.dimensions(); ++d) out << ',' << space.dimension(d).values[r.recommended[d]];
    out << '\n';
  }
}

void write_fig3_marginals_csv(std::ostream& out, std::span<const TuningRun> runs) {
  const SearchSpace space = SearchSpace::rhea();
  std::map<int, std::vector<std::vector<int>>> counts;  // condition -> dim -> value index -> count
  for (const auto& r : runs) {
    auto& c = counts[r.known];
    if (c.empty()) {
      for (int d = 0; d < space.dimensions(); ++d) c.emplace_back(space.value_count(d), 0);
    }
    for (int d = 0; d < space.dimensions(); ++d) ++c[d][r.recommended[d]];
  }
  out << "condition,parameter,value,count\n";
  for (const auto& [known, dims] : counts) {
    for (int d = 0; d < space.dimensions(); ++d) {
      for (int v = 0; v < space.value_count(d); ++v) {
        out << known << ',' << space.dimension(d).name << ',' << space.dimension(d).values[v] << ',' << dims[d][v]
            << '\n';
      }
    }
  }
}

void write_nstep_csv(std::ostream& out, const NStepResult& result) {
  out << "step,errors_mean,errors_sd\n";
  const auto m = result.step_mean();
  const auto s = result.step_sd();
  for (std::size_t t = 0; t < m.size(); ++t) out << t + 1 << ',' << m[t] << ',' << s[t] << '\n';
}

}  // namespace lifemodel
