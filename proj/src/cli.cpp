#include "lifemodel/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "lifemodel/experiments.hpp"

namespace lifemodel {

namespace {

struct SharedFlags {
  std::vector<std::string> rule{"gol"};
  int threshold = 4;
  int width = 30;
  int height = 30;
  std::string boundary = "torus";
  double density = 0.5;
  std::uint64_t seed = 1;
  CLI::Option* seed_option = nullptr;
  int ticks = 100;
  std::string out;
  int jobs = 0;
};

void add_shared(CLI::App* sub, SharedFlags& f) {
  sub->add_option("--rule", f.rule, "gol | cave | file PATH")->expected(1, 2);
  sub->add_option("--threshold", f.threshold, "cave generator threshold")->check(CLI::Range(0, 8));
  sub->add_option("--width", f.width, "grid width")->check(CLI::Range(3, 1 << 16));
  sub->add_option("--height", f.height, "grid height")->check(CLI::Range(3, 1 << 16));
  sub->add_option("--boundary", f.boundary, "torus | dead")->check(CLI::IsMember({"torus", "dead"}));
  sub->add_option("--density", f.density, "initial alive probability")->check(CLI::Range(0.0, 1.0));
  f.seed_option = sub->add_option("--seed", f.seed, "master seed (falls back to $LIFEMODEL_SEED, then 1)");
  sub->add_option("--ticks", f.ticks, "game ticks / simulation steps")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", f.out, "output file (default: standard output)");
  sub->add_option("--jobs", f.jobs, "worker threads (0 = OpenMP default, 1 = serial)")
      ->check(CLI::NonNegativeNumber);
}

std::uint64_t resolve_seed(const SharedFlags& f) {
  if (f.seed_option && f.seed_option->count() > 0) return f.seed;
  if (const char* env = std::getenv("LIFEMODEL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("LIFEMODEL_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return 1;
}

BuiltinRule builtin_rule(const SharedFlags& f) {
  const std::string& name = f.rule.front();
  if (name == "gol") return BuiltinRule::game_of_life();
  if (name == "cave") return BuiltinRule::cave(f.threshold);
  throw std::invalid_argument("unknown rule '" + name + "' (expected gol, cave or file PATH)");
}

ExperimentSpec base_spec(const SharedFlags& f) {
  ExperimentSpec spec;
  const std::string& name = f.rule.front();
  if (name == "file") {
    if (f.rule.size() != 2) throw std::invalid_argument("--rule file needs a PATH");
    spec.truth_override = load_rule_table_file(f.rule[1]);
  } else {
    if (f.rule.size() != 1) throw std::invalid_argument("--rule " + name + " takes no extra argument");
    spec.rule = builtin_rule(f);
  }
  spec.width = f.width;
  spec.height = f.height;
  spec.boundary = parse_boundary(f.boundary);
  spec.density = f.density;
  spec.horizon = f.ticks;
  spec.master_seed = resolve_seed(f);
  spec.parallel = f.jobs != 1;
  if (f.jobs > 0) omp_set_num_threads(f.jobs);
  return spec;
}

void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  write(file);
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

// RHEA flags: one string option per config key, applied on top of --config.
struct RheaFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
};

void add_rhea(CLI::App* sub, RheaFlags& r) {
  sub->add_option("--config", r.config_file, "RHEA config file (key=value lines)");
  for (const char* key : {"flipMinOneValue", "probMutation", "sequenceLength", "nEvals", "shiftBuffer",
                          "mutationTransducer", "repeatProb", "discountFactor", "budgetIterations"}) {
    sub->add_option(std::string("--") + key, r.values[key], std::string("RHEA ") + key);
  }
}

RheaConfig resolve_rhea(const RheaFlags& r) {
  RheaConfig config;
  if (!r.config_file.empty()) {
    std::ifstream in(r.config_file);
    if (!in) throw std::runtime_error("cannot open config file '" + r.config_file + "'");
    config = RheaConfig::from_text(in);
  }
  for (const auto& [key, value] : r.values) {
    if (!value.empty()) config.assign(key, value);
  }
  config.validate();
  return config;
}

int desk_scaled(int n, bool desk) { return desk ? std::max(1, n / 5) : n; }

void require_ticks(const SharedFlags& f) {
  if (f.ticks < 1) throw std::invalid_argument("--ticks must be at least 1 for games");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cellular-automaton games, local forward-model learning and RHEA planning", "lifemodel"};
  app.require_subcommand(1);

  // simulate
  SharedFlags sim_flags;
  sim_flags.ticks = 1;
  std::string sim_in;
  bool sim_trajectory = false;
  auto* sim = app.add_subcommand("simulate", "step the automaton without a player");
  add_shared(sim, sim_flags);
  sim->add_option("--in", sim_in, "start grid file (default: random start)");
  sim->add_flag("--trajectory", sim_trajectory, "write every grid from tick 0, not just the last");

  // play
  SharedFlags play_flags;
  RheaFlags play_rhea;
  std::string play_agent = "rhea";
  std::string play_model = "perfect";
  std::string play_objective = "max";
  int play_runs = 1;
  std::string play_in;
  auto* play = app.add_subcommand("play", "play episodes and write the trace CSV");
  add_shared(play, play_flags);
  add_rhea(play, play_rhea);
  play->add_option("--agent", play_agent, "rhea | random | nothing");
  auto* play_model_opt = play->add_option("--model", play_model, "perfect | degraded:K | online:exact|dtree|mlp");
  play->add_option("--objective", play_objective, "max | min");
  play->add_option("--runs", play_runs, "episodes")->check(CLI::PositiveNumber);
  play->add_option("--in", play_in, "start grid file for every run (default: random starts)");

  // learn
  SharedFlags learn_flags;
  std::string learn_learner = "exact";
  int learn_transitions = 20;
  std::string learn_dataset_out;
  auto* learn = app.add_subcommand("learn", "learn a table from observed true-rule transitions");
  add_shared(learn, learn_flags);
  learn->add_option("--learner", learn_learner, "exact | dtree | mlp");
  learn->add_option("--transitions", learn_transitions, "transitions from fresh random starts")
      ->check(CLI::NonNegativeNumber);
  learn->add_option("--dataset-out", learn_dataset_out, "also write the harvested dataset CSV");

  // compile
  SharedFlags compile_flags;
  std::string compile_dataset;
  std::string compile_learner = "exact";
  auto* compile = app.add_subcommand("compile", "fit a learner to a dataset CSV and write its truth table");
  add_shared(compile, compile_flags);
  compile->add_option("--dataset", compile_dataset, "dataset CSV (pattern_code,outcome,count)")->required();
  compile->add_option("--learner", compile_learner, "exact | dtree | mlp");

  // tune
  SharedFlags tune_flags;
  RheaFlags tune_rhea;
  int tune_known = kPatternCount;
  int tune_runs = 100;
  NtbeaOptions tune_ntbea;
  int tune_reevaluations = 5;
  bool tune_desk = false;
  std::string tune_log_prefix;
  auto* tune = app.add_subcommand("tune", "NTBEA-tune RHEA under a perfect or degraded model");
  add_shared(tune, tune_flags);
  add_rhea(tune, tune_rhea);
  tune->add_option("--known", tune_known, "known patterns of the agent model")->check(CLI::Range(0, kPatternCount));
  tune->add_option("--runs", tune_runs, "independent tuning runs")->check(CLI::PositiveNumber);
  tune->add_option("--budget", tune_ntbea.budget, "fitness evaluations per run")->check(CLI::PositiveNumber);
  tune->add_option("--k", tune_ntbea.k, "UCB exploration constant");
  tune->add_option("--epsilon", tune_ntbea.epsilon, "per-dimension neighbour mutation probability")
      ->check(CLI::Range(0.0, 1.0));
  tune->add_option("--neighbours", tune_ntbea.neighbourhood_size, "neighbourhood size")->check(CLI::PositiveNumber);
  tune->add_option("--reevaluations", tune_reevaluations, "episodes re-measuring each recommendation")
      ->check(CLI::NonNegativeNumber);
  tune->add_flag("--desk", tune_desk, "divide --runs by 5");
  tune->add_option("--log-prefix", tune_log_prefix, "write PREFIX_<known>_<run>.csv tuning logs");

  // experiment
  SharedFlags exp_flags;
  RheaFlags exp_rhea;
  std::string exp_which;
  bool exp_desk = false;
  int exp_repeats = 0;
  int exp_games = 0;
  std::vector<int> exp_known;
  std::vector<int> exp_errors;
  std::string exp_learner = "dtree";
  int exp_starts = 100;
  int exp_horizon = 30;
  int exp_runs = 100;
  std::string exp_marginals;
  auto* exp = app.add_subcommand("experiment", "run a batch experiment and write its CSV");
  add_shared(exp, exp_flags);
  add_rhea(exp, exp_rhea);
  exp->add_option("which", exp_which, "fig2 | fig3 | fig4 | fig5 | nstep")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "nstep"}));
  exp->add_flag("--desk", exp_desk, "divide repeats / runs by 5");
  exp->add_option("--repeats", exp_repeats, "independent models or seeds (0 = experiment default)")
      ->check(CLI::NonNegativeNumber);
  exp->add_option("--games", exp_games, "episodes per model (0 = experiment default)")->check(CLI::NonNegativeNumber);
  exp->add_option("--known", exp_known, "known-pattern counts (fig4, nstep)");
  exp->add_option("--errors", exp_errors, "truth-table error counts (fig2)");
  exp->add_option("--learner", exp_learner, "online learner (fig5)");
  exp->add_option("--starts", exp_starts, "start grids (nstep)")->check(CLI::PositiveNumber);
  exp->add_option("--horizon", exp_horizon, "prediction horizon (nstep)")->check(CLI::PositiveNumber);
  exp->add_option("--runs", exp_runs, "tuning runs per condition (fig3)")->check(CLI::PositiveNumber);
  exp->add_option("--marginals", exp_marginals, "per-parameter marginal counts CSV (fig3)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*sim) {
      const ExperimentSpec spec = base_spec(sim_flags);
      const RuleTable truth = spec.truth();
      Grid grid = sim_in.empty() ? start_state(spec, derive_seed(spec.master_seed, 0, kStartStream)).grid
                                 : load_grid_file(sim_in);
      emit(sim_flags.out, out, [&](std::ostream& os) {
        if (sim_trajectory) write_grid(os, grid);
        for (int t = 0; t < sim_flags.ticks; ++t) {
          grid = step_grid(grid, truth);
          if (sim_trajectory) write_grid(os, grid);
        }
        if (!sim_trajectory) write_grid(os, grid);
      });
    } else if (*play) {
      require_ticks(play_flags);
      ExperimentSpec spec = base_spec(play_flags);
      spec.agent = resolve_rhea(play_rhea);
      spec.objective = parse_objective(play_objective);
      spec.model = ModelSource::parse(play_model);
      if (!play_in.empty()) spec.start_grid = load_grid_file(play_in);
      const AgentKind agent_kind = parse_agent_kind(play_agent);
      if (agent_kind != AgentKind::Rhea && play_model_opt->count() > 0) {
        err << "warning: --model is ignored by the " << play_agent << " agent\n";
        spec.model = ModelSource{};
      }
      const RuleTable truth = spec.truth();
      std::vector<RunRecord> records(play_runs);
      for_each_run(play_runs, spec.parallel, [&](int run) {
        if (spec.model.kind == ModelSource::Kind::Online) {
          records[run] = online_learning_run(spec.model.learner, agent_kind, spec, run);
          return;
        }
        const RuleTable model = spec.model.kind == ModelSource::Kind::Degraded
                                    ? degraded_model(truth, spec.model.known, spec.master_seed, run)
                                    : truth;
        const GameState start = start_state(spec, derive_seed(spec.master_seed, run, kStartStream));
        auto agent = make_agent(agent_kind, spec.agent, derive_seed(spec.master_seed, run, kAgentStream));
        records[run] = play_recorded(start, *agent, model, truth, spec.horizon, run);
      });
      emit(play_flags.out, out, [&](std::ostream& os) {
        write_trace_header(os);
        for (const auto& r : records) write_trace_rows(os, r);
      });
    } else if (*learn) {
      const ExperimentSpec spec = base_spec(learn_flags);
      const RuleTable truth = spec.truth();
      const Dataset data = harvest_random_transitions(spec, truth, learn_transitions);
      auto learner = make_learner(parse_learner_kind(learn_learner), spec.master_seed);
      learner->observe(data);
      if (!data.empty()) learner->refit();
      const RuleTable table = compile_to_table(*learner);
      if (!learn_dataset_out.empty()) emit(learn_dataset_out, out, [&](std::ostream& os) { data.write_csv(os); });
      emit(learn_flags.out, out, [&](std::ostream& os) { write_rule_table(os, table); });
      err << "learned from " << learn_transitions << " transitions: " << data.unique_count()
          << " unique patterns, hamming " << hamming(table, truth) << " to the true rule\n";
    } else if (*compile) {
      const ExperimentSpec spec = base_spec(compile_flags);
      std::ifstream in(compile_dataset);
      if (!in) throw std::runtime_error("cannot open dataset '" + compile_dataset + "'");
      const Dataset data = Dataset::read_csv(in);
      auto learner = make_learner(parse_learner_kind(compile_learner), spec.master_seed);
      learner->observe(data);
      if (!data.empty()) learner->refit();
      const RuleTable table = compile_to_table(*learner);
      emit(compile_flags.out, out, [&](std::ostream& os) { write_rule_table(os, table); });
    } else if (*tune) {
      require_ticks(tune_flags);
      ExperimentSpec spec = base_spec(tune_flags);
      spec.agent = resolve_rhea(tune_rhea);
      TuningOptions options;
      options.ntbea = tune_ntbea;
      options.reevaluations = tune_reevaluations;
      const auto runs = tuning_experiment(tune_known, desk_scaled(tune_runs, tune_desk), spec, options);
      if (!tune_log_prefix.empty()) {
        for (const auto& r : runs) {
          emit(tune_log_prefix + "_" + std::to_string(r.known) + "_" + std::to_string(r.run) + ".csv", out,
               [&](std::ostream& os) { write_tuning_log(os, r.tuning, SearchSpace::rhea().dimensions()); });
        }
      }
      emit(tune_flags.out, out, [&](std::ostream& os) { write_fig3_csv(os, runs); });
    } else if (*exp) {
      ExperimentSpec spec = base_spec(exp_flags);
      spec.agent = resolve_rhea(exp_rhea);
      auto repeats_or = [&](int fallback) { return desk_scaled(exp_repeats > 0 ? exp_repeats : fallback, exp_desk); };
      const int games = exp_games;
      if (exp_which == "nstep") {
        const RuleTable truth = spec.truth();
        const int known = exp_known.empty() ? kPatternCount : exp_known.front();
        const RuleTable model = degraded_model(truth, known, spec.master_seed, 0);
        std::vector<Grid> starts;
        for (int i = 0; i < exp_starts; ++i) {
          starts.push_back(start_state(spec, derive_seed(spec.master_seed, i, kStartStream)).grid);
        }
        const NStepResult result = nstep_prediction_test(model, truth, starts, exp_horizon);
        emit(exp_flags.out, out, [&](std::ostream& os) { write_nstep_csv(os, result); });
      } else if (exp_which == "fig2") {
        require_ticks(exp_flags);
        spec.repeats = repeats_or(50);
        spec.games = games > 0 ? games : 1;
        const std::vector<BuiltinRule> rules = {BuiltinRule::game_of_life(), BuiltinRule::cave(exp_flags.threshold)};
        const std::vector<int> errors =
            exp_errors.empty() ? std::vector<int>{0, 1, 2, 4, 8, 16, 32, 64, 128} : exp_errors;
        const auto rows = error_sweep(spec, rules, errors);
        emit(exp_flags.out, out, [&](std::ostream& os) { write_fig2_csv(os, rows); });
      } else if (exp_which == "fig3") {
        require_ticks(exp_flags);
        TuningOptions options;
        const int runs = desk_scaled(exp_runs, exp_desk);
        auto all = tuning_experiment(kPatternCount, runs, spec, options);
        auto degraded = tuning_experiment(480, runs, spec, options);
        all.insert(all.end(), degraded.begin(), degraded.end());
        emit(exp_flags.out, out, [&](std::ostream& os) { write_fig3_csv(os, all); });
        if (!exp_marginals.empty()) {
          emit(exp_marginals, out, [&](std::ostream& os) { write_fig3_marginals_csv(os, all); });
        }
      } else if (exp_which == "fig4") {
        require_ticks(exp_flags);
        spec.repeats = repeats_or(50);
        spec.games = games > 0 ? games : 15;
        std::vector<int> known = exp_known;
        if (known.empty()) {
          for (int k = 0; k <= kPatternCount; k += 32) known.push_back(k);
        }
        const std::vector<AgentKind> agents = {AgentKind::Rhea, AgentKind::Random, AgentKind::Nothing};
        const auto cells = degradation_sweep(spec, known, agents);
        emit(exp_flags.out, out, [&](std::ostream& os) { write_fig4_csv(os, cells); });
      } else if (exp_which == "fig5") {
        require_ticks(exp_flags);
        spec.repeats = repeats_or(50);
        spec.games = games > 0 ? games : 1;
        const std::vector<AgentKind> agents = {AgentKind::Rhea, AgentKind::Random, AgentKind::Nothing};
        const auto cells = online_learning_experiment(parse_learner_kind(exp_learner), agents, spec);
        emit(exp_flags.out, out, [&](std::ostream& os) { write_fig5_csv(os, cells); });
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace lifemodel
