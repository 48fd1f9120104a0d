#include "lifemodel/game.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lifemodel {

GameState apply_action(const GameState& state, const Action& action) {
  GameState next = state;
  if (action.is_noop()) return next;
  if (!state.grid.contains(action.x, action.y)) {
    throw std::invalid_argument("invalid action: flip (" + std::to_string(action.x) + "," +
                                std::to_string(action.y) + ") outside the grid");
  }
  next.grid.flip(action.x, action.y);
  return next;
}

GameState game_tick(const GameState& state, const Action& action, const RuleTable& table) {
  GameState acted = apply_action(state, action);
  GameState next{step_grid(acted.grid, table), state.tick + 1, state.objective};
  return next;
}

int score(const GameState& state) { return state.grid.alive_count(); }

Grid random_start(int width, int height, double density, Rng& rng, Boundary boundary) {
  if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in [0, 1]");
  Grid grid(width, height, boundary);
  std::bernoulli_distribution alive(density);
  for (auto& cell : grid.cells()) cell = alive(rng) ? 1 : 0;
  return grid;
}

EpisodeTrace run_episode(const GameState& start, Agent& agent, const RuleTable& agent_model,
                         const RuleTable& true_table, int steps, bool record_grids) {
  if (steps < 1) throw std::invalid_argument("episode needs at least one step");
  EpisodeTrace trace;
  trace.scores.reserve(steps);
  trace.actions.reserve(steps);
  agent.reset();
  GameState state = start;
  for (int t = 0; t < steps; ++t) {
    const Action action = agent.act(state, agent_model);
    state = game_tick(state, action, true_table);
    trace.actions.push_back(action);
    trace.scores.push_back(score(state));
    if (record_grids) trace.grids.push_back(state.grid);
  }
  return trace;
}

void write_trace_header(std::ostream& out) {
  out << "run_id,tick,score,action_kind,action_x,action_y\n";
}

void write_trace_rows(std::ostream& out, int run_id, const EpisodeTrace& trace) {
  for (std::size_t t = 0; t < trace.scores.size(); ++t) {
    const Action& a = trace.actions[t];
    out << run_id << ',' << t + 1 << ',' << trace.scores[t] << ',' << (a.is_noop() ? "noop" : "flip") << ','
        << a.x << ',' << a.y << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::vector<TraceRow> rows;
  std::string line;
  if (!std::getline(in, line) || line != "run_id,tick,score,action_kind,action_x,action_y") {
    throw std::runtime_error("trace csv: missing or unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw std::runtime_error("trace csv: expected 6 columns in '" + line + "'");
    TraceRow row;
    row.run_id = std::stoi(fields[0]);
    row.tick = std::stoi(fields[1]);
    row.score = std::stoi(fields[2]);
    if (fields[3] == "noop") {
      row.action = Action::noop();
    } else if (fields[3] == "flip") {
      row.action = Action::flip(std::stoi(fields[4]), std::stoi(fields[5]));
    } else {
      throw std::runtime_error("trace csv: unknown action kind '" + fields[3] + "'");
    }
    rows.push_back(row);
  }
  return rows;
}

std::string to_string(Objective objective) {
  return objective == Objective::Maximize ? "max" : "min";
}

Objective parse_objective(const std::string& text) {
  if (text == "max" || text == "maximize") return Objective::Maximize;
  if (text == "min" || text == "minimize") return Objective::Minimize;
  throw std::invalid_argument("unknown objective '" + text + "' (expected max or min)");
}

}  // namespace lifemodel
