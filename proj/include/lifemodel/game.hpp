#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lifemodel/ca_core.hpp"
#include "lifemodel/random.hpp"

namespace lifemodel {

struct Action {
  enum class Kind { NoOp, Flip };

  Kind kind = Kind::NoOp;
  int x = -1;
  int y = -1;

  static Action noop() { return {}; }
  static Action flip(int x, int y) { return {Kind::Flip, x, y}; }

  bool is_noop() const { return kind == Kind::NoOp; }

  friend bool operator==(const Action&, const Action&) = default;
};

/// The W*H+1 legal actions of a grid, indexed 0 = NoOp, 1 + y*W + x = Flip(x, y).
struct ActionSpace {
  int width = 0;
  int height = 0;

  static ActionSpace of(const Grid& grid) { return {grid.width(), grid.height()}; }

  int size() const { return width * height + 1; }
  bool legal(const Action& a) const {
    return a.is_noop() || (a.x >= 0 && a.x < width && a.y >= 0 && a.y < height);
  }
  Action at(int index) const {
    if (index == 0) return Action::noop();
    --index;
    return Action::flip(index % width, index / width);
  }
  Action sample(Rng& rng) const { return at(uniform_int(rng, 0, size() - 1)); }
};

enum class Objective { Maximize, Minimize };

struct GameState {
  Grid grid;
  int tick = 0;
  Objective objective = Objective::Maximize;
};

struct EpisodeTrace {
  std::vector<int> scores;      // post-update alive count per tick
  std::vector<Action> actions;  // action taken at each tick
  std::vector<Grid> grids;      // post-update snapshots, only when requested
};

/// Applies a player action without advancing time. Throws std::invalid_argument on off-grid flips.
GameState apply_action(const GameState& state, const Action& action);

/// Action first, then one synchronous CA update through `table`.
GameState game_tick(const GameState& state, const Action& action, const RuleTable& table);

int score(const GameState& state);

/// Per-tick reward seen by agents: the score, negated under Minimize.
inline double signed_score(int alive, Objective objective) {
  return objective == Objective::Maximize ? alive : -alive;
}

Grid random_start(int width, int height, double density, Rng& rng, Boundary boundary = Boundary::Torus);

/// Acting policy. Agents may keep memory across ticks of one episode; reset() clears it.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual Action act(const GameState& state, const RuleTable& model) = 0;
  virtual void reset() {}
  virtual std::string_view name() const = 0;
};

/// Plays `steps` ticks. The agent sees only `agent_model`; the environment only `true_table`.
EpisodeTrace run_episode(const GameState& start, Agent& agent, const RuleTable& agent_model,
                         const RuleTable& true_table, int steps, bool record_grids = false);

// Episode trace CSV: run_id,tick,score,action_kind,action_x,action_y
struct TraceRow {
  int run_id = 0;
  int tick = 0;
  int score = 0;
  Action action;
};

void write_trace_header(std::ostream& out);
void write_trace_rows(std::ostream& out, int run_id, const EpisodeTrace& trace);
std::vector<TraceRow> read_trace_csv(std::istream& in);

std::string to_string(Objective objective);
Objective parse_objective(const std::string& text);

}  // namespace lifemodel
