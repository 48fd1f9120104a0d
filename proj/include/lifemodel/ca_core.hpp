#pragma once

#include <array>
#include <bit>
#include <bitset>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lifemodel {

enum class Boundary { Torus, DeadBorder };

/// Binary W x H lattice. Cells are stored row-major, one byte per cell (0/1).
class Grid {
 public:
  Grid(int width, int height, Boundary boundary = Boundary::Torus);

  int width() const { return width_; }
  int height() const { return height_; }
  Boundary boundary() const { return boundary_; }
  int cell_count() const { return width_ * height_; }

  std::uint8_t at(int x, int y) const { return cells_[index(x, y)]; }
  void set(int x, int y, std::uint8_t value);
  void flip(int x, int y) { cells_[index(x, y)] ^= 1; }
  bool contains(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

  int alive_count() const;

  std::span<const std::uint8_t> cells() const { return cells_; }
  std::span<std::uint8_t> cells() { return cells_; }
  std::span<const std::uint8_t> row(int y) const {
    return std::span<const std::uint8_t>(cells_).subspan(static_cast<std::size_t>(y) * width_, width_);
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_;
  int height_;
  Boundary boundary_;
  std::vector<std::uint8_t> cells_;
};

/// Cyclic translation: cell (x, y) of the input lands at (x+dx, y+dy) modulo the grid size.
Grid shift(const Grid& grid, int dx, int dy);

// 3x3 neighbourhood codes. Bit b holds the cell at row-major offset b of the
// block: bit 0 = top-left, bit 4 = centre, bit 8 = bottom-right.
using PatternCode = std::uint16_t;
inline constexpr int kPatternCount = 512;
inline constexpr int kCentreBit = 4;

using Block = std::array<std::uint8_t, 9>;

PatternCode encode_pattern(const Block& block);
Block decode_pattern(PatternCode code);

inline int centre_of(PatternCode code) { return (code >> kCentreBit) & 1; }
inline int neighbour_count(PatternCode code) {
  return std::popcount(static_cast<unsigned>(code)) - centre_of(code);
}

/// 3x3 block centred at (x, y). Off-grid reads wrap under Torus and read 0 under DeadBorder.
Block neighbourhood(const Grid& grid, int x, int y);

/// Sink for model-query instrumentation; a table with an attached counter
/// reports one query per cell it updates.
struct QueryCounter {
  std::int64_t queries = 0;
};

/// 512-entry truth table mapping a pattern code to the next centre state.
class RuleTable {
 public:
  RuleTable() { outputs_.fill(0); }

  std::uint8_t operator[](PatternCode code) const { return outputs_[code]; }
  void set(PatternCode code, std::uint8_t value);
  int ones() const;
  RuleTable complement() const;

  const std::array<std::uint8_t, kPatternCount>& outputs() const { return outputs_; }

  /// 512 characters '0'/'1', character i is the output for code i.
  std::string to_string() const;
  static RuleTable from_string(const std::string& bits);

  void attach_counter(QueryCounter* counter) { counter_ = counter; }
  QueryCounter* counter() const { return counter_; }

  friend bool operator==(const RuleTable& a, const RuleTable& b) { return a.outputs_ == b.outputs_; }

 private:
  std::array<std::uint8_t, kPatternCount> outputs_;
  QueryCounter* counter_ = nullptr;
};

enum class RuleKind { GameOfLife, CaveGenerator };

struct BuiltinRule {
  RuleKind kind = RuleKind::GameOfLife;
  int threshold = 4;  // cave generator only

  static BuiltinRule game_of_life() { return {RuleKind::GameOfLife, 4}; }
  static BuiltinRule cave(int threshold = 4) { return {RuleKind::CaveGenerator, threshold}; }
};

RuleTable rule_table_of(const BuiltinRule& rule);

int hamming(const RuleTable& a, const RuleTable& b);

/// Synchronous update of every cell through `table`.
///
/// Rows are processed in an OpenMP parallel loop once the grid has at least
/// `kParallelCellThreshold` cells; smaller grids (every grid the games use)
/// run on the calling thread.
Grid step_grid(const Grid& grid, const RuleTable& table);

/// Allocation-free variant for rollouts. `out` must have the input's shape.
/// Returns the alive count of the new grid.
int step_grid_into(const Grid& grid, const RuleTable& table, Grid& out);

/// Per-cell reference stepper: neighbourhood() -> encode_pattern() -> lookup.
/// Kept as the oracle for the fast kernel.
Grid step_grid_reference(const Grid& grid, const RuleTable& table);

inline constexpr int kParallelCellThreshold = 1 << 16;

// Text formats.
//
// Grid file: header "W H torus|dead", then H lines of W characters ('.' dead, '#' alive).
// Rule-table file: one line of 512 '0'/'1' characters.
void write_grid(std::ostream& out, const Grid& grid);
Grid read_grid(std::istream& in);
void write_rule_table(std::ostream& out, const RuleTable& table);
RuleTable read_rule_table(std::istream& in);

Grid load_grid_file(const std::string& path);
void save_grid_file(const std::string& path, const Grid& grid);
RuleTable load_rule_table_file(const std::string& path);
void save_rule_table_file(const std::string& path, const RuleTable& table);

std::string to_string(Boundary boundary);
Boundary parse_boundary(const std::string& text);

}  // namespace lifemodel
