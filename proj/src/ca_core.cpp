#include "lifemodel/ca_core.hpp"

#include <numeric>
#include <stdexcept>

namespace lifemodel {

Grid::Grid(int width, int height, Boundary boundary)
    : width_(width), height_(height), boundary_(boundary) {
  if (width < 3 || height < 3) {
    throw std::invalid_argument("grid must be at least 3x3, got " + std::to_string(width) + "x" +
                                std::to_string(height));
  }
  cells_.assign(static_cast<std::size_t>(width) * height, 0);
}

void Grid::set(int x, int y, std::uint8_t value) {
  if (value > 1) throw std::invalid_argument("cell value must be 0 or 1");
  cells_[index(x, y)] = value;
}

int Grid::alive_count() const {
  return std::accumulate(cells_.begin(), cells_.end(), 0);
}

Grid shift(const Grid& grid, int dx, int dy) {
  Grid out(grid.width(), grid.height(), grid.boundary());
  const int w = grid.width();
  const int h = grid.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int nx = ((x + dx) % w + w) % w;
      const int ny = ((y + dy) % h + h) % h;
      out.set(nx, ny, grid.at(x, y));
    }
  }
  return out;
}

PatternCode encode_pattern(const Block& block) {
  PatternCode code = 0;
  for (int b = 0; b < 9; ++b) {
    if (block[b] > 1) throw std::invalid_argument("pattern block entries must be 0 or 1");
    code |= static_cast<PatternCode>(block[b] << b);
  }
  return code;
}

Block decode_pattern(PatternCode code) {
  if (code >= kPatternCount) throw std::invalid_argument("pattern code out of range");
  Block block{};
  for (int b = 0; b < 9; ++b) block[b] = (code >> b) & 1;
  return block;
}

Block neighbourhood(const Grid& grid, int x, int y) {
  if (!grid.contains(x, y)) {
    throw std::invalid_argument("neighbourhood centre (" + std::to_string(x) + "," + std::to_string(y) +
                                ") outside grid");
  }
  const int w = grid.width();
  const int h = grid.height();
  const bool torus = grid.boundary() == Boundary::Torus;
  Block block{};
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      int nx = x + dx;
      int ny = y + dy;
      std::uint8_t value = 0;
      if (torus) {
        nx = (nx + w) % w;
        ny = (ny + h) % h;
        value = grid.at(nx, ny);
      } else if (grid.contains(nx, ny)) {
        value = grid.at(nx, ny);
      }
      block[(dy + 1) * 3 + (dx + 1)] = value;
    }
  }
  return block;
}

void RuleTable::set(PatternCode code, std::uint8_t value) {
  if (code >= kPatternCount) throw std::invalid_argument("pattern code out of range");
  if (value > 1) throw std::invalid_argument("rule output must be 0 or 1");
  outputs_[code] = value;
}

int RuleTable::ones() const {
  return std::accumulate(outputs_.begin(), outputs_.end(), 0);
}

RuleTable RuleTable::complement() const {
  RuleTable out;
  for (int c = 0; c < kPatternCount; ++c) out.outputs_[c] = outputs_[c] ^ 1;
  return out;
}

std::string RuleTable::to_string() const {
  std::string bits(kPatternCount, '0');
  for (int c = 0; c < kPatternCount; ++c) bits[c] = outputs_[c] ? '1' : '0';
  return bits;
}

RuleTable RuleTable::from_string(const std::string& bits) {
  if (bits.size() != kPatternCount) {
    throw std::invalid_argument("rule table needs exactly 512 characters, got " + std::to_string(bits.size()));
  }
  RuleTable table;
  for (int c = 0; c < kPatternCount; ++c) {
    if (bits[c] != '0' && bits[c] != '1') {
      throw std::invalid_argument("rule table character " + std::to_string(c) + " is not '0' or '1'");
    }
    table.outputs_[c] = bits[c] == '1';
  }
  return table;
}

RuleTable rule_table_of(const BuiltinRule& rule) {
  if (rule.kind == RuleKind::CaveGenerator && (rule.threshold < 0 || rule.threshold > 8)) {
    throw std::invalid_argument("cave threshold must lie in [0, 8]");
  }
  RuleTable table;
  for (int c = 0; c < kPatternCount; ++c) {
    const auto code = static_cast<PatternCode>(c);
    const int alive = centre_of(code);
    const int n = neighbour_count(code);
    bool next = false;
    switch (rule.kind) {
      case RuleKind::GameOfLife:
        next = alive ? (n == 2 || n == 3) : (n == 3);
        break;
      case RuleKind::CaveGenerator:
        next = n > rule.threshold;
        break;
    }
    table.set(code, next ? 1 : 0);
  }
  return table;
}

int hamming(const RuleTable& a, const RuleTable& b) {
  int diff = 0;
  for (int c = 0; c < kPatternCount; ++c) diff += a.outputs()[c] != b.outputs()[c];
  return diff;
}

namespace {

// Updates one output row. Each column of the 3-row window packs to bits {0,3,6};
// the code of cell x is col[x-1] | col[x] << 1 | col[x+1] << 2.
int step_row(const Grid& grid, const std::uint8_t* lut, const std::uint8_t* zeros, int y, std::uint8_t* dst) {
  const int w = grid.width();
  const int h = grid.height();
  const bool torus = grid.boundary() == Boundary::Torus;
  const std::uint8_t* base = grid.cells().data();

  auto row_ptr = [&](int r) -> const std::uint8_t* {
    if (r < 0 || r >= h) {
      if (!torus) return zeros;
      r = (r + h) % h;
    }
    return base + static_cast<std::size_t>(r) * w;
  };
  const std::uint8_t* __restrict up = row_ptr(y - 1);
  const std::uint8_t* __restrict mid = row_ptr(y);
  const std::uint8_t* __restrict down = row_ptr(y + 1);

  constexpr int kStackColumns = 1024;
  std::uint16_t stack_cols[kStackColumns + 2];
  std::vector<std::uint16_t> heap_cols(w > kStackColumns ? static_cast<std::size_t>(w) + 2 : 0);
  std::uint16_t* __restrict col = (w > kStackColumns ? heap_cols.data() : stack_cols) + 1;
  auto pack = [&](int i) { return static_cast<std::uint16_t>(up[i] | (mid[i] << 3) | (down[i] << 6)); };
  for (int i = 0; i < w; ++i) col[i] = pack(i);
  col[-1] = torus ? pack(w - 1) : 0;
  col[w] = torus ? pack(0) : 0;

  int alive = 0;
  for (int x = 0; x < w; ++x) {
    const std::uint8_t v = lut[col[x - 1] | (col[x] << 1) | (col[x + 1] << 2)];
    dst[x] = v;
    alive += v;
  }
  return alive;
}

}  // namespace

int step_grid_into(const Grid& grid, const RuleTable& table, Grid& out) {
  if (out.width() != grid.width() || out.height() != grid.height() || out.boundary() != grid.boundary()) {
    out = Grid(grid.width(), grid.height(), grid.boundary());
  }
  const int w = grid.width();
  const int h = grid.height();
  const std::vector<std::uint8_t> zeros(grid.boundary() == Boundary::DeadBorder ? w : 0, 0);
  const std::uint8_t* lut = table.outputs().data();
  std::uint8_t* dst = out.cells().data();

  int alive = 0;
  if (grid.cell_count() >= kParallelCellThreshold) {
#pragma omp parallel for reduction(+ : alive) schedule(static)
    for (int y = 0; y < h; ++y) {
      alive += step_row(grid, lut, zeros.data(), y, dst + static_cast<std::size_t>(y) * w);
    }
  } else {
    for (int y = 0; y < h; ++y) {
      alive += step_row(grid, lut, zeros.data(), y, dst + static_cast<std::size_t>(y) * w);
    }
  }

  if (QueryCounter* counter = table.counter()) {
#pragma omp atomic
    counter->queries += grid.cell_count();
  }
  return alive;
}

Grid step_grid(const Grid& grid, const RuleTable& table) {
  Grid out(grid.width(), grid.height(), grid.boundary());
  step_grid_into(grid, table, out);
  return out;
}

Grid step_grid_reference(const Grid& grid, const RuleTable& table) {
  Grid out(grid.width(), grid.height(), grid.boundary());
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      out.set(x, y, table[encode_pattern(neighbourhood(grid, x, y))]);
    }
  }
  if (QueryCounter* counter = table.counter()) {
#pragma omp atomic
    counter->queries += grid.cell_count();
  }
  return out;
}

}  // namespace lifemodel
