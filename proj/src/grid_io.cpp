#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lifemodel/ca_core.hpp"

namespace lifemodel {

std::string to_string(Boundary boundary) {
  return boundary == Boundary::Torus ? "torus" : "dead";
}

Boundary parse_boundary(const std::string& text) {
  if (text == "torus") return Boundary::Torus;
  if (text == "dead") return Boundary::DeadBorder;
  throw std::invalid_argument("unknown boundary '" + text + "' (expected torus or dead)");
}

void write_grid(std::ostream& out, const Grid& grid) {
  out << grid.width() << ' ' << grid.height() << ' ' << to_string(grid.boundary()) << '\n';
  std::string line(grid.width(), '.');
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) line[x] = grid.at(x, y) ? '#' : '.';
    out << line << '\n';
  }
}

Grid read_grid(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("grid file: missing header line");
  std::istringstream hs(header);
  int width = 0;
  int height = 0;
  std::string boundary;
  if (!(hs >> width >> height >> boundary)) {
    throw std::runtime_error("grid file: malformed header '" + header + "' (expected \"W H torus|dead\")");
  }
  Grid grid = [&] {
    try {
      return Grid(width, height, parse_boundary(boundary));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("grid file: ") + e.what());
    }
  }();
  std::string line;
  for (int y = 0; y < height; ++y) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("grid file: expected " + std::to_string(height) + " rows, got " + std::to_string(y));
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != width) {
      throw std::runtime_error("grid file: row " + std::to_string(y) + " has " + std::to_string(line.size()) +
                               " characters, expected " + std::to_string(width));
    }
    for (int x = 0; x < width; ++x) {
      if (line[x] == '#') {
        grid.set(x, y, 1);
      } else if (line[x] != '.') {
        throw std::runtime_error("grid file: unexpected character '" + std::string(1, line[x]) + "' in row " +
                                 std::to_string(y));
      }
    }
  }
  return grid;
}

void write_rule_table(std::ostream& out, const RuleTable& table) {
  out << table.to_string() << '\n';
}

RuleTable read_rule_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("rule table file: empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  try {
    return RuleTable::from_string(line);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("rule table file: ") + e.what());
  }
}

Grid load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file '" + path + "'");
  return read_grid(in);
}

void save_grid_file(const std::string& path, const Grid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grid file '" + path + "'");
  write_grid(out, grid);
}

RuleTable load_rule_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rule table file '" + path + "'");
  return read_rule_table(in);
}

void save_rule_table_file(const std::string& path, const RuleTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write rule table file '" + path + "'");
  write_rule_table(out, table);
}

}  // namespace lifemodel
