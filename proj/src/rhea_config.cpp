#include <charconv>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "lifemodel/agents.hpp"

namespace lifemodel {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument(key + ": expected a number, got '" + value + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument(key + ": expected an integer, got '" + value + "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void RheaConfig::validate() const {
  auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!probability(probMutation)) throw std::invalid_argument("probMutation must lie in [0, 1]");
  if (!probability(repeatProb)) throw std::invalid_argument("repeatProb must lie in [0, 1]");
  if (sequenceLength < 1) throw std::invalid_argument("sequenceLength must be positive");
  if (nEvals < 1) throw std::invalid_argument("nEvals must be positive");
  if (!(discountFactor > 0.0 && discountFactor <= 1.0)) throw std::invalid_argument("discountFactor must lie in (0, 1]");
  if (budgetIterations < 0) throw std::invalid_argument("budgetIterations must be non-negative");
  if (!transducer_feasible()) {
    throw std::invalid_argument("mutation transducer needs repeatProb + probMutation <= 1");
  }
}

std::string RheaConfig::to_text() const {
  std::ostringstream out;
  out << "flipMinOneValue=" << (flipMinOneValue ? "true" : "false") << '\n'
      << "probMutation=" << format_double(probMutation) << '\n'
      << "sequenceLength=" << sequenceLength << '\n'
      << "nEvals=" << nEvals << '\n'
      << "shiftBuffer=" << (shiftBuffer ? "true" : "false") << '\n'
      << "mutationTransducer=" << (mutationTransducer ? "true" : "false") << '\n'
      << "repeatProb=" << format_double(repeatProb) << '\n'
      << "discountFactor=" << format_double(discountFactor) << '\n'
      << "budgetIterations=" << budgetIterations << '\n';
  return out.str();
}

void RheaConfig::assign(const std::string& key, const std::string& value) {
  if (key == "flipMinOneValue") {
    flipMinOneValue = parse_bool(key, value);
  } else if (key == "probMutation") {
    probMutation = parse_double(key, value);
  } else if (key == "sequenceLength") {
    sequenceLength = parse_int(key, value);
  } else if (key == "nEvals") {
    nEvals = parse_int(key, value);
  } else if (key == "shiftBuffer") {
    shiftBuffer = parse_bool(key, value);
  } else if (key == "mutationTransducer") {
    mutationTransducer = parse_bool(key, value);
  } else if (key == "repeatProb") {
    repeatProb = parse_double(key, value);
  } else if (key == "discountFactor") {
    discountFactor = parse_double(key, value);
  } else if (key == "budgetIterations") {
    budgetIterations = parse_int(key, value);
  } else {
    throw std::invalid_argument("unknown RHEA config key '" + key + "'");
  }
}

RheaConfig RheaConfig::from_text(std::istream& in) {
  RheaConfig config;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line without '=': '" + line + "'");
    config.assign(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

}  // namespace lifemodel
