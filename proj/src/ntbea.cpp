#include "lifemodel/ntbea.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lifemodel {

SearchSpace::SearchSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("search space needs at least one dimension");
  for (const auto& d : dims_) {
    if (d.values.empty()) throw std::invalid_argument("dimension '" + d.name + "' has no values");
  }
}

SearchSpace SearchSpace::rhea() {
  return SearchSpace({
      {"flipMinOneValue", {0, 1}},
      {"probMutation", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}},
      {"sequenceLength", {1, 3, 5, 10, 20}},
      {"nEvals", {1, 3, 5, 10, 25}},
      {"shiftBuffer", {0, 1}},
      {"mutationTransducer", {0, 1}},
      {"repeatProb", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}},
      {"discountFactor", {0.999, 0.99, 0.9, 0.8}},
  });
}

std::uint64_t SearchSpace::size() const {
  std::uint64_t n = 1;
  for (const auto& d : dims_) n *= d.values.size();
  return n;
}

bool contains(const SearchSpace& space, const ConfigPoint& point) {
  if (static_cast<int>(point.size()) != space.dimensions()) return false;
  for (int d = 0; d < space.dimensions(); ++d) {
    if (point[d] < 0 || point[d] >= space.value_count(d)) return false;
  }
  return true;
}

ConfigPoint random_point(const SearchSpace& space, Rng& rng) {
  ConfigPoint p(space.dimensions());
  for (int d = 0; d < space.dimensions(); ++d) p[d] = uniform_int(rng, 0, space.value_count(d) - 1);
  return p;
}

RheaConfig to_rhea_config(const SearchSpace& space, const ConfigPoint& point, int budget_iterations) {
  if (space.dimensions() != 8 || !contains(space, point)) {
    throw std::invalid_argument("point does not belong to the RHEA search space");
  }
  auto v = [&](int d) { return space.dimension(d).values[point[d]]; };
  RheaConfig c;
  c.flipMinOneValue = v(0) != 0;
  c.probMutation = v(1);
  c.sequenceLength = static_cast<int>(v(2));
  c.nEvals = static_cast<int>(v(3));
  c.shiftBuffer = v(4) != 0;
  c.mutationTransducer = v(5) != 0;
  c.repeatProb = v(6);
  c.discountFactor = v(7);
  c.budgetIterations = budget_iterations;
  return c;
}

TupleStats::TupleStats(const SearchSpace& space) {
  const int dims = space.dimensions();
  for (int d = 0; d < dims; ++d) radix_.push_back(space.value_count(d));
  for (int d = 0; d < dims; ++d) tuples_.push_back({d});
  for (int a = 0; a < dims; ++a) {
    for (int b = a + 1; b < dims; ++b) tuples_.push_back({a, b});
  }
  std::vector<int> all(dims);
  for (int d = 0; d < dims; ++d) all[d] = d;
  if (dims > 2) tuples_.push_back(all);
  tables_.resize(tuples_.size());
}

std::uint64_t TupleStats::key(int t, const ConfigPoint& point) const {
  std::uint64_t k = 0;
  for (int d : tuples_[t]) k = k * static_cast<std::uint64_t>(radix_[d]) + static_cast<std::uint64_t>(point[d]);
  return k;
}

void TupleStats::update(const ConfigPoint& point, double fitness) {
  for (int t = 0; t < tuple_count(); ++t) {
    Entry& e = tables_[t][key(t, point)];
    ++e.n;
    e.mean += (fitness - e.mean) / static_cast<double>(e.n);
  }
  ++total_;
}

TupleStats::Entry TupleStats::lookup(int t, const ConfigPoint& point) const {
  const auto it = tables_[t].find(key(t, point));
  return it == tables_[t].end() ? Entry{} : it->second;
}

std::int64_t TupleStats::count_sum(int t) const {
  std::int64_t sum = 0;
  for (const auto& [k, e] : tables_[t]) sum += e.n;
  return sum;
}

double ucb_estimate(const TupleStats& stats, const ConfigPoint& point, double k) {
  const double log_total = std::log(1.0 + static_cast<double>(stats.total()));
  double sum = 0.0;
  for (int t = 0; t < stats.tuple_count(); ++t) {
    const auto e = stats.lookup(t, point);
    sum += e.mean + k * std::sqrt(log_total / (1.0 + static_cast<double>(e.n)));
  }
  return sum / stats.tuple_count();
}

namespace {

int other_value(int current, int count, Rng& rng) {
  const int draw = uniform_int(rng, 0, count - 2);
  return draw >= current ? draw + 1 : draw;
}

}  // namespace

std::vector<ConfigPoint> neighbours(const ConfigPoint& point, const SearchSpace& space, double epsilon, int count,
                                    Rng& rng) {
  if (count < 1) throw std::invalid_argument("neighbourhood size must be at least 1");
  std::vector<int> mutable_dims;
  for (int d = 0; d < space.dimensions(); ++d) {
    if (space.value_count(d) > 1) mutable_dims.push_back(d);
  }
  if (mutable_dims.empty()) throw std::invalid_argument("search space has a single point");

  std::vector<ConfigPoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    ConfigPoint p = point;
    bool changed = false;
    for (int d : mutable_dims) {
      if (uniform01(rng) < epsilon) {
        p[d] = other_value(point[d], space.value_count(d), rng);
        changed = true;
      }
    }
    if (!changed) {
      const int d = mutable_dims[uniform_int(rng, 0, static_cast<int>(mutable_dims.size()) - 1)];
      p[d] = other_value(point[d], space.value_count(d), rng);
    }
    out.push_back(std::move(p));
  }
  return out;
}

TuningResult ntbea_tune(const SearchSpace& space, const FitnessFunction& fitness, const NtbeaOptions& options,
                        Rng& rng) {
  if (options.budget < 1) throw std::invalid_argument("tuning budget must be at least 1");
  TupleStats stats(space);
  TuningResult result;
  std::vector<ConfigPoint> evaluated;  // distinct points, first-evaluated order

  ConfigPoint current = random_point(space, rng);
  for (int i = 0; i < options.budget; ++i) {
    const double f = fitness(current);
    stats.update(current, f);
    result.log.push_back({current, f});
    if (std::find(evaluated.begin(), evaluated.end(), current) == evaluated.end()) evaluated.push_back(current);

    ConfigPoint next = current;
    double best_ucb = ucb_estimate(stats, current, options.k);
    for (auto& candidate : neighbours(current, space, options.epsilon, options.neighbourhood_size, rng)) {
      const double u = ucb_estimate(stats, candidate, options.k);
      if (u > best_ucb) {
        best_ucb = u;
        next = std::move(candidate);
      }
    }
    current = std::move(next);
  }

  bool first = true;
  for (const auto& p : evaluated) {
    const auto e = stats.full(p);
    if (first || e.mean > result.best_mean || (e.mean == result.best_mean && e.n > result.best_count)) {
      result.best = p;
      result.best_mean = e.mean;
      result.best_count = e.n;
      first = false;
    }
  }
  return result;
}

void write_tuning_log(std::ostream& out, const TuningResult& result, int dimensions) {
  out << "eval_index";
  for (int d = 0; d < dimensions; ++d) out << ",dim" << d;
  out << ",fitness\n";
  for (std::size_t i = 0; i < result.log.size(); ++i) {
    out << i;
    for (int v : result.log[i].point) out << ',' << v;
    out << ',' << result.log[i].fitness << '\n';
  }
  out << "best";
  for (int v : result.best) out << ',' << v;
  out << ',' << result.best_mean << '\n';
}

}  // namespace lifemodel
