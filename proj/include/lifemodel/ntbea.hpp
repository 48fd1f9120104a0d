#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "lifemodel/agents.hpp"
#include "lifemodel/random.hpp"

namespace lifemodel {

struct Dimension {
  std::string name;
  std::vector<double> values;
};

class SearchSpace {
 public:
  explicit SearchSpace(std::vector<Dimension> dims);

  /// The eight RHEA hyper-parameters with their legal values, in phi0..phi7 order.
  static SearchSpace rhea();

  int dimensions() const { return static_cast<int>(dims_.size()); }
  const Dimension& dimension(int d) const { return dims_[d]; }
  int value_count(int d) const { return static_cast<int>(dims_[d].values.size()); }
  std::uint64_t size() const;

 private:
  std::vector<Dimension> dims_;
};

/// One value index per dimension.
using ConfigPoint = std::vector<int>;

bool contains(const SearchSpace& space, const ConfigPoint& point);
ConfigPoint random_point(const SearchSpace& space, Rng& rng);

/// Concrete RHEA configuration for a point of SearchSpace::rhea().
RheaConfig to_rhea_config(const SearchSpace& space, const ConfigPoint& point, int budget_iterations);

/// Bandit statistics over all 1-tuples, all 2-tuples and the full tuple of dimensions.
class TupleStats {
 public:
  struct Entry {
    std::int64_t n = 0;
    double mean = 0.0;
  };

  explicit TupleStats(const SearchSpace& space);

  void update(const ConfigPoint& point, double fitness);

  std::int64_t total() const { return total_; }
  int tuple_count() const { return static_cast<int>(tuples_.size()); }
  const std::vector<int>& tuple(int t) const { return tuples_[t]; }
  /// Statistics of `point` projected onto tuple t (zero entry when unseen).
  Entry lookup(int t, const ConfigPoint& point) const;
  /// Sum of n over every value combination recorded for tuple t.
  std::int64_t count_sum(int t) const;
  /// Statistics of the full-tuple (all dimensions) combination of `point`.
  Entry full(const ConfigPoint& point) const { return lookup(tuple_count() - 1, point); }

 private:
  std::uint64_t key(int t, const ConfigPoint& point) const;

  std::vector<int> radix_;
  std::vector<std::vector<int>> tuples_;
  std::vector<std::unordered_map<std::uint64_t, Entry>> tables_;
  std::int64_t total_ = 0;
};

/// Mean over tuples of m + k * sqrt(ln(1 + N) / (1 + n)); unseen combinations have m = n = 0.
double ucb_estimate(const TupleStats& stats, const ConfigPoint& point, double k);

/// Each dimension is redrawn with probability epsilon to a different value; a
/// neighbour with no redrawn dimension gets one uniformly chosen dimension forced to change.
std::vector<ConfigPoint> neighbours(const ConfigPoint& point, const SearchSpace& space, double epsilon, int count,
                                    Rng& rng);

struct NtbeaOptions {
  int budget = 100;
  double k = 300.0;
  double epsilon = 0.5;
  int neighbourhood_size = 50;
};

struct TuningResult {
  struct Evaluation {
    ConfigPoint point;
    double fitness = 0.0;
  };
  std::vector<Evaluation> log;
  ConfigPoint best;
  double best_mean = 0.0;
  std::int64_t best_count = 0;
};

using FitnessFunction = std::function<double(const ConfigPoint&)>;

/// Exactly `options.budget` fitness calls; recommends the evaluated point with the
/// highest full-tuple mean (ties -> most evaluations, then first evaluated).
TuningResult ntbea_tune(const SearchSpace& space, const FitnessFunction& fitness, const NtbeaOptions& options,
                        Rng& rng);

/// `eval_index,dim0..dimN,fitness` rows followed by `best,dim0..dimN,mean_fitness`.
void write_tuning_log(std::ostream& out, const TuningResult& result, int dimensions);

}  // namespace lifemodel
