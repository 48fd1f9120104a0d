#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lifemodel/ca_core.hpp"
#include "lifemodel/random.hpp"

namespace lifemodel {

struct TransitionSample {
  PatternCode pattern = 0;
  std::uint8_t outcome = 0;
};

/// Multiset of (pattern, outcome) samples, stored as per-pattern outcome counts.
class Dataset {
 public:
  void add(const TransitionSample& sample, std::int64_t count = 1);
  void merge(const Dataset& other);

  std::int64_t size() const { return total_; }
  bool empty() const { return total_ == 0; }
  std::int64_t count(PatternCode pattern, std::uint8_t outcome) const { return counts_[pattern][outcome]; }
  bool seen(PatternCode pattern) const { return unique_[pattern]; }
  const std::bitset<kPatternCount>& unique_patterns() const { return unique_; }
  int unique_count() const { return static_cast<int>(unique_.count()); }

  /// Majority outcome of a seen pattern, ties -> 0.
  std::uint8_t majority(PatternCode pattern) const;

  /// One row per seen (pattern, outcome): `pattern_code,outcome,count`.
  void write_csv(std::ostream& out) const;
  static Dataset read_csv(std::istream& in);

 private:
  std::array<std::array<std::int64_t, 2>, kPatternCount> counts_{};
  std::bitset<kPatternCount> unique_;
  std::int64_t total_ = 0;
};

/// One sample per cell: (code of the 3x3 block of `before`, cell of `after`).
Dataset harvest_transitions(const Grid& before, const Grid& after);

enum class LearnerKind { Exact, DecisionTree, Mlp };

class Learner {
 public:
  virtual ~Learner() = default;
  virtual void observe(const TransitionSample& sample) = 0;
  void observe(const Dataset& data);
  /// Rebuilds the predictor from everything observed. Throws std::logic_error on an empty training set.
  virtual void refit() = 0;
  virtual std::uint8_t predict(PatternCode pattern) const = 0;
  virtual const Dataset& training_set() const = 0;
  virtual LearnerKind kind() const = 0;
  virtual std::unique_ptr<Learner> clone() const = 0;

 protected:
  virtual void observe_counted(const TransitionSample& sample, std::int64_t count) = 0;
};

/// Lookup table; unseen patterns return the a-priori default.
class ExactLearner final : public Learner {
 public:
  explicit ExactLearner(std::uint8_t default_output = 0) : default_output_(default_output) { memory_.fill(-1); }

  void observe(const TransitionSample& sample) override { observe_counted(sample, 1); }
  using Learner::observe;
  void refit() override {}
  std::uint8_t predict(PatternCode pattern) const override {
    return memory_[pattern] < 0 ? default_output_ : static_cast<std::uint8_t>(memory_[pattern]);
  }
  const Dataset& training_set() const override { return data_; }
  LearnerKind kind() const override { return LearnerKind::Exact; }
  std::unique_ptr<Learner> clone() const override { return std::make_unique<ExactLearner>(*this); }

 protected:
  void observe_counted(const TransitionSample& sample, std::int64_t count) override;

 private:
  std::array<std::int8_t, kPatternCount> memory_;
  std::uint8_t default_output_;
  Dataset data_;
};

/// Unpruned ID3 tree over the nine pattern bits.
///
/// Splits maximize information gain (ties -> lowest bit). Nodes stop when pure
/// or when no remaining bit separates their samples. A branch that receives no
/// samples becomes a leaf with the parent's majority class (ties -> 0).
class DecisionTree final : public Learner {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    std::uint8_t prediction = 0;
    int child[2] = {-1, -1};
  };

  void observe(const TransitionSample& sample) override { observe_counted(sample, 1); }
  using Learner::observe;
  void refit() override;
  std::uint8_t predict(PatternCode pattern) const override;
  const Dataset& training_set() const override { return data_; }
  LearnerKind kind() const override { return LearnerKind::DecisionTree; }
  std::unique_ptr<Learner> clone() const override { return std::make_unique<DecisionTree>(*this); }

  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;

 protected:
  void observe_counted(const TransitionSample& sample, std::int64_t count) override { data_.add(sample, count); }

 private:
  int build(const std::vector<std::pair<PatternCode, std::uint8_t>>& rows, unsigned used_features,
            std::uint8_t parent_majority);

  Dataset data_;
  std::vector<Node> nodes_;
};

struct MlpOptions {
  enum class Loss { SquaredError, CrossEntropy };

  int hidden = 16;
  double learning_rate = 0.1;
  int max_epochs = 5000;
  Loss loss = Loss::SquaredError;
  bool centred_inputs = true;  // cells fed as -1/+1 instead of 0/1
  std::uint64_t seed = 1;
};

/// 9 -> hidden -> 1 logistic network trained by per-sample SGD.
/// Training stops early once every distinct training pattern is classified correctly.
class MlpLearner final : public Learner {
 public:
  explicit MlpLearner(MlpOptions options = {});

  void observe(const TransitionSample& sample) override { observe_counted(sample, 1); }
  using Learner::observe;
  void refit() override;
  std::uint8_t predict(PatternCode pattern) const override { return raw_output(pattern) >= 0.5 ? 1 : 0; }
  double raw_output(PatternCode pattern) const;
  const Dataset& training_set() const override { return data_; }
  LearnerKind kind() const override { return LearnerKind::Mlp; }
  std::unique_ptr<Learner> clone() const override { return std::make_unique<MlpLearner>(*this); }

  int epochs_run() const { return epochs_run_; }

 protected:
  void observe_counted(const TransitionSample& sample, std::int64_t count) override { data_.add(sample, count); }

 private:
  void initialize_weights(Rng& rng);
  double forward(PatternCode pattern, double* hidden) const;

  MlpOptions options_;
  std::vector<double> w_hidden_;  // hidden x 10 (9 inputs + bias)
  std::vector<double> w_out_;     // hidden + 1 (bias last)
  Dataset data_;
  int epochs_run_ = 0;
};

std::unique_ptr<Learner> make_learner(LearnerKind kind, std::uint64_t seed = 1);
std::string to_string(LearnerKind kind);
LearnerKind parse_learner_kind(const std::string& text);

/// Truth table of any learner: table[c] = predict(c).
RuleTable compile_to_table(const Learner& learner);

/// Number of the 512 codes on which `table` agrees with `truth`.
inline int correct_patterns(const RuleTable& table, const RuleTable& truth) {
  return kPatternCount - hamming(table, truth);
}

struct DegradedTable {
  RuleTable table;
  std::bitset<kPatternCount> known;
};

/// Copies `known` uniformly chosen codes from `truth`; every other entry is `fallback`.
DegradedTable degrade_table(const RuleTable& truth, int known, std::uint8_t fallback, Rng& rng);

/// Flips exactly `errors` uniformly chosen entries of `truth`.
RuleTable perturb_table(const RuleTable& truth, int errors, Rng& rng);

}  // namespace lifemodel
