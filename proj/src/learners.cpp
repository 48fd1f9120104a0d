#include "lifemodel/learners.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lifemodel {

void Dataset::add(const TransitionSample& sample, std::int64_t count) {
  if (sample.pattern >= kPatternCount) throw std::invalid_argument("pattern code out of range");
  if (sample.outcome > 1) throw std::invalid_argument("outcome must be 0 or 1");
  if (count <= 0) return;
  counts_[sample.pattern][sample.outcome] += count;
  unique_.set(sample.pattern);
  total_ += count;
}

void Dataset::merge(const Dataset& other) {
  for (int c = 0; c < kPatternCount; ++c) {
    for (std::uint8_t o = 0; o < 2; ++o) add({static_cast<PatternCode>(c), o}, other.counts_[c][o]);
  }
}

std::uint8_t Dataset::majority(PatternCode pattern) const {
  return counts_[pattern][1] > counts_[pattern][0] ? 1 : 0;
}

void Dataset::write_csv(std::ostream& out) const {
  out << "pattern_code,outcome,count\n";
  for (int c = 0; c < kPatternCount; ++c) {
    for (int o = 0; o < 2; ++o) {
      if (counts_[c][o] > 0) out << c << ',' << o << ',' << counts_[c][o] << '\n';
    }
  }
}

Dataset Dataset::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "pattern_code,outcome,count") {
    throw std::runtime_error("dataset csv: missing or unexpected header");
  }
  Dataset data;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    long code = -1;
    int outcome = -1;
    long long count = -1;
    char c1 = 0;
    char c2 = 0;
    if (!(ls >> code >> c1 >> outcome >> c2 >> count) || c1 != ',' || c2 != ',' || code < 0 ||
        code >= kPatternCount || (outcome != 0 && outcome != 1) || count < 0) {
      throw std::runtime_error("dataset csv: malformed line " + std::to_string(line_no) + ": '" + line + "'");
    }
    data.add({static_cast<PatternCode>(code), static_cast<std::uint8_t>(outcome)}, count);
  }
  return data;
}

Dataset harvest_transitions(const Grid& before, const Grid& after) {
  if (before.width() != after.width() || before.height() != after.height()) {
    throw std::invalid_argument("harvest_transitions: grids differ in size");
  }
  Dataset data;
  for (int y = 0; y < before.height(); ++y) {
    for (int x = 0; x < before.width(); ++x) {
      data.add({encode_pattern(neighbourhood(before, x, y)), after.at(x, y)});
    }
  }
  return data;
}

void Learner::observe(const Dataset& data) {
  for (int c = 0; c < kPatternCount; ++c) {
    if (!data.seen(static_cast<PatternCode>(c))) continue;
    for (std::uint8_t o = 0; o < 2; ++o) {
      const auto n = data.count(static_cast<PatternCode>(c), o);
      if (n > 0) observe_counted({static_cast<PatternCode>(c), o}, n);
    }
  }
}

void ExactLearner::observe_counted(const TransitionSample& sample, std::int64_t count) {
  data_.add(sample, count);
  memory_[sample.pattern] = static_cast<std::int8_t>(sample.outcome);
}

// ---------------------------------------------------------------------------
// Decision tree

namespace {

double entropy(int ones, int total) {
  if (total == 0 || ones == 0 || ones == total) return 0.0;
  const double p = static_cast<double>(ones) / total;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace

void DecisionTree::refit() {
  if (data_.empty()) throw std::logic_error("decision tree refit: empty training set");
  std::vector<std::pair<PatternCode, std::uint8_t>> rows;
  for (int c = 0; c < kPatternCount; ++c) {
    const auto code = static_cast<PatternCode>(c);
    if (data_.seen(code)) rows.emplace_back(code, data_.majority(code));
  }
  nodes_.clear();
  build(rows, 0u, 0);
}

int DecisionTree::build(const std::vector<std::pair<PatternCode, std::uint8_t>>& rows, unsigned used_features,
                        std::uint8_t parent_majority) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (rows.empty()) {
    nodes_[index].prediction = parent_majority;
    return index;
  }

  const int total = static_cast<int>(rows.size());
  const int ones = static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.second; }));
  const std::uint8_t majority = 2 * ones > total ? 1 : 0;
  nodes_[index].prediction = majority;
  if (ones == 0 || ones == total) return index;

  const double parent_entropy = entropy(ones, total);
  int best_feature = -1;
  double best_gain = -1.0;
  for (int f = 0; f < 9; ++f) {
    if (used_features & (1u << f)) continue;
    int n[2] = {0, 0};
    int k[2] = {0, 0};
    for (const auto& [code, outcome] : rows) {
      const int side = (code >> f) & 1;
      ++n[side];
      k[side] += outcome;
    }
    if (n[0] == 0 || n[1] == 0) continue;
    const double gain = parent_entropy - (n[0] * entropy(k[0], n[0]) + n[1] * entropy(k[1], n[1])) / total;
    if (gain > best_gain + 1e-12) {
      best_gain = gain;
      best_feature = f;
    }
  }
  if (best_feature < 0) return index;

  std::vector<std::pair<PatternCode, std::uint8_t>> side_rows[2];
  for (const auto& row : rows) side_rows[(row.first >> best_feature) & 1].push_back(row);
  const unsigned used = used_features | (1u << best_feature);
  const int lo = build(side_rows[0], used, majority);
  const int hi = build(side_rows[1], used, majority);
  nodes_[index].feature = best_feature;
  nodes_[index].child[0] = lo;
  nodes_[index].child[1] = hi;
  return index;
}

std::uint8_t DecisionTree::predict(PatternCode pattern) const {
  if (nodes_.empty()) return 0;
  int n = 0;
  while (nodes_[n].feature >= 0) n = nodes_[n].child[(pattern >> nodes_[n].feature) & 1];
  return nodes_[n].prediction;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    for (int child : nodes_[i].child) {
      if (child >= 0) level[child] = level[i] + 1;
    }
  }
  return deepest;
}

// ---------------------------------------------------------------------------
// MLP

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

MlpLearner::MlpLearner(MlpOptions options) : options_(options) {
  if (options_.hidden < 1) throw std::invalid_argument("mlp needs at least one hidden unit");
  Rng rng(options_.seed);
  initialize_weights(rng);
}

void MlpLearner::initialize_weights(Rng& rng) {
  std::uniform_real_distribution<double> init(-0.5, 0.5);
  w_hidden_.resize(static_cast<std::size_t>(options_.hidden) * 10);
  w_out_.resize(options_.hidden + 1);
  for (auto& w : w_hidden_) w = init(rng);
  for (auto& w : w_out_) w = init(rng);
}

double MlpLearner::forward(PatternCode pattern, double* hidden) const {
  const double off = options_.centred_inputs ? -1.0 : 0.0;
  double z = w_out_[options_.hidden];
  for (int j = 0; j < options_.hidden; ++j) {
    const double* w = &w_hidden_[static_cast<std::size_t>(j) * 10];
    double a = w[9];
    for (int i = 0; i < 9; ++i) a += w[i] * (((pattern >> i) & 1) ? 1.0 : off);
    hidden[j] = logistic(a);
    z += w_out_[j] * hidden[j];
  }
  return logistic(z);
}

double MlpLearner::raw_output(PatternCode pattern) const {
  std::vector<double> hidden(options_.hidden);
  return forward(pattern, hidden.data());
}

void MlpLearner::refit() {
  if (data_.empty()) throw std::logic_error("mlp refit: empty training set");
  std::vector<std::pair<PatternCode, std::uint8_t>> rows;
  for (int c = 0; c < kPatternCount; ++c) {
    const auto code = static_cast<PatternCode>(c);
    if (data_.seen(code)) rows.emplace_back(code, data_.majority(code));
  }

  const int h = options_.hidden;
  const double lr = options_.learning_rate;
  const double off = options_.centred_inputs ? -1.0 : 0.0;
  std::vector<double> hidden(h);
  auto all_correct = [&] {
    return std::all_of(rows.begin(), rows.end(),
                       [&](const auto& r) { return (forward(r.first, hidden.data()) >= 0.5) == (r.second == 1); });
  };

  Rng rng(splitmix64(options_.seed) ^ static_cast<std::uint64_t>(data_.size()));
  epochs_run_ = 0;
  while (epochs_run_ < options_.max_epochs && !all_correct()) {
    std::shuffle(rows.begin(), rows.end(), rng);
    for (const auto& [code, target] : rows) {
      const double out = forward(code, hidden.data());
      // dLoss/dz at the output unit
      const double delta_out = options_.loss == MlpOptions::Loss::CrossEntropy
                                   ? out - target
                                   : (out - target) * out * (1.0 - out);
      for (int j = 0; j < h; ++j) {
        const double delta_h = delta_out * w_out_[j] * hidden[j] * (1.0 - hidden[j]);
        w_out_[j] -= lr * delta_out * hidden[j];
        double* w = &w_hidden_[static_cast<std::size_t>(j) * 10];
        for (int i = 0; i < 9; ++i) w[i] -= lr * delta_h * (((code >> i) & 1) ? 1.0 : off);
        w[9] -= lr * delta_h;
      }
      w_out_[h] -= lr * delta_out;
    }
    ++epochs_run_;
  }
}

// ---------------------------------------------------------------------------

std::unique_ptr<Learner> make_learner(LearnerKind kind, std::uint64_t seed) {
  switch (kind) {
    case LearnerKind::Exact:
      return std::make_unique<ExactLearner>();
    case LearnerKind::DecisionTree:
      return std::make_unique<DecisionTree>();
    case LearnerKind::Mlp: {
      MlpOptions options;
      options.seed = seed;
      return std::make_unique<MlpLearner>(options);
    }
  }
  throw std::invalid_argument("unknown learner kind");
}

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Exact:
      return "exact";
    case LearnerKind::DecisionTree:
      return "dtree";
    case LearnerKind::Mlp:
      return "mlp";
  }
  return "?";
}

LearnerKind parse_learner_kind(const std::string& text) {
  if (text == "exact") return LearnerKind::Exact;
  if (text == "dtree" || text == "tree") return LearnerKind::DecisionTree;
  if (text == "mlp") return LearnerKind::Mlp;
  throw std::invalid_argument("unknown learner '" + text + "' (expected exact, dtree or mlp)");
}

RuleTable compile_to_table(const Learner& learner) {
  RuleTable table;
  for (int c = 0; c < kPatternCount; ++c) {
    table.set(static_cast<PatternCode>(c), learner.predict(static_cast<PatternCode>(c)));
  }
  return table;
}

namespace {

std::array<PatternCode, kPatternCount> shuffled_codes(Rng& rng) {
  std::array<PatternCode, kPatternCount> codes;
  std::iota(codes.begin(), codes.end(), PatternCode{0});
  std::shuffle(codes.begin(), codes.end(), rng);
  return codes;
}

}  // namespace

DegradedTable degrade_table(const RuleTable& truth, int known, std::uint8_t fallback, Rng& rng) {
  if (known < 0 || known > kPatternCount) throw std::invalid_argument("known must lie in [0, 512]");
  if (fallback > 1) throw std::invalid_argument("fallback output must be 0 or 1");
  DegradedTable out;
  for (int c = 0; c < kPatternCount; ++c) out.table.set(static_cast<PatternCode>(c), fallback);
  const auto codes = shuffled_codes(rng);
  for (int i = 0; i < known; ++i) {
    out.table.set(codes[i], truth[codes[i]]);
    out.known.set(codes[i]);
  }
  return out;
}

RuleTable perturb_table(const RuleTable& truth, int errors, Rng& rng) {
  if (errors < 0 || errors > kPatternCount) throw std::invalid_argument("errors must lie in [0, 512]");
  RuleTable out = truth;
  const auto codes = shuffled_codes(rng);
  for (int i = 0; i < errors; ++i) out.set(codes[i], truth[codes[i]] ^ 1);
  return out;
}

}  // namespace lifemodel
