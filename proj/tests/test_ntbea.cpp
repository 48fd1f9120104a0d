#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lifemodel/ntbea.hpp"

using namespace lifemodel;

namespace {

int differing(const ConfigPoint& a, const ConfigPoint& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

// Mean over tuples of m + k*sqrt(ln(1+N)/(1+n)), recomputed from a raw evaluation log.
double ucb_from_log(const std::vector<std::pair<ConfigPoint, double>>& log, const std::vector<std::vector<int>>& tuples,
                    const ConfigPoint& p, double k) {
  const double n_total = static_cast<double>(log.size());
  double sum = 0;
  for (const auto& t : tuples) {
    double n = 0;
    double total = 0;
    for (const auto& [q, f] : log) {
      bool match = true;
      for (int d : t) match = match && q[d] == p[d];
      if (match) {
        ++n;
        total += f;
      }
    }
    const double m = n > 0 ? total / n : 0.0;
    sum += m + k * std::sqrt(std::log(1 + n_total) / (1 + n));
  }
  return sum / static_cast<double>(tuples.size());
}

std::vector<std::vector<int>> all_tuples(int dims) {
  std::vector<std::vector<int>> t;
  for (int a = 0; a < dims; ++a) t.push_back({a});
  for (int a = 0; a < dims; ++a)
    for (int b = a + 1; b < dims; ++b) t.push_back({a, b});
  std::vector<int> full;
  for (int a = 0; a < dims; ++a) full.push_back(a);
  t.push_back(full);
  return t;
}

}  // namespace

TEST_CASE("rhea search space") {
  const SearchSpace s = SearchSpace::rhea();
  REQUIRE(s.dimensions() == 8);
  const int counts[] = {2, 7, 5, 5, 2, 2, 7, 4};
  for (int d = 0; d < 8; ++d) CHECK(s.value_count(d) == counts[d]);
  CHECK(s.size() == 39200);

  CHECK(s.dimension(1).values == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7});
  CHECK(s.dimension(2).values == std::vector<double>{1, 3, 5, 10, 20});
  CHECK(s.dimension(3).values == std::vector<double>{1, 3, 5, 10, 25});
  CHECK(s.dimension(6).values == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7});
  CHECK(s.dimension(7).values == std::vector<double>{0.999, 0.99, 0.9, 0.8});

  const RheaConfig c = to_rhea_config(s, {1, 2, 4, 4, 1, 0, 1, 3}, 50);
  CHECK(c == RheaConfig{});
  CHECK_THROWS(to_rhea_config(s, {0, 0, 0, 0, 0, 0, 0, 9}, 50));
}

TEST_CASE("tuple set") {
  const TupleStats stats(SearchSpace::rhea());
  CHECK(stats.tuple_count() == 8 + 28 + 1);
  CHECK(stats.tuple(stats.tuple_count() - 1).size() == 8);
}

TEST_CASE("ucb examples") {
  const SearchSpace s = SearchSpace::rhea();
  Rng rng(1);
  TupleStats fresh(s);
  CHECK(ucb_estimate(fresh, random_point(s, rng), 300) == 0.0);

  TupleStats once(s);
  const ConfigPoint p = random_point(s, rng);
  once.update(p, 17.5);
  CHECK(ucb_estimate(once, p, 0) == doctest::Approx(17.5));

  // Same point except dimension 1: one value seen with a low mean, one never seen.
  TupleStats st(s);
  ConfigPoint seen = p;
  seen[1] = 0;
  ConfigPoint unseen = p;
  unseen[1] = 1;
  st.update(seen, 1.0);
  st.update(seen, 2.0);
  CHECK(ucb_estimate(st, unseen, 1000) > ucb_estimate(st, seen, 1000));
}

TEST_CASE("ucb matches the formula over a random log") {
  const SearchSpace s = SearchSpace::rhea();
  const auto tuples = all_tuples(8);
  Rng rng(2);
  TupleStats st(s);
  std::vector<std::pair<ConfigPoint, double>> log;
  // A small pool so points repeat and tuples share statistics.
  std::vector<ConfigPoint> pool;
  for (int i = 0; i < 6; ++i) pool.push_back(random_point(s, rng));
  for (int i = 0; i < 60; ++i) {
    const ConfigPoint& p = pool[uniform_int(rng, 0, 5)];
    const double f = uniform01(rng) * 100;
    st.update(p, f);
    log.emplace_back(p, f);
  }
  for (int i = 0; i < 20; ++i) {
    const ConfigPoint q = i < 6 ? pool[i] : random_point(s, rng);
    CHECK(ucb_estimate(st, q, 300) == doctest::Approx(ucb_from_log(log, tuples, q, 300)));
  }
  for (int t = 0; t < st.tuple_count(); ++t) CHECK(st.count_sum(t) == st.total());
}

TEST_CASE("neighbour examples") {
  const SearchSpace s = SearchSpace::rhea();
  Rng rng(3);
  const ConfigPoint p = random_point(s, rng);
  for (const ConfigPoint& q : neighbours(p, s, 0.0, 200, rng)) CHECK(differing(p, q) == 1);
  for (const ConfigPoint& q : neighbours(p, s, 1.0, 200, rng)) CHECK(differing(p, q) == 8);
  for (const ConfigPoint& q : neighbours(p, s, 0.5, 500, rng)) {
    CHECK(contains(s, q));
    CHECK(q != p);
  }
  CHECK(neighbours(p, s, 0.5, 50, rng).size() == 50);
  CHECK_THROWS(neighbours(p, s, 0.5, 0, rng));
}

TEST_CASE("ntbea budget accounting") {
  const SearchSpace s = SearchSpace::rhea();
  for (int budget : {1, 2, 17, 100}) {
    Rng rng(4);
    int calls = 0;
    std::set<ConfigPoint> evaluated;
    const TuningResult r = ntbea_tune(
        s,
        [&](const ConfigPoint& p) {
          ++calls;
          evaluated.insert(p);
          return static_cast<double>(p[0] + p[2]);
        },
        NtbeaOptions{budget, 300, 0.5, 50}, rng);
    CHECK(calls == budget);
    CHECK(r.log.size() == static_cast<std::size_t>(budget));
    CHECK(evaluated.count(r.best) == 1);
    if (budget == 1) CHECK(r.best == r.log.front().point);
  }
}

TEST_CASE("ntbea recommendation maximizes the full-tuple mean") {
  const SearchSpace s = SearchSpace::rhea();
  Rng rng(5);
  Rng noise(6);
  const TuningResult r = ntbea_tune(
      s, [&](const ConfigPoint& p) { return p[1] + p[6] + 3 * uniform01(noise); }, NtbeaOptions{150, 5, 0.5, 20},
      rng);
  std::map<ConfigPoint, std::pair<int, double>> agg;
  for (const auto& e : r.log) {
    agg[e.point].first++;
    agg[e.point].second += e.fitness;
  }
  double top = -1e300;
  for (const auto& [p, v] : agg) top = std::max(top, v.second / v.first);
  CHECK(r.best_mean == doctest::Approx(top));
  CHECK(agg[r.best].second / agg[r.best].first == doctest::Approx(top));
  CHECK(r.best_count == agg[r.best].first);
}

TEST_CASE("ntbea finds most of a separable optimum") {
  // Exhaustive optimum of sum_d [index_d == target_d] is the target itself.
  const SearchSpace s = SearchSpace::rhea();
  double matched = 0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng target_rng(1000 + seed);
    const ConfigPoint target = random_point(s, target_rng);
    Rng rng(static_cast<std::uint64_t>(seed));
    const TuningResult r = ntbea_tune(
        s,
        [&](const ConfigPoint& p) {
          double f = 0;
          for (int d = 0; d < 8; ++d) f += p[d] == target[d];
          return f;
        },
        NtbeaOptions{300, 300, 0.5, 50}, rng);
    matched += 8 - differing(r.best, target);
  }
  MESSAGE("mean matched dimensions: " << matched / 20);
  CHECK(matched / 20 >= 6.0);
}

TEST_CASE("ntbea is reproducible") {
  const SearchSpace s = SearchSpace::rhea();
  auto run = [&] {
    Rng rng(7);
    return ntbea_tune(s, [](const ConfigPoint& p) { return static_cast<double>(p[3] * p[5] + p[7]); }, {}, rng);
  };
  const TuningResult a = run();
  const TuningResult b = run();
  CHECK(a.best == b.best);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) CHECK(a.log[i].point == b.log[i].point);
}

TEST_CASE("tuning log csv") {
  TuningResult r;
  r.log.push_back({{1, 2, 3, 4, 1, 0, 5, 2}, 12.5});
  r.best = {1, 2, 3, 4, 1, 0, 5, 2};
  r.best_mean = 12.5;
  std::ostringstream out;
  write_tuning_log(out, r, 8);
  CHECK(out.str() ==
        "eval_index,dim0,dim1,dim2,dim3,dim4,dim5,dim6,dim7,fitness\n"
        "0,1,2,3,4,1,0,5,2,12.5\n"
        "best,1,2,3,4,1,0,5,2,12.5\n");
}
