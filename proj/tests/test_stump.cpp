#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "multirank/errors.hpp"
#include "multirank/stump.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace multirank;
namespace ts = multirank::testsupport;

namespace {

Instance make_inst(const std::string& id, std::vector<std::pair<std::int32_t, double>> f,
                   int rating = 0) {
  Instance inst;
  inst.id = id;
  inst.features = std::move(f);
  inst.rating = rating;
  return inst;
}

WeightedBipartiteView random_view(DetRng& rng, ts::BipartitePool& pool) {
  pool = ts::random_bipartite(rng, 8, 8, 5, 0.25);
  WeightedBipartiteView view = uniform_view(pool.pos, pool.neg);
  // randomize weights, then renormalize the factorized pair mass
  double sv = 0.0, sw = 0.0;
  for (double& v : view.pos_weight) {
    v = 0.05 + rng.unit();
    sv += v;
  }
  for (double& w : view.neg_weight) {
    w = 0.05 + rng.unit();
    sw += w;
  }
  for (double& v : view.pos_weight) v /= sv;
  for (double& w : view.neg_weight) w /= sw;
  return view;
}

Stump random_stump(DetRng& rng, int dims) {
  return Stump{1 + static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(dims))),
               rng.unit() * 8.0 - 4.0, static_cast<int>(rng.below(2))};
}

}  // namespace

TEST_CASE("stump evaluation branches") {
  Instance at = make_inst("a", {{2, 0.5}});
  Instance below = make_inst("b", {{2, 0.49}});
  Instance missing = make_inst("c", {{1, 9.0}});

  CHECK(eval_stump(Stump{2, 0.5, 0}, at) == 1);  // boundary value fires
  CHECK(eval_stump(Stump{2, 0.5, 0}, below) == 0);
  CHECK(eval_stump(Stump{2, 0.5, 1}, missing) == 1);
  CHECK(eval_stump(Stump{2, 0.5, 0}, missing) == 0);
}

TEST_CASE("candidate thresholds: all mode") {
  auto c = candidate_thresholds_from_values({1, 2, 2, 3}, ThresholdPolicy::all());
  CHECK(c == std::vector<double>{0, 1, 2, 3});  // sentinel = min - 1
}

TEST_CASE("candidate thresholds: quantile mode") {
  std::vector<double> values;
  for (int i = 1; i <= 1000; ++i) values.push_back(i);
  auto c = candidate_thresholds_from_values(values, ThresholdPolicy::quantiles(100));
  REQUIRE(c.size() == 101);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i - 1] < c[i]);
  CHECK(c.back() == 1000);
  // nearest-rank: k-th pick is the ceil(k*D/n)-th distinct value
  CHECK(c[1] == 10);
  CHECK(c[50] == 500);

  auto few = candidate_thresholds_from_values({10, 20, 30, 40}, ThresholdPolicy::quantiles(2));
  CHECK(few == std::vector<double>{9, 20, 40});

  // more quantiles than distinct values degrades to all-distinct
  auto all = candidate_thresholds_from_values({1, 2, 3}, ThresholdPolicy::quantiles(10));
  CHECK(all == std::vector<double>{0, 1, 2, 3});
}

TEST_CASE("candidate thresholds: absent feature") {
  Dataset d;
  d.num_ratings = 2;
  d.feature_dimension = 3;
  d.instances.push_back(make_inst("a", {{1, 1.0}}, 0));
  d.instances.push_back(make_inst("b", {{3, 2.0}}, 1));
  CHECK(candidate_thresholds(d, 2, ThresholdPolicy::all()).empty());
  CHECK(candidate_thresholds(d, 1, ThresholdPolicy::all()) == std::vector<double>{0, 1});
  CHECK_THROWS_AS(candidate_thresholds(d, 4, ThresholdPolicy::all()), UsageError);
}

TEST_CASE("edge worked examples") {
  Instance p = make_inst("p", {{1, 2.0}}, 1);
  Instance n = make_inst("n", {{1, 1.0}}, 0);
  std::vector<const Instance*> pos{&p}, neg{&n};
  WeightedBipartiteView view = uniform_view(pos, neg);

  CHECK(edge_r(Stump{1, 2.0, 0}, view) == 1.0);  // single perfectly split pair
  CHECK(edge_r(Stump{1, 0.5, 0}, view) == 0.0);  // fires on both: constant h
  CHECK(edge_r(Stump{1, 3.0, 0}, view) == 0.0);  // fires on neither
}

TEST_CASE("edge factorization equals the pairwise double sum") {
  DetRng rng(57);
  for (int rep = 0; rep < 400; ++rep) {
    ts::BipartitePool pool;
    WeightedBipartiteView view = random_view(rng, pool);
    Stump s = random_stump(rng, 5);
    double fast = edge_r(s, view);
    double slow = edge_r_pairwise(s, view);
    CHECK(std::fabs(fast - slow) <= 1e-12);
    CHECK(std::fabs(fast) <= 1.0);
  }
}

TEST_CASE("flipping the output negates the edge exactly") {
  DetRng rng(61);
  for (int rep = 0; rep < 100; ++rep) {
    ts::BipartitePool pool;
    WeightedBipartiteView view = random_view(rng, pool);
    Stump s = random_stump(rng, 5);

    // same double sum with h replaced by 1-h, termwise
    std::vector<int> hp, hn;
    for (const Instance* inst : view.pos) hp.push_back(1 - eval_stump(s, *inst));
    for (const Instance* inst : view.neg) hn.push_back(1 - eval_stump(s, *inst));
    double flipped = 0.0;
    for (std::size_t i = 0; i < view.pos.size(); ++i) {
      for (std::size_t j = 0; j < view.neg.size(); ++j) {
        flipped += view.pos_weight[i] * view.neg_weight[j] *
                   static_cast<double>(hp[i] - hn[static_cast<std::size_t>(j)]);
      }
    }
    CHECK(flipped == -edge_r_pairwise(s, view));
  }
}

TEST_CASE("best stump on separable one-dimensional data") {
  std::vector<Instance> storage;
  for (int i = 0; i < 4; ++i) storage.push_back(make_inst("p" + std::to_string(i), {{1, 2.0}}, 1));
  for (int i = 0; i < 3; ++i) storage.push_back(make_inst("n" + std::to_string(i), {{1, 1.0}}, 0));
  std::vector<const Instance*> pos, neg;
  for (int i = 0; i < 4; ++i) pos.push_back(&storage[static_cast<std::size_t>(i)]);
  for (int i = 4; i < 7; ++i) neg.push_back(&storage[static_cast<std::size_t>(i)]);

  WeightedBipartiteView view = uniform_view(pos, neg);
  StumpSearchResult best = best_stump(view, {}, ThresholdPolicy::all());
  CHECK(best.stump.feature == 1);
  CHECK(best.stump.threshold == 2.0);
  CHECK(best.stump.default_output == 0);  // tie on r0 resolves to 0
  CHECK(best.r == 1.0);
  CHECK(best.useful());
}

TEST_CASE("identical distributions give a zero edge everywhere") {
  std::vector<Instance> storage;
  for (int i = 0; i < 3; ++i) {
    storage.push_back(make_inst("p" + std::to_string(i), {{1, static_cast<double>(i)}}, 1));
    storage.push_back(make_inst("n" + std::to_string(i), {{1, static_cast<double>(i)}}, 0));
  }
  std::vector<const Instance*> pos, neg;
  for (std::size_t i = 0; i < storage.size(); ++i) {
    (storage[i].rating == 1 ? pos : neg).push_back(&storage[i]);
  }
  WeightedBipartiteView view = uniform_view(pos, neg);
  StumpSearchResult best = best_stump(view, {}, ThresholdPolicy::all());
  CHECK(std::fabs(best.r) <= 1e-12);
  CHECK_FALSE(best.useful());
}

TEST_CASE("best stump matches the brute-force enumeration") {
  DetRng rng(71);
  for (int rep = 0; rep < 150; ++rep) {
    ts::BipartitePool pool;
    WeightedBipartiteView view = random_view(rng, pool);
    ThresholdPolicy policy = rep % 3 == 0 ? ThresholdPolicy::quantiles(4) : ThresholdPolicy::all();

    StumpSearchResult best = best_stump(view, {}, policy);
    double oracle = ts::best_edge_bruteforce(view, policy);
    CHECK(std::fabs(std::fabs(best.r) - oracle) <= 1e-12);
    // the reported edge matches the explicit pairwise sum for that stump
    CHECK(std::fabs(best.r - edge_r_pairwise(best.stump, view)) <= 1e-12);
  }
}

TEST_CASE("search is deterministic and thread-count independent") {
  DetRng rng(83);
  ts::BipartitePool pool = ts::random_bipartite(rng, 20, 20, 8, 0.2);
  WeightedBipartiteView view = uniform_view(pool.pos, pool.neg);

  StumpSearchResult a = best_stump(view, {}, ThresholdPolicy::all(), 1);
  StumpSearchResult b = best_stump(view, {}, ThresholdPolicy::all(), 1);
  StumpSearchResult c = best_stump(view, {}, ThresholdPolicy::all(), 4);
  CHECK(a.stump == b.stump);
  CHECK(a.r == b.r);
  CHECK(a.stump == c.stump);
  CHECK(a.r == c.r);
}

TEST_CASE("feature filter restricts the search") {
  std::vector<Instance> storage;
  storage.push_back(make_inst("p", {{1, 2.0}, {2, 5.0}}, 1));
  storage.push_back(make_inst("n", {{1, 1.0}, {2, 1.0}}, 0));
  std::vector<const Instance*> pos{&storage[0]}, neg{&storage[1]};
  WeightedBipartiteView view = uniform_view(pos, neg);

  std::vector<std::int32_t> only_two{2};
  StumpSearchResult best = best_stump(view, only_two, ThresholdPolicy::all());
  CHECK(best.stump.feature == 2);
}

TEST_CASE("view invariant is enforced") {
  Instance p = make_inst("p", {{1, 2.0}}, 1);
  Instance n = make_inst("n", {{1, 1.0}}, 0);
  std::vector<const Instance*> pos{&p}, neg{&n};
  WeightedBipartiteView view = uniform_view(pos, neg);
  view.pos_weight[0] = 3.0;
  CHECK_THROWS_AS(best_stump(view, {}, ThresholdPolicy::all()), InternalError);
}
