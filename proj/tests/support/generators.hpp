#pragma once

// Random-input builders shared by the unit suites and the acceptance runner.

#include <cmath>
#include <string>
#include <vector>

#include "multirank/dataset.hpp"
#include "multirank/rng.hpp"

namespace multirank::testsupport {

// Sparse instance with `dims` candidate features, each present with
// probability 1 - missing_rate. Roughly a third of the values are small
// integers so threshold ties and duplicate values actually occur.
inline Instance random_instance(DetRng& rng, int dims, double missing_rate,
                                const std::string& id, int rating = 0) {
  Instance inst;
  inst.id = id;
  inst.rating = rating;
  for (int f = 1; f <= dims; ++f) {
    if (rng.unit() < missing_rate) continue;
    double v;
    if (rng.below(3) == 0) {
      v = static_cast<double>(rng.below(5));
    } else {
      v = rng.unit() * 10.0 - 5.0;
    }
    inst.features.emplace_back(f, v);
  }
  return inst;
}

struct BipartitePool {
  std::vector<Instance> pos_storage;
  std::vector<Instance> neg_storage;
  std::vector<const Instance*> pos;
  std::vector<const Instance*> neg;
};

inline BipartitePool random_bipartite(DetRng& rng, std::size_t max_pos, std::size_t max_neg,
                                      int max_dims, double missing_rate) {
  BipartitePool pool;
  std::size_t m = 1 + rng.below(max_pos);
  std::size_t n = 1 + rng.below(max_neg);
  int dims = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_dims)));
  for (std::size_t i = 0; i < m; ++i) {
    pool.pos_storage.push_back(
        random_instance(rng, dims, missing_rate, "p" + std::to_string(i), 1));
  }
  for (std::size_t j = 0; j < n; ++j) {
    pool.neg_storage.push_back(
        random_instance(rng, dims, missing_rate, "n" + std::to_string(j), 0));
  }
  for (const Instance& inst : pool.pos_storage) pool.pos.push_back(&inst);
  for (const Instance& inst : pool.neg_storage) pool.neg.push_back(&inst);
  return pool;
}

// Ordinal data where the rating is the quartile bucket of feature 1 and
// features 2..5 are noise. Clean by construction: a stump chain on feature 1
// separates every rating boundary.
inline Dataset quartile_dataset(DetRng& rng, std::size_t count, int num_ratings = 4,
                                int noise_features = 4) {
  Dataset d;
  d.num_ratings = num_ratings;
  d.feature_dimension = 1 + noise_features;
  for (std::size_t i = 0; i < count; ++i) {
    Instance inst;
    inst.id = "q" + std::to_string(i);
    double x = rng.unit();
    inst.rating = std::min(num_ratings - 1, static_cast<int>(x * num_ratings));
    inst.features.emplace_back(1, x);
    for (int f = 0; f < noise_features; ++f) {
      inst.features.emplace_back(2 + f, rng.unit());
    }
    d.instances.push_back(std::move(inst));
  }
  return d;
}

// Reassigns a fraction of ratings to a uniformly random different level.
inline Dataset flip_ratings(Dataset d, DetRng& rng, double rate) {
  for (Instance& inst : d.instances) {
    if (rng.unit() >= rate) continue;
    int next = static_cast<int>(rng.below(static_cast<std::uint64_t>(d.num_ratings - 1)));
    if (next >= inst.rating) ++next;
    inst.rating = next;
  }
  return d;
}

inline std::vector<const Instance*> pointers(const Dataset& d) {
  std::vector<const Instance*> out;
  out.reserve(d.size());
  for (const Instance& inst : d.instances) out.push_back(&inst);
  return out;
}

}  // namespace multirank::testsupport
