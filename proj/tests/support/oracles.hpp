#pragma once

// Brute-force reference routes. These deliberately mirror the definitions,
// not the production code paths.

#include <cstdint>
#include <vector>

#include "multirank/metrics.hpp"
#include "multirank/stump.hpp"

namespace multirank::testsupport {

// Positional sum with 1-based positions and linear discount.
inline double dcg_bruteforce(const std::vector<int>& ratings) {
  double sum = 0.0;
  const std::size_t n = ratings.size();
  for (std::size_t i = 1; i <= n; ++i) {
    sum += static_cast<double>(ratings[i - 1]) * static_cast<double>(n - i);
  }
  return sum;
}

// Enumerates every cross-rating pair; strict mis-order only.
inline double c_index_bruteforce(const ScoredList& scored) {
  std::int64_t mis = 0;
  std::int64_t cross = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    for (std::size_t j = 0; j < scored.size(); ++j) {
      if (scored[i].rating <= scored[j].rating) continue;
      // i is the higher-rated member of the pair
      ++cross;
      if (scored[i].score < scored[j].score) ++mis;
    }
  }
  return static_cast<double>(mis) / static_cast<double>(cross);
}

// Strictly-correct pairs plus ties over all positive-negative pairs.
inline double auc_bruteforce(const ScoredList& scored) {
  int hi = 0;
  for (const ScoredEntry& e : scored) hi = std::max(hi, e.rating);
  std::int64_t correct_or_tied = 0;
  std::int64_t pairs = 0;
  for (const ScoredEntry& p : scored) {
    if (p.rating != hi) continue;
    for (const ScoredEntry& q : scored) {
      if (q.rating == hi) continue;
      ++pairs;
      if (p.score >= q.score) ++correct_or_tied;
    }
  }
  return static_cast<double>(correct_or_tied) / static_cast<double>(pairs);
}

// Full enumeration of the stump hypothesis space; returns the max |edge|
// via the explicit pairwise double sum.
inline double best_edge_bruteforce(const WeightedBipartiteView& view,
                                   const ThresholdPolicy& policy) {
  std::int32_t max_feature = 0;
  for (const Instance* inst : view.pos) {
    if (!inst->features.empty()) max_feature = std::max(max_feature, inst->features.back().first);
  }
  for (const Instance* inst : view.neg) {
    if (!inst->features.empty()) max_feature = std::max(max_feature, inst->features.back().first);
  }

  double best = 0.0;
  for (std::int32_t f = 1; f <= max_feature; ++f) {
    std::vector<double> values;
    for (const Instance* inst : view.pos) {
      if (const double* v = inst->find(f)) values.push_back(*v);
    }
    for (const Instance* inst : view.neg) {
      if (const double* v = inst->find(f)) values.push_back(*v);
    }
    for (double theta : candidate_thresholds_from_values(values, policy)) {
      for (int r0 = 0; r0 <= 1; ++r0) {
        double r = edge_r_pairwise(Stump{f, theta, r0}, view);
        best = std::max(best, std::abs(r));
      }
    }
  }
  return best;
}

}  // namespace multirank::testsupport
