#pragma once

#include <string>
#include <vector>

namespace multirank {

struct ScoredEntry {
  std::string id;
  double score = 0.0;
  int rating = 0;
};

using ScoredList = std::vector<ScoredEntry>;

// Linear positional discount: sum of r_i * (|S| - i) with positions 1-based,
// so the last position contributes nothing.
double dcg(const std::vector<int>& ratings_in_rank_order);

// Stable descending sort by score (ties keep input order), DCG of the
// resulting rating sequence over the ideal permutation's DCG. When the ideal
// DCG is zero (all-zero ratings, single element) returns 1.0.
double ndcg(const ScoredList& scored);

// Fraction of cross-rating pairs where the higher-rated instance scores
// strictly below the lower-rated one. Ties contribute zero. Needs at least
// two distinct ratings.
double c_index_error(const ScoredList& scored, int num_ratings);

// Bipartite only: 1 - c_index_error.
double auc(const ScoredList& scored);

}  // namespace multirank
