#include "multirank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "multirank/errors.hpp"

namespace multirank {
namespace {

void check_entries(const ScoredList& scored) {
  for (const ScoredEntry& e : scored) {
    if (!std::isfinite(e.score)) throw DataError("non-finite score for id '" + e.id + "'");
    if (e.rating < 0) throw DataError("negative rating for id '" + e.id + "'");
  }
}

// Positions sorted by descending score, stable in the input order.
std::vector<std::size_t> rank_order(const ScoredList& scored) {
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&scored](std::size_t a, std::size_t b) {
    return scored[a].score > scored[b].score;
  });
  return order;
}

// Counts entries with rating <= r among the inserted ones.
class RatingFenwick {
 public:
  explicit RatingFenwick(int levels) : tree_(static_cast<std::size_t>(levels) + 1, 0) {}

  void insert(int rating) {
    for (std::size_t i = static_cast<std::size_t>(rating) + 1; i < tree_.size(); i += i & (~i + 1)) {
      ++tree_[i];
    }
    ++total_;
  }

  std::int64_t greater_than(int rating) const {
    std::int64_t at_most = 0;
    for (std::size_t i = static_cast<std::size_t>(rating) + 1; i > 0; i -= i & (~i + 1)) {
      at_most += tree_[i];
    }
    return total_ - at_most;
  }

 private:
  std::vector<std::int64_t> tree_;
  std::int64_t total_ = 0;
};

}  // namespace

double dcg(const std::vector<int>& ratings_in_rank_order) {
  if (ratings_in_rank_order.empty()) throw DataError("dcg of an empty list");
  const std::int64_t n = static_cast<std::int64_t>(ratings_in_rank_order.size());
  std::int64_t sum = 0;
  for (std::int64_t i = 1; i <= n; ++i) {
    int r = ratings_in_rank_order[static_cast<std::size_t>(i - 1)];
    if (r < 0) throw DataError("negative rating in dcg input");
    sum += static_cast<std::int64_t>(r) * (n - i);
  }
  return static_cast<double>(sum);
}

double ndcg(const ScoredList& scored) {
  if (scored.empty()) throw DataError("ndcg of an empty list");
  check_entries(scored);

  auto order = rank_order(scored);
  std::vector<int> predicted(scored.size());
  std::vector<int> ideal(scored.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    predicted[i] = scored[order[i]].rating;
    ideal[i] = scored[i].rating;
  }
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());

  double ideal_dcg = dcg(ideal);
  if (ideal_dcg == 0.0) return 1.0;
  return dcg(predicted) / ideal_dcg;
}

double c_index_error(const ScoredList& scored, int num_ratings) {
  check_entries(scored);
  int max_rating = 0;
  for (const ScoredEntry& e : scored) max_rating = std::max(max_rating, e.rating);
  int levels = std::max(num_ratings, max_rating + 1);

  std::vector<std::int64_t> counts(static_cast<std::size_t>(levels), 0);
  for (const ScoredEntry& e : scored) ++counts[static_cast<std::size_t>(e.rating)];

  const std::int64_t n = static_cast<std::int64_t>(scored.size());
  std::int64_t same_class_pairs = 0;
  int distinct = 0;
  for (std::int64_t c : counts) {
    same_class_pairs += c * (c - 1) / 2;
    if (c > 0) ++distinct;
  }
  std::int64_t cross_pairs = n * (n - 1) / 2 - same_class_pairs;
  if (distinct < 2) throw DataError("c-index needs at least two distinct ratings");

  // Ascending score sweep; within a tie group, query before inserting so
  // tied pairs contribute nothing.
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&scored](std::size_t a, std::size_t b) {
    return scored[a].score < scored[b].score;
  });

  RatingFenwick inserted(levels);
  std::int64_t misordered = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scored[order[j]].score == scored[order[i]].score) ++j;
    for (std::size_t t = i; t < j; ++t) {
      // strictly lower scores already inserted; any with a higher rating is
      // a mis-ordered pair
      misordered += inserted.greater_than(scored[order[t]].rating);
    }
    for (std::size_t t = i; t < j; ++t) inserted.insert(scored[order[t]].rating);
    i = j;
  }
  return static_cast<double>(misordered) / static_cast<double>(cross_pairs);
}

double auc(const ScoredList& scored) {
  check_entries(scored);
  int distinct = 0;
  std::vector<std::int64_t> seen;
  for (const ScoredEntry& e : scored) {
    if (static_cast<std::size_t>(e.rating) >= seen.size()) {
      seen.resize(static_cast<std::size_t>(e.rating) + 1, 0);
    }
    if (seen[static_cast<std::size_t>(e.rating)]++ == 0) ++distinct;
  }
  if (distinct != 2) throw DataError("auc requires exactly two distinct ratings");
  return 1.0 - c_index_error(scored, static_cast<int>(seen.size()));
}

}  // namespace multirank
