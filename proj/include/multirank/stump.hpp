#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "multirank/dataset.hpp"

namespace multirank {

// Single-feature threshold ranker: 1 when the feature is present and at
// least the threshold, 0 when present and below it, default_output when the
// feature is missing.
struct Stump {
  std::int32_t feature = 1;
  double threshold = 0.0;
  int default_output = 0;

  bool operator==(const Stump&) const = default;
};

int eval_stump(const Stump& s, const Instance& x);

struct ThresholdPolicy {
  int count = 0;  // <= 0 means all distinct observed values

  static ThresholdPolicy all() { return ThresholdPolicy{0}; }
  static ThresholdPolicy quantiles(int n) { return ThresholdPolicy{n}; }
  bool use_all() const { return count <= 0; }
};

// Candidate thresholds for one feature: sorted distinct observed values (or
// n nearest-rank quantiles of them), with a sentinel below the minimum
// prepended so the fire-on-every-present-value stump stays reachable.
// Empty when the feature is never present.
std::vector<double> candidate_thresholds(const Dataset& d, std::int32_t feature,
                                         const ThresholdPolicy& p);
std::vector<double> candidate_thresholds_from_values(std::vector<double> values,
                                                     const ThresholdPolicy& p);

// Factorized pair distribution over positives x negatives; invariant
// (sum v)(sum w) = 1 within 1e-9.
struct WeightedBipartiteView {
  std::vector<const Instance*> pos;
  std::vector<const Instance*> neg;
  std::vector<double> pos_weight;
  std::vector<double> neg_weight;

  void check() const;  // throws InternalError on a broken invariant
};

WeightedBipartiteView uniform_view(std::span<const Instance* const> pos,
                                   std::span<const Instance* const> neg);

// r = (sum_pos v h)(sum_neg w) - (sum_pos v)(sum_neg w h), in [-1, 1].
double edge_r(const Stump& s, const WeightedBipartiteView& view);

// Explicit double sum over all pos x neg pairs; O(mn) reference route.
double edge_r_pairwise(const Stump& s, const WeightedBipartiteView& view);

struct StumpSearchResult {
  Stump stump;
  double r = 0.0;

  // false when no stump has a usable edge; the boosting loop stops early
  bool useful() const;
};

// Per-feature sorted layout built once per bipartite subproblem and reused
// across boosting rounds. A round's search costs O(present + candidates) per
// feature via suffix sums over the value-sorted order.
class StumpSearch {
 public:
  StumpSearch(std::span<const Instance* const> pos, std::span<const Instance* const> neg,
              const ThresholdPolicy& policy,
              std::span<const std::int32_t> feature_filter = {});

  bool has_features() const { return !features_.empty(); }
  std::int32_t max_feature() const { return max_feature_; }

  // Exhaustive argmax of |r| over features x candidates x default_output.
  // Ties break to the lower feature, then lower threshold, then default 0.
  // The reduction over feature chunks is ordered, so the result does not
  // depend on `threads`.
  StumpSearchResult best(std::span<const double> pos_w, std::span<const double> neg_w,
                         int threads = 1) const;

  // h bits for one side's slots, via the prebuilt layout.
  void eval_side(bool positive_side, const Stump& s, std::vector<std::uint8_t>& out) const;

 private:
  struct FeatureLayout {
    std::int32_t feature = 0;
    std::vector<double> candidates;  // ascending, sentinel first
    std::vector<double> pos_values;  // descending
    std::vector<std::int32_t> pos_slots;
    std::vector<double> neg_values;
    std::vector<std::int32_t> neg_slots;
    // slots lacking the feature; their mass is summed directly so a fully
    // present feature has an exactly-zero missing term (keeps r0 ties exact)
    std::vector<std::int32_t> pos_missing;
    std::vector<std::int32_t> neg_missing;
  };

  struct ChunkBest;

  double fill_edges(const FeatureLayout& f, std::span<const double> pos_w,
                    std::span<const double> neg_w, double pos_total, double neg_total,
                    std::vector<double>& scratch) const;

  std::vector<FeatureLayout> features_;
  std::size_t num_pos_ = 0;
  std::size_t num_neg_ = 0;
  std::int32_t max_feature_ = 0;
};

// One-shot search over a view (builds the layout internally).
StumpSearchResult best_stump(const WeightedBipartiteView& view,
                             std::span<const std::int32_t> features,
                             const ThresholdPolicy& policy, int threads = 1);

}  // namespace multirank
