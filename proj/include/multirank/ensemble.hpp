#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multirank/coding.hpp"
#include "multirank/dataset.hpp"
#include "multirank/metrics.hpp"
#include "multirank/rankboost.hpp"

namespace multirank {

enum class WeightingKind { uniform, linear, paper_shifted, adaptive, lpc_prior };

std::string weighting_kind_name(WeightingKind k);
WeightingKind weighting_kind_from_name(const std::string& name);  // UsageError on unknown

struct WeightingScheme {
  WeightingKind kind = WeightingKind::linear;
  SplitSpec split;  // adaptive only; the trainer's seed overrides split.seed
};

// uniform -> all 1; linear -> T_j = j (1-based column); paper_shifted ->
// T_j = j - 1 (first dichotomizer weight zero).
std::vector<double> predefined_weights(int columns, WeightingKind kind);

// Holdout NDCG per column, averaged over split repetitions. Fresh rankers
// are trained per (column, repetition) on the train part's subproblem and
// scored on the binary-relabeled holdout. Columns degenerate on the full
// dataset get 0; repetitions without a trainable train part or a two-class
// holdout are excluded from the mean.
std::vector<double> adaptive_weights(const Dataset& d, const CodingMatrix& coding,
                                     const TrainConfig& cfg, const SplitSpec& split,
                                     int threads = 1,
                                     std::vector<std::string>* warnings = nullptr);

// lpc columns weighted by the product of empirical rating frequencies of
// their pair.
std::vector<double> lpc_prior_weights(const Dataset& d, const CodingMatrix& coding);

struct MultiRankModel {
  CodingMatrix coding;
  std::vector<std::optional<BipartiteRanker>> rankers;  // nullopt = skipped column
  std::vector<double> weights;                          // exactly 0 for skipped
  TrainConfig config;
  WeightingKind weighting = WeightingKind::linear;
  double holdout_fraction = 1.0 / 3.0;
  int holdout_repetitions = 3;
  std::uint64_t seed = 0;
  std::int32_t feature_dimension = 0;
};

struct ColumnStats {
  std::size_t pos_count = 0;
  std::size_t neg_count = 0;
  int rounds = 0;
  double first_r = 0.0;
  double last_r = 0.0;
  bool skipped = false;
};

struct MultiTrainReport {
  std::vector<ColumnStats> columns;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

// End-to-end training: coding matrix, one RankBoost dichotomizer per
// non-degenerate column, fusion weights per scheme. Deterministic in seed;
// independent of the thread count.
MultiRankModel train_multirank(const Dataset& d, CodingScheme scheme, const TrainConfig& cfg,
                               const WeightingScheme& weighting, std::uint64_t seed,
                               int threads = 1, MultiTrainReport* report = nullptr);

// H(x) = sum over non-skipped columns of T_j * f_j(x).
double fuse_score(const MultiRankModel& m, const Instance& x);

// Fused scores for the whole dataset, stable-sorted descending (ties keep
// input order).
ScoredList rank_dataset(const MultiRankModel& m, const Dataset& d);

// Fused scores in dataset order (no sort); used by evaluation.
ScoredList score_list(const MultiRankModel& m, const Dataset& d);

}  // namespace multirank
