#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "multirank/dataset.hpp"
#include "multirank/stump.hpp"

namespace multirank {

struct BoostRound {
  Stump stump;
  double alpha = 0.0;
  double r = 0.0;
  double z_bound = 1.0;     // sqrt(1 - r^2), r clamped away from +-1
  double z_realized = 1.0;  // measured normalizer of the round
};

struct BipartiteRanker {
  std::vector<BoostRound> rounds;
  std::int32_t feature_dimension = 0;
};

struct TrainConfig {
  int num_rounds = 100;
  ThresholdPolicy thresholds = ThresholdPolicy::all();
  bool early_stop_on_zero_r = true;
};

// 0.5 * ln((1+r)/(1-r)) with |r| clamped to 1 - 1e-12 so separable data
// yields a finite alpha.
double alpha_from_r(double r);

// Per-round weight snapshots for distribution-equality tests.
struct RoundTrace {
  std::vector<double> pos_weights;
  std::vector<double> neg_weights;
};

// Factorized RankBoost: v over positives, w over negatives, jointly
// normalized so (sum v)(sum w) = 1. Each round multiplies v by e^{-alpha h}
// and w by e^{+alpha h}, renormalizes, and records the realized normalizer.
BipartiteRanker train_bipartite(std::span<const Instance* const> pos,
                                std::span<const Instance* const> neg,
                                const TrainConfig& cfg, int threads = 1,
                                std::vector<RoundTrace>* trace = nullptr);

// Reference trainer maintaining the explicit m x n pair matrix; the weak
// learner sees the matrix's row/column marginals (exact for the separable
// update). Alphas come from the explicit pairwise edge. O(mn) per round.
struct PairwiseTrace {
  std::vector<double> matrix;  // row-major m x n, post-normalization
};

BipartiteRanker pairwise_reference_train(std::span<const Instance* const> pos,
                                         std::span<const Instance* const> neg,
                                         const TrainConfig& cfg,
                                         std::vector<PairwiseTrace>* trace = nullptr);

double score(const BipartiteRanker& m, const Instance& x);

// Batch scoring through the dense-column kernels; accumulates in round order
// so results are bit-identical to score() per instance.
std::vector<double> score_dataset(const BipartiteRanker& m,
                                  std::span<const Instance* const> instances);

}  // namespace multirank
