#include "multirank/rankboost.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "multirank/errors.hpp"
#include "multirank/kernels.hpp"

namespace multirank {

namespace {
constexpr double kZeroEdge = 1e-12;
constexpr double kClampMargin = 1e-12;

double clamp_edge(double r) {
  const double lim = 1.0 - kClampMargin;
  return std::clamp(r, -lim, lim);
}
}  // namespace

double alpha_from_r(double r) {
  if (!std::isfinite(r)) throw DataError("non-finite edge r");
  double rc = clamp_edge(std::clamp(r, -1.0, 1.0));
  return 0.5 * std::log((1.0 + rc) / (1.0 - rc));
}

BipartiteRanker train_bipartite(std::span<const Instance* const> pos,
                                std::span<const Instance* const> neg, const TrainConfig& cfg,
                                int threads, std::vector<RoundTrace>* trace) {
  if (cfg.num_rounds < 1) throw UsageError("number of rounds must be >= 1");
  if (pos.empty() || neg.empty()) {
    throw DataError("bipartite training needs positives and negatives");
  }

  StumpSearch search(pos, neg, cfg.thresholds);
  if (!search.has_features()) throw DataError("no feature is present on either side");

  const auto& K = kernels::active();
  const std::size_t m = pos.size();
  const std::size_t n = neg.size();

  BipartiteRanker model;
  model.feature_dimension = search.max_feature();
  model.rounds.reserve(static_cast<std::size_t>(cfg.num_rounds));

  // Factorized pair distribution: D(i,j) = v_i * w_j with (sum v)(sum w) = 1.
  std::vector<double> v(m, 1.0 / static_cast<double>(m));
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<std::uint8_t> pos_h, neg_h;

  for (int t = 0; t < cfg.num_rounds; ++t) {
    StumpSearchResult found = search.best(v, w, threads);
    if (cfg.early_stop_on_zero_r && !found.useful()) break;

    double rc = clamp_edge(found.r);
    double alpha = alpha_from_r(found.r);

    search.eval_side(true, found.stump, pos_h);
    search.eval_side(false, found.stump, neg_h);
    K.scale_where(v.data(), pos_h.data(), m, std::exp(-alpha));
    K.scale_where(w.data(), neg_h.data(), n, std::exp(alpha));

    double sv = K.reduce_sum(v.data(), m);
    double sw = K.reduce_sum(w.data(), n);
    double z_realized = sv * sw;  // (sum v)(sum w) was 1 before the update
    K.scale(v.data(), m, 1.0 / sv);
    K.scale(w.data(), n, 1.0 / sw);

    model.rounds.push_back(BoostRound{found.stump, alpha, found.r,
                                      std::sqrt(1.0 - rc * rc), z_realized});
    if (trace) trace->push_back(RoundTrace{v, w});
  }
  return model;
}

BipartiteRanker pairwise_reference_train(std::span<const Instance* const> pos,
                                         std::span<const Instance* const> neg,
                                         const TrainConfig& cfg,
                                         std::vector<PairwiseTrace>* trace) {
  if (cfg.num_rounds < 1) throw UsageError("number of rounds must be >= 1");
  if (pos.empty() || neg.empty()) {
    throw DataError("bipartite training needs positives and negatives");
  }

  StumpSearch search(pos, neg, cfg.thresholds);
  if (!search.has_features()) throw DataError("no feature is present on either side");

  const std::size_t m = pos.size();
  const std::size_t n = neg.size();

  BipartiteRanker model;
  model.feature_dimension = search.max_feature();

  std::vector<double> matrix(m * n, 1.0 / static_cast<double>(m * n));
  std::vector<double> row_sums(m), col_sums(n);

  for (int t = 0; t < cfg.num_rounds; ++t) {
    // The update factors per side, so the matrix stays rank-1 and its
    // marginals are exactly the distribution the weak learner needs.
    std::fill(row_sums.begin(), row_sums.end(), 0.0);
    std::fill(col_sums.begin(), col_sums.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = matrix.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        row_sums[i] += row[j];
        col_sums[j] += row[j];
      }
    }

    StumpSearchResult found = search.best(row_sums, col_sums, 1);
    if (cfg.early_stop_on_zero_r && !found.useful()) break;

    // Explicit pairwise edge of the chosen stump; the independent route.
    std::vector<int> hp(m), hn(n);
    for (std::size_t i = 0; i < m; ++i) hp[i] = eval_stump(found.stump, *pos[i]);
    for (std::size_t j = 0; j < n; ++j) hn[j] = eval_stump(found.stump, *neg[j]);
    double r = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = matrix.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        r += row[j] * static_cast<double>(hp[i] - hn[j]);
      }
    }

    double rc = clamp_edge(std::clamp(r, -1.0, 1.0));
    double alpha = alpha_from_r(r);

    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double* row = matrix.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] *= std::exp(-alpha * static_cast<double>(hp[i] - hn[j]));
        z += row[j];
      }
    }
    for (double& cell : matrix) cell /= z;

    model.rounds.push_back(BoostRound{found.stump, alpha, r, std::sqrt(1.0 - rc * rc), z});
    if (trace) trace->push_back(PairwiseTrace{matrix});
  }
  return model;
}

double score(const BipartiteRanker& m, const Instance& x) {
  double sum = 0.0;
  for (const BoostRound& round : m.rounds) {
    if (eval_stump(round.stump, x) == 1) sum += round.alpha;
  }
  return sum;
}

std::vector<double> score_dataset(const BipartiteRanker& m,
                                  std::span<const Instance* const> instances) {
  const auto& K = kernels::active();
  const std::size_t n = instances.size();
  std::vector<double> scores(n, 0.0);
  if (m.rounds.empty() || n == 0) return scores;

  struct DenseColumn {
    std::vector<double> values;
    std::vector<std::uint8_t> present;
  };
  std::unordered_map<std::int32_t, DenseColumn> columns;
  std::vector<std::uint8_t> fired(n);

  // Round order matters: accumulation must match score() bit-for-bit.
  for (const BoostRound& round : m.rounds) {
    auto [it, fresh] = columns.try_emplace(round.stump.feature);
    DenseColumn& col = it->second;
    if (fresh) {
      col.values.assign(n, 0.0);
      col.present.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (const double* v = instances[i]->find(round.stump.feature)) {
          col.values[i] = *v;
          col.present[i] = 1;
        }
      }
    }
    K.threshold_ge(col.values.data(), col.present.data(), n, round.stump.threshold,
                   static_cast<std::uint8_t>(round.stump.default_output), fired.data());
    K.axpy_where(scores.data(), fired.data(), n, round.alpha);
  }
  return scores;
}

}  // namespace multirank
