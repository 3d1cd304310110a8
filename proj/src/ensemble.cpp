#include "multirank/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>

#include "multirank/errors.hpp"
#include "multirank/parallel.hpp"
#include "multirank/rng.hpp"

namespace multirank {

std::string weighting_kind_name(WeightingKind k) {
  switch (k) {
    case WeightingKind::uniform: return "uniform";
    case WeightingKind::linear: return "linear";
    case WeightingKind::paper_shifted: return "paper";
    case WeightingKind::adaptive: return "adaptive";
    case WeightingKind::lpc_prior: return "lpc-prior";
  }
  throw InternalError("unreachable weighting kind");
}

WeightingKind weighting_kind_from_name(const std::string& name) {
  if (name == "uniform") return WeightingKind::uniform;
  if (name == "linear") return WeightingKind::linear;
  if (name == "paper") return WeightingKind::paper_shifted;
  if (name == "adaptive") return WeightingKind::adaptive;
  if (name == "lpc-prior") return WeightingKind::lpc_prior;
  throw UsageError("unknown weighting '" + name + "'");
}

std::vector<double> predefined_weights(int columns, WeightingKind kind) {
  if (columns < 1) throw UsageError("need at least one column");
  std::vector<double> weights(static_cast<std::size_t>(columns));
  for (int j = 1; j <= columns; ++j) {
    double t = 0.0;
    switch (kind) {
      case WeightingKind::uniform: t = 1.0; break;
      case WeightingKind::linear: t = static_cast<double>(j); break;
      case WeightingKind::paper_shifted: t = static_cast<double>(j - 1); break;
      default:
        throw UsageError("predefined_weights only handles uniform, linear and paper");
    }
    weights[static_cast<std::size_t>(j - 1)] = t;
  }
  return weights;
}

namespace {

// Holdout instances of one column, relabeled to {0, 1}, scored by the
// repetition's ranker. Order follows the holdout dataset for stable ties.
ScoredList binary_holdout_list(const Dataset& holdout, const CodingMatrix& coding, int column,
                               const BipartiteRanker& ranker) {
  ScoredList list;
  for (const Instance& inst : holdout.instances) {
    std::int8_t e = coding.at(inst.rating, column);
    if (e == -1) continue;
    list.push_back(ScoredEntry{inst.id, score(ranker, inst), e == 1 ? 1 : 0});
  }
  return list;
}

}  // namespace

std::vector<double> adaptive_weights(const Dataset& d, const CodingMatrix& coding,
                                     const TrainConfig& cfg, const SplitSpec& split,
                                     int threads, std::vector<std::string>* warnings) {
  const int k = coding.columns;
  const int reps = split.repetitions;
  if (reps < 1) throw UsageError("adaptive weighting needs repetitions >= 1");

  struct Cell {
    bool usable = false;
    double ndcg_value = 0.0;
  };
  std::vector<Cell> grid(static_cast<std::size_t>(k) * reps);
  std::vector<std::string> notes;
  std::mutex notes_mu;

  parallel_for(grid.size(), threads, [&](std::size_t task) {
    int column = static_cast<int>(task) / reps;
    int rep = static_cast<int>(task) % reps;

    SplitSpec column_split = split;
    column_split.seed = mix_seed(split.seed, static_cast<std::uint64_t>(column));
    HoldoutSplit hs = split_holdout(d, column_split, rep);

    ColumnSplit train_side = column_dataset(hs.train, coding, column);
    if (train_side.degenerate()) {
      std::lock_guard<std::mutex> lock(notes_mu);
      notes.push_back("column " + std::to_string(column) + " repetition " + std::to_string(rep) +
                      ": train side degenerate, repetition excluded");
      return;
    }
    BipartiteRanker ranker = train_bipartite(train_side.pos, train_side.neg, cfg, 1);

    ScoredList holdout_list = binary_holdout_list(hs.holdout, coding, column, ranker);
    bool has_pos = false, has_neg = false;
    for (const ScoredEntry& e : holdout_list) {
      (e.rating == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
      std::lock_guard<std::mutex> lock(notes_mu);
      notes.push_back("column " + std::to_string(column) + " repetition " + std::to_string(rep) +
                      ": holdout lacks a class, repetition excluded");
      return;
    }
    grid[task] = Cell{true, ndcg(holdout_list)};
  });

  std::vector<double> weights(static_cast<std::size_t>(k), 0.0);
  bool any_usable = false;
  for (int column = 0; column < k; ++column) {
    double sum = 0.0;
    int used = 0;
    for (int rep = 0; rep < reps; ++rep) {
      const Cell& cell = grid[static_cast<std::size_t>(column) * reps + rep];
      if (cell.usable) {
        sum += cell.ndcg_value;
        ++used;
      }
    }
    if (used > 0) {
      weights[static_cast<std::size_t>(column)] = sum / used;
      any_usable = true;
    }
  }
  if (!any_usable) throw DataError("every column is degenerate under adaptive weighting");

  if (warnings) {
    std::sort(notes.begin(), notes.end());
    warnings->insert(warnings->end(), notes.begin(), notes.end());
  }
  return weights;
}

std::vector<double> lpc_prior_weights(const Dataset& d, const CodingMatrix& coding) {
  if (coding.scheme != CodingScheme::lpc) {
    throw UsageError("lpc-prior weighting requires lpc coding");
  }
  auto counts = d.class_counts();
  const double n = static_cast<double>(d.size());
  std::vector<double> weights(static_cast<std::size_t>(coding.columns), 0.0);
  for (int c = 0; c < coding.columns; ++c) {
    auto [a, b] = coding.pairs[static_cast<std::size_t>(c)];
    double pa = static_cast<double>(counts[static_cast<std::size_t>(a)]) / n;
    double pb = static_cast<double>(counts[static_cast<std::size_t>(b)]) / n;
    weights[static_cast<std::size_t>(c)] = pa * pb;
  }
  return weights;
}

MultiRankModel train_multirank(const Dataset& d, CodingScheme scheme, const TrainConfig& cfg,
                               const WeightingScheme& weighting, std::uint64_t seed,
                               int threads, MultiTrainReport* report) {
  auto started = std::chrono::steady_clock::now();
  if (d.instances.empty()) throw DataError("empty dataset");
  if (d.distinct_ratings() < 2) {
    throw DataError("training needs at least two distinct ratings");
  }
  if (weighting.kind == WeightingKind::lpc_prior && scheme != CodingScheme::lpc) {
    throw UsageError("lpc-prior weighting requires lpc coding");
  }

  MultiRankModel model;
  model.coding = build_coding_matrix(d.num_ratings, scheme);
  model.config = cfg;
  model.weighting = weighting.kind;
  model.holdout_fraction = weighting.split.holdout_fraction;
  model.holdout_repetitions = weighting.split.repetitions;
  model.seed = seed;
  model.feature_dimension = d.feature_dimension;

  const int k = model.coding.columns;
  std::vector<ColumnSplit> columns(static_cast<std::size_t>(k));
  std::vector<std::string> warnings;
  int active_columns = 0;
  for (int c = 0; c < k; ++c) {
    columns[static_cast<std::size_t>(c)] = column_dataset(d, model.coding, c);
    if (columns[static_cast<std::size_t>(c)].degenerate()) {
      warnings.push_back("column " + std::to_string(c) +
                         " is degenerate (a side is empty); skipped with weight 0");
    } else {
      ++active_columns;
    }
  }
  if (active_columns == 0) throw DataError("every coding column is degenerate");

  model.rankers.resize(static_cast<std::size_t>(k));
  std::vector<ColumnStats> stats(static_cast<std::size_t>(k));

  int column_workers = std::min(threads, std::max(1, active_columns));
  int inner_threads = k == 1 ? threads : std::max(1, threads / std::max(1, column_workers));

  parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t c) {
    ColumnStats& cs = stats[c];
    const ColumnSplit& split = columns[c];
    cs.pos_count = split.pos.size();
    cs.neg_count = split.neg.size();
    if (split.degenerate()) {
      cs.skipped = true;
      return;
    }
    BipartiteRanker ranker = train_bipartite(split.pos, split.neg, cfg, inner_threads);
    cs.rounds = static_cast<int>(ranker.rounds.size());
    if (!ranker.rounds.empty()) {
      cs.first_r = ranker.rounds.front().r;
      cs.last_r = ranker.rounds.back().r;
    }
    model.rankers[c] = std::move(ranker);
  });

  switch (weighting.kind) {
    case WeightingKind::uniform:
    case WeightingKind::linear:
    case WeightingKind::paper_shifted:
      model.weights = predefined_weights(k, weighting.kind);
      break;
    case WeightingKind::adaptive: {
      SplitSpec split = weighting.split;
      split.seed = seed;
      model.weights = adaptive_weights(d, model.coding, cfg, split, threads, &warnings);
      break;
    }
    case WeightingKind::lpc_prior:
      model.weights = lpc_prior_weights(d, model.coding);
      break;
  }

  // Skipped columns carry weight exactly 0 regardless of the scheme.
  for (int c = 0; c < k; ++c) {
    if (!model.rankers[static_cast<std::size_t>(c)].has_value()) {
      model.weights[static_cast<std::size_t>(c)] = 0.0;
    }
  }

  if (report) {
    report->columns = std::move(stats);
    report->warnings = std::move(warnings);
    report->seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }
  return model;
}

double fuse_score(const MultiRankModel& m, const Instance& x) {
  double total = 0.0;
  for (std::size_t c = 0; c < m.rankers.size(); ++c) {
    if (!m.rankers[c].has_value()) continue;
    total += m.weights[c] * score(*m.rankers[c], x);
  }
  return total;
}

namespace {

std::vector<double> fused_scores(const MultiRankModel& m, const Dataset& d) {
  std::vector<const Instance*> ptrs;
  ptrs.reserve(d.size());
  for (const Instance& inst : d.instances) ptrs.push_back(&inst);

  std::vector<double> total(d.size(), 0.0);
  for (std::size_t c = 0; c < m.rankers.size(); ++c) {
    if (!m.rankers[c].has_value()) continue;
    std::vector<double> part = score_dataset(*m.rankers[c], ptrs);
    for (std::size_t i = 0; i < total.size(); ++i) {
      total[i] += m.weights[c] * part[i];
    }
  }
  return total;
}

}  // namespace

ScoredList score_list(const MultiRankModel& m, const Dataset& d) {
  if (d.instances.empty()) throw DataError("empty dataset");
  std::vector<double> scores = fused_scores(m, d);
  ScoredList list;
  list.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    list.push_back(ScoredEntry{d.instances[i].id, scores[i], d.instances[i].rating});
  }
  return list;
}

ScoredList rank_dataset(const MultiRankModel& m, const Dataset& d) {
  ScoredList list = score_list(m, d);
  std::stable_sort(list.begin(), list.end(),
                   [](const ScoredEntry& a, const ScoredEntry& b) { return a.score > b.score; });
  return list;
}

}  // namespace multirank
