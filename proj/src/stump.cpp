#include "multirank/stump.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "multirank/errors.hpp"
#include "multirank/kernels.hpp"
#include "multirank/parallel.hpp"

namespace multirank {

namespace {
constexpr double kZeroEdge = 1e-12;
}

int eval_stump(const Stump& s, const Instance& x) {
  const double* v = x.find(s.feature);
  if (v == nullptr) return s.default_output;
  return *v >= s.threshold ? 1 : 0;
}

std::vector<double> candidate_thresholds_from_values(std::vector<double> values,
                                                     const ThresholdPolicy& p) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  // Sentinel strictly below the observed minimum keeps the
  // fires-on-every-present-value stump reachable in either mode.
  double low = values.front();
  double sentinel = low - 1.0;
  if (!(sentinel < low)) sentinel = std::nextafter(low, -std::numeric_limits<double>::infinity());

  std::vector<double> picked;
  if (p.use_all()) {
    picked = std::move(values);
  } else {
    // nearest-rank quantiles over the distinct values
    const std::int64_t distinct = static_cast<std::int64_t>(values.size());
    const std::int64_t n = p.count;
    picked.reserve(static_cast<std::size_t>(std::min<std::int64_t>(n, distinct)));
    for (std::int64_t k = 1; k <= n; ++k) {
      std::int64_t rank = (k * distinct + n - 1) / n;  // ceil(k * distinct / n)
      double v = values[static_cast<std::size_t>(rank - 1)];
      if (picked.empty() || picked.back() != v) picked.push_back(v);
    }
  }

  std::vector<double> out;
  out.reserve(picked.size() + 1);
  out.push_back(sentinel);
  out.insert(out.end(), picked.begin(), picked.end());
  return out;
}

std::vector<double> candidate_thresholds(const Dataset& d, std::int32_t feature,
                                         const ThresholdPolicy& p) {
  if (feature < 1 || feature > d.feature_dimension) {
    throw UsageError("feature " + std::to_string(feature) + " outside [1, " +
                     std::to_string(d.feature_dimension) + "]");
  }
  std::vector<double> values;
  for (const Instance& inst : d.instances) {
    if (const double* v = inst.find(feature)) values.push_back(*v);
  }
  return candidate_thresholds_from_values(std::move(values), p);
}

void WeightedBipartiteView::check() const {
  if (pos.size() != pos_weight.size() || neg.size() != neg_weight.size()) {
    throw InternalError("view weight arrays do not match instance lists");
  }
  const auto& K = kernels::active();
  double sv = K.reduce_sum(pos_weight.data(), pos_weight.size());
  double sw = K.reduce_sum(neg_weight.data(), neg_weight.size());
  if (std::fabs(sv * sw - 1.0) > 1e-9) {
    throw InternalError("view violates (sum v)(sum w) = 1");
  }
}

WeightedBipartiteView uniform_view(std::span<const Instance* const> pos,
                                   std::span<const Instance* const> neg) {
  if (pos.empty() || neg.empty()) throw DataError("bipartite view needs both sides non-empty");
  WeightedBipartiteView view;
  view.pos.assign(pos.begin(), pos.end());
  view.neg.assign(neg.begin(), neg.end());
  view.pos_weight.assign(pos.size(), 1.0 / static_cast<double>(pos.size()));
  view.neg_weight.assign(neg.size(), 1.0 / static_cast<double>(neg.size()));
  return view;
}

double edge_r(const Stump& s, const WeightedBipartiteView& view) {
  view.check();
  const auto& K = kernels::active();
  std::vector<std::uint8_t> hp(view.pos.size()), hn(view.neg.size());
  for (std::size_t i = 0; i < view.pos.size(); ++i) {
    hp[i] = static_cast<std::uint8_t>(eval_stump(s, *view.pos[i]));
  }
  for (std::size_t j = 0; j < view.neg.size(); ++j) {
    hn[j] = static_cast<std::uint8_t>(eval_stump(s, *view.neg[j]));
  }
  double vp = K.reduce_sum(view.pos_weight.data(), view.pos_weight.size());
  double wn = K.reduce_sum(view.neg_weight.data(), view.neg_weight.size());
  double vp_h = K.sum_where(view.pos_weight.data(), hp.data(), hp.size());
  double wn_h = K.sum_where(view.neg_weight.data(), hn.data(), hn.size());
  double r = vp_h * wn - vp * wn_h;
  return std::clamp(r, -1.0, 1.0);
}

double edge_r_pairwise(const Stump& s, const WeightedBipartiteView& view) {
  std::vector<int> hp(view.pos.size()), hn(view.neg.size());
  for (std::size_t i = 0; i < view.pos.size(); ++i) hp[i] = eval_stump(s, *view.pos[i]);
  for (std::size_t j = 0; j < view.neg.size(); ++j) hn[j] = eval_stump(s, *view.neg[j]);
  double r = 0.0;
  for (std::size_t i = 0; i < view.pos.size(); ++i) {
    for (std::size_t j = 0; j < view.neg.size(); ++j) {
      r += view.pos_weight[i] * view.neg_weight[j] * static_cast<double>(hp[i] - hn[j]);
    }
  }
  return r;
}

bool StumpSearchResult::useful() const { return std::fabs(r) >= kZeroEdge; }

// Candidates whose |r| lands within this band of the maximum count as tied
// and resolve lexicographically by (feature, threshold, default_output).
// Mathematically equal candidates evaluate to floats a few ulps apart, and
// which one rounds higher depends on the caller's weight bits; a strict
// argmax would make the winner depend on that noise. True gaps below the
// band do not arise from data (edges are O(1) sums; observed noise is
// ~1e-15, genuine gaps are far above 1e-9).
constexpr double kTieBand = 1e-9;

struct StumpSearch::ChunkBest {
  double abs_r = -1.0;
  double r = 0.0;
  Stump stump;
  bool found = false;
};

StumpSearch::StumpSearch(std::span<const Instance* const> pos,
                         std::span<const Instance* const> neg, const ThresholdPolicy& policy,
                         std::span<const std::int32_t> feature_filter) {
  num_pos_ = pos.size();
  num_neg_ = neg.size();

  std::int32_t max_feature = 0;
  for (const Instance* inst : pos) {
    if (!inst->features.empty()) max_feature = std::max(max_feature, inst->features.back().first);
  }
  for (const Instance* inst : neg) {
    if (!inst->features.empty()) max_feature = std::max(max_feature, inst->features.back().first);
  }
  max_feature_ = max_feature;

  std::unordered_set<std::int32_t> wanted(feature_filter.begin(), feature_filter.end());

  // Bucket (value, slot) pairs per feature, then sort each bucket by value
  // descending (slot ascending on ties) for the suffix-sum sweep. Buckets are
  // keyed by a hash map so sparse high feature indices cost nothing; layouts
  // are materialized in ascending feature order for determinism.
  struct Bucket {
    std::vector<std::pair<double, std::int32_t>> pos;
    std::vector<std::pair<double, std::int32_t>> neg;
  };
  std::unordered_map<std::int32_t, Bucket> buckets;
  for (std::size_t s = 0; s < pos.size(); ++s) {
    for (const auto& [f, v] : pos[s]->features) {
      buckets[f].pos.emplace_back(v, static_cast<std::int32_t>(s));
    }
  }
  for (std::size_t s = 0; s < neg.size(); ++s) {
    for (const auto& [f, v] : neg[s]->features) {
      buckets[f].neg.emplace_back(v, static_cast<std::int32_t>(s));
    }
  }
  std::vector<std::int32_t> feature_ids;
  feature_ids.reserve(buckets.size());
  for (const auto& [f, bucket] : buckets) feature_ids.push_back(f);
  std::sort(feature_ids.begin(), feature_ids.end());

  auto desc = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };

  for (std::int32_t f : feature_ids) {
    auto& p = buckets[f].pos;
    auto& n = buckets[f].neg;
    if (!wanted.empty() && wanted.find(f) == wanted.end()) continue;

    FeatureLayout layout;
    layout.feature = f;
    std::vector<double> values;
    values.reserve(p.size() + n.size());
    for (const auto& [v, s] : p) values.push_back(v);
    for (const auto& [v, s] : n) values.push_back(v);
    layout.candidates = candidate_thresholds_from_values(std::move(values), policy);

    std::sort(p.begin(), p.end(), desc);
    std::sort(n.begin(), n.end(), desc);
    layout.pos_values.reserve(p.size());
    layout.pos_slots.reserve(p.size());
    for (const auto& [v, s] : p) {
      layout.pos_values.push_back(v);
      layout.pos_slots.push_back(s);
    }
    layout.neg_values.reserve(n.size());
    layout.neg_slots.reserve(n.size());
    for (const auto& [v, s] : n) {
      layout.neg_values.push_back(v);
      layout.neg_slots.push_back(s);
    }

    std::vector<std::uint8_t> present(pos.size(), 0);
    for (std::int32_t s : layout.pos_slots) present[static_cast<std::size_t>(s)] = 1;
    for (std::size_t s = 0; s < pos.size(); ++s) {
      if (!present[s]) layout.pos_missing.push_back(static_cast<std::int32_t>(s));
    }
    present.assign(neg.size(), 0);
    for (std::int32_t s : layout.neg_slots) present[static_cast<std::size_t>(s)] = 1;
    for (std::size_t s = 0; s < neg.size(); ++s) {
      if (!present[s]) layout.neg_missing.push_back(static_cast<std::int32_t>(s));
    }

    features_.push_back(std::move(layout));
  }
}

// Fills the per-candidate edge array (r with default_output 0) and the
// missing-mass offset (r with default_output 1 adds it).
double StumpSearch::fill_edges(const FeatureLayout& f, std::span<const double> pos_w,
                               std::span<const double> neg_w, double pos_total, double neg_total,
                               std::vector<double>& scratch) const {
  const std::size_t C = f.candidates.size();
  scratch.resize(3 * C);
  double* vp_above = scratch.data();
  double* wn_above = scratch.data() + C;
  double* edge = scratch.data() + 2 * C;

  // Suffix sums of weight mass at or above each candidate, walking candidates
  // and values downward together.
  double acc = 0.0;
  std::size_t p = 0;
  for (std::size_t ci = C; ci-- > 0;) {
    double theta = f.candidates[ci];
    while (p < f.pos_values.size() && f.pos_values[p] >= theta) {
      acc += pos_w[static_cast<std::size_t>(f.pos_slots[p])];
      ++p;
    }
    vp_above[ci] = acc;
  }
  acc = 0.0;
  std::size_t q = 0;
  for (std::size_t ci = C; ci-- > 0;) {
    double theta = f.candidates[ci];
    while (q < f.neg_values.size() && f.neg_values[q] >= theta) {
      acc += neg_w[static_cast<std::size_t>(f.neg_slots[q])];
      ++q;
    }
    wn_above[ci] = acc;
  }

  const auto& K = kernels::active();
  K.edge_combine(vp_above, wn_above, C, neg_total, pos_total, edge);

  double vp_missing = 0.0;
  for (std::int32_t s : f.pos_missing) vp_missing += pos_w[static_cast<std::size_t>(s)];
  double wn_missing = 0.0;
  for (std::int32_t s : f.neg_missing) wn_missing += neg_w[static_cast<std::size_t>(s)];
  return vp_missing * neg_total - pos_total * wn_missing;
}

StumpSearchResult StumpSearch::best(std::span<const double> pos_w, std::span<const double> neg_w,
                                    int threads) const {
  if (pos_w.size() != num_pos_ || neg_w.size() != num_neg_) {
    throw InternalError("weight arrays do not match the search layout");
  }
  if (features_.empty()) throw DataError("no feature is present on either side");

  const auto& K = kernels::active();
  double pos_total = K.reduce_sum(pos_w.data(), pos_w.size());
  double neg_total = K.reduce_sum(neg_w.data(), neg_w.size());

  std::size_t chunks = 1;
  if (threads > 1) chunks = std::min<std::size_t>(features_.size(), static_cast<std::size_t>(threads));

  // Pass 1: the maximum |r| over the whole hypothesis space.
  std::vector<double> chunk_max(chunks, -1.0);
  auto max_chunk = [&](std::size_t chunk) {
    std::vector<double> scratch;
    std::size_t begin = features_.size() * chunk / chunks;
    std::size_t end = features_.size() * (chunk + 1) / chunks;
    double local = -1.0;
    for (std::size_t i = begin; i < end; ++i) {
      const FeatureLayout& f = features_[i];
      double offset = fill_edges(f, pos_w, neg_w, pos_total, neg_total, scratch);
      const double* edge = scratch.data() + 2 * f.candidates.size();
      for (std::size_t ci = 0; ci < f.candidates.size(); ++ci) {
        local = std::max(local, std::fabs(edge[ci]));
        local = std::max(local, std::fabs(edge[ci] + offset));
      }
    }
    chunk_max[chunk] = local;
  };
  parallel_for(chunks, static_cast<int>(chunks), max_chunk);
  double best_abs = -1.0;
  for (double m : chunk_max) best_abs = std::max(best_abs, m);

  // Pass 2: the lexicographically first candidate inside the tie band.
  const double cutoff = best_abs - kTieBand;
  std::vector<ChunkBest> picks(chunks);
  auto pick_chunk = [&](std::size_t chunk) {
    std::vector<double> scratch;
    std::size_t begin = features_.size() * chunk / chunks;
    std::size_t end = features_.size() * (chunk + 1) / chunks;
    for (std::size_t i = begin; i < end && !picks[chunk].found; ++i) {
      const FeatureLayout& f = features_[i];
      double offset = fill_edges(f, pos_w, neg_w, pos_total, neg_total, scratch);
      const double* edge = scratch.data() + 2 * f.candidates.size();
      for (std::size_t ci = 0; ci < f.candidates.size(); ++ci) {
        double r0v = edge[ci];
        if (std::fabs(r0v) >= cutoff) {
          picks[chunk] = ChunkBest{std::fabs(r0v), r0v, Stump{f.feature, f.candidates[ci], 0},
                                   true};
          break;
        }
        double r1v = edge[ci] + offset;
        if (std::fabs(r1v) >= cutoff) {
          picks[chunk] = ChunkBest{std::fabs(r1v), r1v, Stump{f.feature, f.candidates[ci], 1},
                                   true};
          break;
        }
      }
    }
  };
  parallel_for(chunks, static_cast<int>(chunks), pick_chunk);

  // Chunks cover ascending feature ranges; the first hit is the winner a
  // sequential scan would return.
  for (const ChunkBest& pick : picks) {
    if (!pick.found) continue;
    StumpSearchResult result;
    result.stump = pick.stump;
    result.r = std::clamp(pick.r, -1.0, 1.0);
    return result;
  }
  throw InternalError("stump search found a maximum but no candidate reached it");
}

void StumpSearch::eval_side(bool positive_side, const Stump& s,
                            std::vector<std::uint8_t>& out) const {
  out.assign(positive_side ? num_pos_ : num_neg_, static_cast<std::uint8_t>(s.default_output));
  auto it = std::lower_bound(features_.begin(), features_.end(), s.feature,
                             [](const FeatureLayout& f, std::int32_t id) { return f.feature < id; });
  if (it == features_.end() || it->feature != s.feature) return;
  const auto& values = positive_side ? it->pos_values : it->neg_values;
  const auto& slots = positive_side ? it->pos_slots : it->neg_slots;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[static_cast<std::size_t>(slots[i])] = static_cast<std::uint8_t>(values[i] >= s.threshold);
  }
}

StumpSearchResult best_stump(const WeightedBipartiteView& view,
                             std::span<const std::int32_t> features, const ThresholdPolicy& policy,
                             int threads) {
  if (view.pos.empty() || view.neg.empty()) {
    throw DataError("stump search needs both sides non-empty");
  }
  view.check();
  StumpSearch search(view.pos, view.neg, policy, features);
  return search.best(view.pos_weight, view.neg_weight, threads);
}

}  // namespace multirank
