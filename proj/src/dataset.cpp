#include "multirank/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "multirank/errors.hpp"
#include "multirank/rng.hpp"

namespace multirank {

const double* Instance::find(std::int32_t feature) const {
  auto it = std::lower_bound(features.begin(), features.end(), feature,
                             [](const auto& fv, std::int32_t f) { return fv.first < f; });
  if (it == features.end() || it->first != feature) return nullptr;
  return &it->second;
}

bool Instance::same_features(const Instance& other) const {
  if (features.size() != other.features.size()) return false;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].first != other.features[i].first) return false;
    if (features[i].second != other.features[i].second) return false;
  }
  return true;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_ratings), 0);
  for (const Instance& inst : instances) {
    if (inst.rating < 0 || inst.rating >= num_ratings) {
      throw InternalError("instance rating " + std::to_string(inst.rating) +
                          " outside [0, " + std::to_string(num_ratings - 1) + "]");
    }
    ++counts[static_cast<std::size_t>(inst.rating)];
  }
  return counts;
}

int Dataset::distinct_ratings() const {
  auto counts = class_counts();
  int distinct = 0;
  for (std::size_t c : counts) {
    if (c > 0) ++distinct;
  }
  return distinct;
}

namespace {

[[noreturn]] void parse_fail(std::size_t lineno, const std::string& message) {
  throw DataError("line " + std::to_string(lineno) + ": " + message);
}

bool parse_int(const std::string& tok, long long& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

bool parse_double(const char* begin, const char* end, double& out) {
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Dataset parse_dataset(std::istream& in, std::optional<int> expected_num_ratings) {
  if (expected_num_ratings && *expected_num_ratings < 2) {
    throw UsageError("expected number of ratings must be >= 2");
  }
  Dataset d;
  std::string line;
  std::size_t lineno = 0;
  int max_rating = -1;
  std::int32_t max_feature = 0;
  std::unordered_set<std::string> seen_ids;

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;  // blank or comment-only line

    Instance inst;
    if (tok.rfind("id:", 0) == 0) {
      inst.id = tok.substr(3);
      if (inst.id.empty()) parse_fail(lineno, "empty id");
      if (!(tokens >> tok)) parse_fail(lineno, "missing rating after id");
    } else {
      inst.id = std::to_string(lineno);
    }

    long long rating = 0;
    if (!parse_int(tok, rating)) parse_fail(lineno, "malformed rating '" + tok + "'");
    if (rating < 0) parse_fail(lineno, "rating " + std::to_string(rating) + " is negative");
    if (rating > 1000000) parse_fail(lineno, "rating " + std::to_string(rating) + " is implausibly large");
    if (expected_num_ratings && rating >= *expected_num_ratings) {
      parse_fail(lineno, "rating " + std::to_string(rating) + " outside [0, " +
                             std::to_string(*expected_num_ratings - 1) + "]");
    }
    inst.rating = static_cast<int>(rating);

    while (tokens >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
        parse_fail(lineno, "malformed feature '" + tok + "'");
      }
      long long idx = 0;
      if (!parse_int(tok.substr(0, colon), idx) || idx < 1 ||
          idx > std::numeric_limits<std::int32_t>::max()) {
        parse_fail(lineno, "feature index must be a positive 32-bit integer in '" + tok + "'");
      }
      double value = 0.0;
      if (!parse_double(tok.data() + colon + 1, tok.data() + tok.size(), value)) {
        parse_fail(lineno, "malformed feature value in '" + tok + "'");
      }
      if (!std::isfinite(value)) parse_fail(lineno, "non-finite feature value in '" + tok + "'");
      inst.features.emplace_back(static_cast<std::int32_t>(idx), value);
    }

    std::sort(inst.features.begin(), inst.features.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < inst.features.size(); ++i) {
      if (inst.features[i].first == inst.features[i - 1].first) {
        parse_fail(lineno, "duplicate feature index " + std::to_string(inst.features[i].first));
      }
    }

    if (!seen_ids.insert(inst.id).second) parse_fail(lineno, "duplicate id '" + inst.id + "'");
    if (!inst.features.empty()) max_feature = std::max(max_feature, inst.features.back().first);
    max_rating = std::max(max_rating, inst.rating);
    d.instances.push_back(std::move(inst));
  }

  if (d.instances.empty()) throw DataError("empty dataset");
  d.num_ratings = expected_num_ratings ? *expected_num_ratings : std::max(2, max_rating + 1);
  d.feature_dimension = max_feature;
  return d;
}

Dataset parse_dataset_file(const std::string& path, std::optional<int> expected_num_ratings) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_dataset(in, expected_num_ratings);
}

void serialize_dataset(const Dataset& d, std::ostream& out) {
  for (const Instance& inst : d.instances) {
    out << "id:" << inst.id << ' ' << inst.rating;
    for (const auto& [idx, value] : inst.features) {
      out << ' ' << idx << ':' << format_double(value);
    }
    out << '\n';
  }
}

namespace {

std::size_t feature_hash(const Instance& inst) {
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (const auto& [idx, value] : inst.features) {
    mix(static_cast<std::uint64_t>(idx));
    double canon = value == 0.0 ? 0.0 : value;  // -0.0 compares equal to 0.0
    std::uint64_t bits;
    std::memcpy(&bits, &canon, sizeof(bits));
    mix(bits);
  }
  return h;
}

}  // namespace

Dataset deduplicate(const Dataset& d) {
  Dataset out;
  out.num_ratings = d.num_ratings;
  out.feature_dimension = d.feature_dimension;
  out.instances.reserve(d.instances.size());

  std::unordered_map<std::size_t, std::vector<std::size_t>> buckets;
  for (const Instance& inst : d.instances) {
    auto& bucket = buckets[feature_hash(inst)];
    bool merged = false;
    for (std::size_t kept : bucket) {
      if (out.instances[kept].same_features(inst)) {
        out.instances[kept].rating = std::max(out.instances[kept].rating, inst.rating);
        merged = true;
        break;
      }
    }
    if (!merged) {
      bucket.push_back(out.instances.size());
      out.instances.push_back(inst);
    }
  }
  return out;
}

HoldoutSplit split_holdout(const Dataset& d, const SplitSpec& spec, int repetition_index) {
  if (!(spec.holdout_fraction > 0.0 && spec.holdout_fraction < 1.0)) {
    throw UsageError("holdout fraction must lie strictly between 0 and 1");
  }
  if (spec.repetitions < 1) throw UsageError("repetitions must be >= 1");
  if (repetition_index < 0 || repetition_index >= spec.repetitions) {
    throw UsageError("repetition index " + std::to_string(repetition_index) + " outside [0, " +
                     std::to_string(spec.repetitions) + ")");
  }
  if (d.instances.empty()) throw DataError("cannot split an empty dataset");

  std::vector<std::vector<std::size_t>> classes(static_cast<std::size_t>(d.num_ratings));
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    int r = d.instances[i].rating;
    if (r < 0 || r >= d.num_ratings) throw InternalError("rating outside the declared range");
    classes[static_cast<std::size_t>(r)].push_back(i);
  }

  HoldoutSplit result;
  DetRng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(repetition_index)));
  std::vector<std::uint8_t> in_holdout(d.instances.size(), 0);

  for (int r = 0; r < d.num_ratings; ++r) {
    auto& members = classes[static_cast<std::size_t>(r)];
    if (members.empty()) continue;
    if (members.size() < 2) {
      result.warnings.push_back("rating class " + std::to_string(r) +
                                " has fewer than 2 instances; kept entirely in train");
      continue;
    }
    // ceil with a dust guard so 10 * 0.3 stays 3, not 4
    double raw = static_cast<double>(members.size()) * spec.holdout_fraction;
    auto take = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    if (take >= members.size()) take = members.size() - 1;
    std::vector<std::size_t> order = members;
    rng.shuffle(order);
    for (std::size_t i = 0; i < take; ++i) in_holdout[order[i]] = 1;
  }

  result.train.num_ratings = result.holdout.num_ratings = d.num_ratings;
  result.train.feature_dimension = result.holdout.feature_dimension = d.feature_dimension;
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    (in_holdout[i] ? result.holdout : result.train).instances.push_back(d.instances[i]);
  }
  return result;
}

}  // namespace multirank
