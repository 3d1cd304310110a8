#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace multirank {

// One ranked item: sparse features (1-based indices, sorted) plus an integer
// rating in [0, L-1]. Absent indices are missing features, not zeros; the
// weak ranker has an explicit missing branch.
struct Instance {
  std::string id;
  std::vector<std::pair<std::int32_t, double>> features;  // sorted by index
  int rating = 0;

  // nullptr when the feature is missing
  const double* find(std::int32_t feature) const;

  bool same_features(const Instance& other) const;
};

struct Dataset {
  std::vector<Instance> instances;
  int num_ratings = 2;                  // L
  std::int32_t feature_dimension = 0;   // max observed feature index

  std::size_t size() const { return instances.size(); }
  // |S_i| for ratings 0..L-1; throws InternalError on an out-of-range rating
  std::vector<std::size_t> class_counts() const;
  int distinct_ratings() const;
};

struct SplitSpec {
  double holdout_fraction = 1.0 / 3.0;
  int repetitions = 3;
  std::uint64_t seed = 0;
};

// Line grammar: [id:<string>] <rating> [<idx>:<val>]...
// '#' starts a comment; blank lines are skipped; CRLF tolerated.
Dataset parse_dataset(std::istream& in, std::optional<int> expected_num_ratings = {});
Dataset parse_dataset_file(const std::string& path, std::optional<int> expected_num_ratings = {});

// Full-precision output; parse(serialize(d), d.num_ratings) round-trips
// bit-exactly.
void serialize_dataset(const Dataset& d, std::ostream& out);

// Collapses instances with exactly equal feature maps into one carrying the
// maximum rating; first occurrence keeps its id and position.
Dataset deduplicate(const Dataset& d);

struct HoldoutSplit {
  Dataset train;
  Dataset holdout;
  std::vector<std::string> warnings;
};

// Stratified-by-rating split, deterministic in (spec.seed, repetition_index).
// Holdout takes ceil(|S_i| * fraction) per class, never emptying the train
// side of a class with >= 2 members; singleton classes go entirely to train
// with a warning.
HoldoutSplit split_holdout(const Dataset& d, const SplitSpec& spec, int repetition_index);

}  // namespace multirank
