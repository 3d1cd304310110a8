#pragma once

#include <string>

#include "multirank/ensemble.hpp"

namespace multirank {

inline constexpr int kModelFormatVersion = 1;

// Versioned JSON, full round-trip precision on every number; identical
// models serialize to identical bytes.
std::string model_to_json(const MultiRankModel& m);
void save_model(const MultiRankModel& m, const std::string& path);

// Validates the format version first (a newer version raises VersionError,
// not a parse error), then every invariant of the embedded types.
MultiRankModel model_from_json(const std::string& text);
MultiRankModel load_model(const std::string& path);

}  // namespace multirank
