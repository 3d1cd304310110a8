#include "multirank/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "multirank/errors.hpp"

namespace multirank {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json matrix_to_json(const CodingMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (int l = 0; l < m.num_ratings; ++l) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.columns; ++c) row.push_back(static_cast<int>(m.at(l, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

const ordered_json& require(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("model file: missing field '") + key + "'");
  return *it;
}

int require_int(const ordered_json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number_integer()) {
    throw DataError(std::string("model file: field '") + key + "' must be an integer");
  }
  return v.get<int>();
}

double require_finite(const ordered_json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number()) {
    throw DataError(std::string("model file: field '") + key + "' must be a number");
  }
  double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw DataError(std::string("model file: field '") + key + "' must be finite");
  }
  return d;
}

}  // namespace

std::string model_to_json(const MultiRankModel& m) {
  ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["model_type"] = "multirank";
  j["num_ratings"] = m.coding.num_ratings;
  j["feature_dimension"] = m.feature_dimension;

  ordered_json coding;
  coding["scheme"] = coding_scheme_name(m.coding.scheme);
  coding["matrix"] = matrix_to_json(m.coding);
  if (m.coding.scheme == CodingScheme::lpc) {
    ordered_json pairs = ordered_json::array();
    for (const auto& [a, b] : m.coding.pairs) pairs.push_back(ordered_json::array({a, b}));
    coding["pairs"] = std::move(pairs);
  }
  j["coding"] = std::move(coding);

  j["weighting"] = weighting_kind_name(m.weighting);

  ordered_json cfg;
  cfg["rounds"] = m.config.num_rounds;
  if (m.config.thresholds.use_all()) {
    cfg["thresholds"] = "all";
  } else {
    cfg["thresholds"] = m.config.thresholds.count;
  }
  cfg["early_stop_on_zero_r"] = m.config.early_stop_on_zero_r;
  cfg["seed"] = m.seed;
  cfg["holdout_fraction"] = m.holdout_fraction;
  cfg["holdout_repetitions"] = m.holdout_repetitions;
  j["train_config"] = std::move(cfg);

  ordered_json columns = ordered_json::array();
  for (std::size_t c = 0; c < m.rankers.size(); ++c) {
    ordered_json col;
    col["skipped"] = !m.rankers[c].has_value();
    col["weight"] = m.weights[c];
    ordered_json rounds = ordered_json::array();
    if (m.rankers[c].has_value()) {
      for (const BoostRound& round : m.rankers[c]->rounds) {
        ordered_json r;
        r["feature"] = round.stump.feature;
        r["threshold"] = round.stump.threshold;
        r["r0"] = round.stump.default_output;
        r["alpha"] = round.alpha;
        rounds.push_back(std::move(r));
      }
    }
    col["rounds"] = std::move(rounds);
    columns.push_back(std::move(col));
  }
  j["columns"] = std::move(columns);

  return j.dump(2) + "\n";
}

void save_model(const MultiRankModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << model_to_json(m);
  if (!out) throw DataError("failed writing '" + path + "'");
}

namespace {
MultiRankModel decode_model(const ordered_json& j);
}

MultiRankModel model_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file: parse error: ") + e.what());
  }
  if (!j.is_object()) throw DataError("model file: top level must be an object");

  // Version gate first: a newer format is a version error, not a parse error.
  int version = require_int(j, "format_version");
  if (version != kModelFormatVersion) {
    throw VersionError("model file: format_version " + std::to_string(version) +
                       " is not supported (this build reads " +
                       std::to_string(kModelFormatVersion) + ")");
  }

  try {
    return decode_model(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file: malformed field: ") + e.what());
  }
}

namespace {

MultiRankModel decode_model(const ordered_json& j) {
  MultiRankModel m;
  int num_ratings = require_int(j, "num_ratings");
  if (num_ratings < 2) throw DataError("model file: num_ratings must be >= 2");
  int feature_dimension = require_int(j, "feature_dimension");
  if (feature_dimension < 0) throw DataError("model file: negative feature_dimension");
  m.feature_dimension = feature_dimension;

  const auto& coding = require(j, "coding");
  CodingScheme scheme;
  try {
    scheme = coding_scheme_from_name(require(coding, "scheme").get<std::string>());
  } catch (const UsageError& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  m.coding = build_coding_matrix(num_ratings, scheme);

  // The stored matrix is redundant with (scheme, L); verifying it equal
  // catches corrupted or hand-edited files.
  const auto& rows = require(coding, "matrix");
  if (!rows.is_array() || static_cast<int>(rows.size()) != num_ratings) {
    throw DataError("model file: coding matrix must have one row per rating");
  }
  for (int l = 0; l < num_ratings; ++l) {
    const auto& row = rows[static_cast<std::size_t>(l)];
    if (!row.is_array() || static_cast<int>(row.size()) != m.coding.columns) {
      throw DataError("model file: coding matrix row has the wrong width");
    }
    for (int c = 0; c < m.coding.columns; ++c) {
      int e = row[static_cast<std::size_t>(c)].get<int>();
      if (e != m.coding.at(l, c)) {
        throw DataError("model file: coding matrix disagrees with its scheme");
      }
    }
  }

  try {
    m.weighting = weighting_kind_from_name(require(j, "weighting").get<std::string>());
  } catch (const UsageError& e) {
    throw DataError(std::string("model file: ") + e.what());
  }

  const auto& cfg = require(j, "train_config");
  m.config.num_rounds = require_int(cfg, "rounds");
  if (m.config.num_rounds < 1) throw DataError("model file: rounds must be >= 1");
  const auto& thresholds = require(cfg, "thresholds");
  if (thresholds.is_string() && thresholds.get<std::string>() == "all") {
    m.config.thresholds = ThresholdPolicy::all();
  } else if (thresholds.is_number_integer() && thresholds.get<int>() >= 1) {
    m.config.thresholds = ThresholdPolicy::quantiles(thresholds.get<int>());
  } else {
    throw DataError("model file: thresholds must be \"all\" or a positive integer");
  }
  const auto& early = require(cfg, "early_stop_on_zero_r");
  if (!early.is_boolean()) throw DataError("model file: early_stop_on_zero_r must be a bool");
  m.config.early_stop_on_zero_r = early.get<bool>();
  const auto& seed = require(cfg, "seed");
  if (!seed.is_number_integer() && !seed.is_number_unsigned()) {
    throw DataError("model file: seed must be an integer");
  }
  m.seed = seed.get<std::uint64_t>();
  m.holdout_fraction = require_finite(cfg, "holdout_fraction");
  if (!(m.holdout_fraction > 0.0 && m.holdout_fraction < 1.0)) {
    throw DataError("model file: holdout_fraction outside (0,1)");
  }
  m.holdout_repetitions = require_int(cfg, "holdout_repetitions");
  if (m.holdout_repetitions < 1) throw DataError("model file: holdout_repetitions must be >= 1");

  const auto& columns = require(j, "columns");
  if (!columns.is_array() || static_cast<int>(columns.size()) != m.coding.columns) {
    throw DataError("model file: expected " + std::to_string(m.coding.columns) + " columns");
  }
  m.rankers.resize(columns.size());
  m.weights.resize(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& col = columns[c];
    const auto& skipped = require(col, "skipped");
    if (!skipped.is_boolean()) throw DataError("model file: skipped must be a bool");
    double weight = require_finite(col, "weight");
    if (weight < 0.0) throw DataError("model file: negative column weight");
    m.weights[c] = weight;

    const auto& rounds = require(col, "rounds");
    if (!rounds.is_array()) throw DataError("model file: rounds must be an array");
    if (skipped.get<bool>()) {
      if (weight != 0.0) throw DataError("model file: skipped column with nonzero weight");
      if (!rounds.empty()) throw DataError("model file: skipped column with rounds");
      continue;
    }

    BipartiteRanker ranker;
    ranker.feature_dimension = feature_dimension;
    for (const auto& round : rounds) {
      BoostRound br;
      br.stump.feature = require_int(round, "feature");
      if (br.stump.feature < 1) throw DataError("model file: stump feature must be >= 1");
      br.stump.threshold = require_finite(round, "threshold");
      int r0 = require_int(round, "r0");
      if (r0 != 0 && r0 != 1) throw DataError("model file: r0 must be 0 or 1");
      br.stump.default_output = r0;
      br.alpha = require_finite(round, "alpha");
      ranker.rounds.push_back(br);
    }
    m.rankers[c] = std::move(ranker);
  }
  return m;
}

}  // namespace

MultiRankModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace multirank
