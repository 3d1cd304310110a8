#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multirank/dataset.hpp"
#include "multirank/ensemble.hpp"
#include "multirank/errors.hpp"
#include "multirank/kernels.hpp"
#include "multirank/metrics.hpp"
#include "multirank/model_io.hpp"

namespace {

using namespace multirank;

ThresholdPolicy parse_threshold_flag(const std::string& text) {
  if (text == "all") return ThresholdPolicy::all();
  int n = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), n);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || n < 1) {
    throw UsageError("--thresholds expects 'all' or a positive integer, got '" + text + "'");
  }
  return ThresholdPolicy::quantiles(n);
}

std::string format_score(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fixed4(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << v;
  return out.str();
}

struct TrainFlags {
  std::string data;
  std::string out;
  std::string coding = "binary";
  std::string weights = "linear";
  int rounds = 100;
  std::string thresholds = "all";
  std::uint64_t seed = 1;
  bool dedup = true;
  double holdout_frac = 1.0 / 3.0;
  int holdout_reps = 3;
  int threads = 1;
};

int run_train(const TrainFlags& flags) {
  if (!(flags.holdout_frac > 0.0 && flags.holdout_frac < 1.0)) {
    throw UsageError("--holdout-frac must lie strictly between 0 and 1");
  }
  CodingScheme scheme = coding_scheme_from_name(flags.coding);
  WeightingScheme weighting;
  weighting.kind = weighting_kind_from_name(flags.weights);
  weighting.split.holdout_fraction = flags.holdout_frac;
  weighting.split.repetitions = flags.holdout_reps;

  TrainConfig cfg;
  cfg.num_rounds = flags.rounds;
  cfg.thresholds = parse_threshold_flag(flags.thresholds);

  Dataset data = parse_dataset_file(flags.data);
  std::size_t before = data.size();
  if (flags.dedup) {
    data = deduplicate(data);
    if (data.size() != before) {
      std::cerr << "dedup: collapsed " << before - data.size() << " duplicate instance(s)\n";
    }
  }

  MultiTrainReport report;
  MultiRankModel model =
      train_multirank(data, scheme, cfg, weighting, flags.seed, flags.threads, &report);
  save_model(model, flags.out);

  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";

  std::cout << "trained " << model.coding.columns << " column(s) on " << data.size()
            << " instances (L=" << data.num_ratings << ", kernel "
            << kernels::active().name << ")\n";
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    const ColumnStats& cs = report.columns[c];
    std::cout << "column " << c << ": ";
    if (cs.skipped) {
      std::cout << "skipped (pos=" << cs.pos_count << " neg=" << cs.neg_count << ")\n";
      continue;
    }
    std::cout << "rounds=" << cs.rounds << " pos=" << cs.pos_count << " neg=" << cs.neg_count;
    if (cs.rounds > 0) {
      std::cout << " r_first=" << fixed4(cs.first_r) << " r_last=" << fixed4(cs.last_r);
    }
    std::cout << "\n";
  }
  std::cout << "weights:";
  for (double w : model.weights) std::cout << ' ' << format_score(w);
  std::cout << "\nwall_seconds\t" << fixed4(report.seconds) << "\n";
  std::cout << "model written to " << flags.out << "\n";
  return 0;
}

int run_rank(const std::string& model_path, const std::string& data_path,
             const std::string& out_path) {
  MultiRankModel model = load_model(model_path);
  Dataset data = parse_dataset_file(data_path);
  if (data.feature_dimension > model.feature_dimension) {
    std::cerr << "warning: data has features up to " << data.feature_dimension
              << "; the model was trained on " << model.feature_dimension
              << " and ignores the extras\n";
  }

  ScoredList ranked = rank_dataset(model, data);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (out_path != "-") {
    file.open(out_path, std::ios::binary);
    if (!file) throw DataError("cannot write '" + out_path + "'");
    out = &file;
  }
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    *out << i + 1 << ' ' << ranked[i].id << ' ' << format_score(ranked[i].score) << ' '
         << ranked[i].rating << '\n';
  }
  if (!*out) throw DataError("failed writing '" + out_path + "'");
  return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path,
             const std::string& metrics_flag) {
  MultiRankModel model = load_model(model_path);
  Dataset data = parse_dataset_file(data_path);

  std::vector<std::string> wanted;
  std::stringstream splitter(metrics_flag);
  std::string item;
  while (std::getline(splitter, item, ',')) {
    if (!item.empty()) wanted.push_back(item);
  }
  if (wanted.empty()) throw UsageError("--metrics needs at least one of ndcg,cindex,auc");

  ScoredList scored = score_list(model, data);
  for (const std::string& name : wanted) {
    if (name == "ndcg") {
      std::cout << "ndcg\t" << fixed4(ndcg(scored)) << "\n";
    } else if (name == "cindex") {
      std::cout << "cindex\t" << fixed4(c_index_error(scored, data.num_ratings)) << "\n";
    } else if (name == "auc") {
      if (data.distinct_ratings() > 2) {
        throw UsageError("auc requires bipartite data (got more than 2 distinct ratings)");
      }
      std::cout << "auc\t" << fixed4(auc(scored)) << "\n";
    } else {
      throw UsageError("unknown metric '" + name + "' (expected ndcg, cindex or auc)");
    }
  }
  return 0;
}

int run_coding_show(int num_ratings, const std::string& scheme_name) {
  CodingMatrix m = build_coding_matrix(num_ratings, coding_scheme_from_name(scheme_name));
  print_coding_matrix(m, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multipartite ranking: coded bipartite RankBoost with score fusion"};
  app.require_subcommand(1);

  std::string kernel = "auto";
  app.add_option("--kernel", kernel, "kernel table: auto, scalar or avx2")
      ->capture_default_str();

  TrainFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "train a model");
  train->add_option("--data", train_flags.data, "training data file")->required();
  train->add_option("--out", train_flags.out, "model output path")->required();
  train->add_option("--coding", train_flags.coding, "binary, ternary-upper, ternary-lower or lpc")
      ->capture_default_str();
  train->add_option("--weights", train_flags.weights,
                    "uniform, linear, paper, adaptive or lpc-prior")
      ->capture_default_str();
  train->add_option("--rounds", train_flags.rounds, "boosting rounds per column")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train->add_option("--thresholds", train_flags.thresholds, "'all' or a candidate count")
      ->capture_default_str();
  train->add_option("--seed", train_flags.seed, "RNG seed")->capture_default_str();
  train->add_flag("--dedup,!--no-dedup", train_flags.dedup,
                  "collapse duplicate-feature instances to the max rating");
  train->add_option("--holdout-frac", train_flags.holdout_frac,
                    "holdout fraction for adaptive weighting")
      ->capture_default_str();
  train->add_option("--holdout-reps", train_flags.holdout_reps,
                    "holdout repetitions for adaptive weighting")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train->add_option("--threads", train_flags.threads, "worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  std::string rank_model, rank_data, rank_out;
  CLI::App* rank = app.add_subcommand("rank", "rank a dataset with a trained model");
  rank->add_option("--model", rank_model, "model file")->required();
  rank->add_option("--data", rank_data, "data file")->required();
  rank->add_option("--out", rank_out, "output path ('-' for stdout)")->required();

  std::string eval_model, eval_data, eval_metrics = "ndcg,cindex";
  CLI::App* eval = app.add_subcommand("eval", "evaluate a trained model on labeled data");
  eval->add_option("--model", eval_model, "model file")->required();
  eval->add_option("--data", eval_data, "labeled data file")->required();
  eval->add_option("--metrics", eval_metrics, "comma list from ndcg,cindex,auc")
      ->capture_default_str();

  int coding_L = 0;
  std::string coding_scheme;
  CLI::App* coding = app.add_subcommand("coding", "coding matrix utilities");
  coding->require_subcommand(1);
  CLI::App* coding_show = coding->add_subcommand("show", "print a coding matrix");
  coding_show->add_option("--L", coding_L, "number of ratings")->required();
  coding_show->add_option("--scheme", coding_scheme,
                          "binary, ternary-upper, ternary-lower or lpc")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    multirank::kernels::force(kernel);
    if (*train) return run_train(train_flags);
    if (*rank) return run_rank(rank_model, rank_data, rank_out);
    if (*eval) return run_eval(eval_model, eval_data, eval_metrics);
    if (*coding_show) return run_coding_show(coding_L, coding_scheme);
    throw multirank::UsageError("no subcommand selected");
  } catch (const multirank::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const multirank::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
