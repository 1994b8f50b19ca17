#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "iife/downstream.hpp"
#include "iife/engine.hpp"
#include "json.hpp"

namespace iife::cli {

struct RunConfig {
  std::string data;
  std::optional<std::string> schema;
  std::string target;
  std::string task = "regression";
  std::string model;  // empty: chosen by task
  double alpha = 0.001;
  double C = 1.0;
  int max_model_iterations = 1000;
  double tolerance = 1e-6;
  std::size_t K = 3;
  std::size_t P = 20;
  int knn_k = 3;
  std::size_t subsample_size = 3000;
  std::uint64_t split_seed = 0;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  std::size_t folds = 5;
  std::optional<std::size_t> prefilter_m;
  std::optional<std::size_t> max_order;
  bool drop_division_ops = false;
  std::size_t max_iterations = 100;
  std::size_t max_cat_card = 20;
  bool tune = false;
  std::size_t eval_subsample_factor = 1;
  std::string output;
  std::optional<std::string> features_out;

  // Throws std::invalid_argument naming the first bad field.
  void validate() const;

  downstream::ModelSpec model_spec() const;
  engine::EngineConfig engine_config() const;
};

nlohmann::json to_json(const RunConfig& c);
// Overlays the keys present in j onto `base`; unknown keys are fatal.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

// Every command returns 0 iff its complete output was written. Diagnostics go
// to `log`.
int cmd_run(const RunConfig& config, std::ostream& log);

int cmd_transform(const std::string& features_path, const std::string& data_path,
                  const std::string& output_path, std::ostream& log);

struct VerifyConfig {
  std::optional<std::string> data;  // numeric columns of this CSV; synthetic otherwise
  std::size_t n_rows = 3000;
  std::size_t n_features = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> functions = {"sum", "product", "sin", "expmax"};
  int knn_k = 3;
  std::size_t subsample_size = 3000;
  std::string output;
};

// Ranks, histograms and top-20% fractions per target function.
nlohmann::json verify_ii(const VerifyConfig& config);
int cmd_verify_ii(const VerifyConfig& config, std::ostream& log);

int cmd_expand_reduce_bench(const RunConfig& config, const std::vector<double>& filter_factors,
                            std::ostream& log);

// Feature file entries: fitted state plus the imputation means and column
// kinds needed to replay an expression on new rows.
nlohmann::json feature_entry(const features::FittedExpr& fitted, const tabular::Table& train,
                             const tabular::ImputerState& imputer, double cv_score);

}  // namespace iife::cli
