#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iife/cli.hpp"

namespace {

using iife::cli::RunConfig;

// Flags bound straight onto config fields, so only flags actually given
// override values loaded from --config.
void add_run_options(CLI::App& app, RunConfig& c) {
  app.add_option("--data", c.data, "input CSV");
  app.add_option("--schema", c.schema, "JSON schema {\"columns\": {name: kind}}");
  app.add_option("--target", c.target, "target column");
  app.add_option("--task", c.task, "classification or regression");
  app.add_option("--model", c.model, "lasso or logreg (default by task)");
  app.add_option("--alpha", c.alpha, "Lasso penalty");
  app.add_option("--C", c.C, "logistic inverse regularization");
  app.add_option("--max-model-iterations", c.max_model_iterations);
  app.add_option("--tolerance", c.tolerance);
  app.add_option("-K,--top-k", c.K, "pairs expanded per iteration");
  app.add_option("-P,--patience", c.P, "stop patience (even)");
  app.add_option("--knn-k", c.knn_k);
  app.add_option("--subsample-size", c.subsample_size);
  app.add_option("--split-seed", c.split_seed);
  app.add_option("--seed", c.seed, "algorithm seed (folds, estimator subsamples)");
  app.add_option("--test-fraction", c.test_fraction);
  app.add_option("--folds", c.folds);
  app.add_option("--prefilter-m", c.prefilter_m);
  app.add_option("--max-order", c.max_order);
  app.add_flag("--drop-division-ops", c.drop_division_ops);
  app.add_option("--max-iterations", c.max_iterations);
  app.add_option("--max-cat-card", c.max_cat_card);
  app.add_flag("--tune", c.tune, "grid-tune the model strength before and after");
  app.add_option("--eval-subsample-factor", c.eval_subsample_factor);
  app.add_option("-o,--output", c.output, "report path");
  app.add_option("--features-out", c.features_out, "write fitted features here");
}

// --config must be applied before CLI11 assigns the overriding flags.
RunConfig preload_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return iife::cli::load_config(argv[i + 1]);
    if (arg.rfind("--config=", 0) == 0) return iife::cli::load_config(arg.substr(9));
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interaction-information guided automated feature engineering"};
  app.set_version_flag("--version", IIFE_VERSION);
  app.require_subcommand(1);

  RunConfig config;
  try {
    config = preload_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::string config_path;
  auto* run = app.add_subcommand("run", "engineer features and report test-score change");
  run->add_option("--config", config_path, "JSON config; flags override it");
  add_run_options(*run, config);

  std::string features_path, data_path, output_path;
  auto* transform = app.add_subcommand("transform", "append saved features to a CSV");
  transform->add_option("--features", features_path)->required();
  transform->add_option("--data", data_path)->required();
  transform->add_option("-o,--output", output_path)->required();

  iife::cli::VerifyConfig verify;
  auto* verify_ii = app.add_subcommand("verify-ii", "rank true pairs on synthetic targets");
  verify_ii->add_option("--data", verify.data, "CSV whose numeric columns are used");
  verify_ii->add_option("--rows", verify.n_rows, "synthetic row count");
  verify_ii->add_option("--features", verify.n_features, "synthetic feature count");
  verify_ii->add_option("--seed", verify.seed);
  verify_ii->add_option("--functions", verify.functions, "sum, product, sin, expmax")->delimiter(',');
  verify_ii->add_option("--knn-k", verify.knn_k);
  verify_ii->add_option("--subsample-size", verify.subsample_size);
  verify_ii->add_option("-o,--output", verify.output)->required();

  std::vector<double> factors = {1.0, 5.0};
  auto* bench = app.add_subcommand("expand-reduce-bench", "compare pair filter factors");
  bench->add_option("--config", config_path, "JSON config; flags override it");
  add_run_options(*bench, config);
  bench->add_option("--filter-factors", factors)->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return iife::cli::cmd_run(config, std::cerr);
  if (transform->parsed()) {
    return iife::cli::cmd_transform(features_path, data_path, output_path, std::cerr);
  }
  if (verify_ii->parsed()) return iife::cli::cmd_verify_ii(verify, std::cerr);
  if (bench->parsed()) return iife::cli::cmd_expand_reduce_bench(config, factors, std::cerr);
  return 2;
}
