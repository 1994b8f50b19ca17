#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

#include "iife/cli.hpp"
#include "iife/parallel.hpp"

namespace iife::cli {
namespace {

template <class T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
void read_opt(const nlohmann::json& j, std::optional<T>& out) {
  if (j.is_null()) {
    out.reset();
  } else {
    out = j.get<T>();
  }
}

using Setter = std::function<void(const nlohmann::json&, RunConfig&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"data", [](const nlohmann::json& j, RunConfig& c) { c.data = j.get<std::string>(); }},
      {"schema", [](const nlohmann::json& j, RunConfig& c) { read_opt(j, c.schema); }},
      {"target", [](const nlohmann::json& j, RunConfig& c) { c.target = j.get<std::string>(); }},
      {"task", [](const nlohmann::json& j, RunConfig& c) { c.task = j.get<std::string>(); }},
      {"model", [](const nlohmann::json& j, RunConfig& c) { c.model = j.get<std::string>(); }},
      {"alpha", [](const nlohmann::json& j, RunConfig& c) { c.alpha = j.get<double>(); }},
      {"C", [](const nlohmann::json& j, RunConfig& c) { c.C = j.get<double>(); }},
      {"max_model_iterations",
       [](const nlohmann::json& j, RunConfig& c) { c.max_model_iterations = j.get<int>(); }},
      {"tolerance", [](const nlohmann::json& j, RunConfig& c) { c.tolerance = j.get<double>(); }},
      {"K", [](const nlohmann::json& j, RunConfig& c) { c.K = j.get<std::size_t>(); }},
      {"P", [](const nlohmann::json& j, RunConfig& c) { c.P = j.get<std::size_t>(); }},
      {"knn_k", [](const nlohmann::json& j, RunConfig& c) { c.knn_k = j.get<int>(); }},
      {"subsample_size",
       [](const nlohmann::json& j, RunConfig& c) { c.subsample_size = j.get<std::size_t>(); }},
      {"split_seed", [](const nlohmann::json& j, RunConfig& c) { c.split_seed = j.get<std::uint64_t>(); }},
      {"seed", [](const nlohmann::json& j, RunConfig& c) { c.seed = j.get<std::uint64_t>(); }},
      {"test_fraction", [](const nlohmann::json& j, RunConfig& c) { c.test_fraction = j.get<double>(); }},
      {"folds", [](const nlohmann::json& j, RunConfig& c) { c.folds = j.get<std::size_t>(); }},
      {"prefilter_m", [](const nlohmann::json& j, RunConfig& c) { read_opt(j, c.prefilter_m); }},
      {"max_order", [](const nlohmann::json& j, RunConfig& c) { read_opt(j, c.max_order); }},
      {"drop_division_ops",
       [](const nlohmann::json& j, RunConfig& c) { c.drop_division_ops = j.get<bool>(); }},
      {"max_iterations",
       [](const nlohmann::json& j, RunConfig& c) { c.max_iterations = j.get<std::size_t>(); }},
      {"max_cat_card", [](const nlohmann::json& j, RunConfig& c) { c.max_cat_card = j.get<std::size_t>(); }},
      {"tune", [](const nlohmann::json& j, RunConfig& c) { c.tune = j.get<bool>(); }},
      {"eval_subsample_factor",
       [](const nlohmann::json& j, RunConfig& c) { c.eval_subsample_factor = j.get<std::size_t>(); }},
      {"output", [](const nlohmann::json& j, RunConfig& c) { c.output = j.get<std::string>(); }},
      {"features_out", [](const nlohmann::json& j, RunConfig& c) { read_opt(j, c.features_out); }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  if (data.empty()) throw std::invalid_argument("config: data path is required");
  if (target.empty()) throw std::invalid_argument("config: target column is required");
  const auto task_kind = tabular::parse_task_kind(task);
  model_spec().validate(task_kind);
  engine_config().validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("config: test_fraction must lie in (0, 1)");
  }
  if (folds < 2) throw std::invalid_argument("config: folds must be at least 2");
  if (max_cat_card < 1) throw std::invalid_argument("config: max_cat_card must be at least 1");
}

downstream::ModelSpec RunConfig::model_spec() const {
  downstream::ModelSpec spec;
  spec.kind = model.empty() ? downstream::model_for(tabular::parse_task_kind(task))
                            : downstream::parse_model_kind(model);
  spec.alpha = alpha;
  spec.C = C;
  spec.max_iterations = max_model_iterations;
  spec.tolerance = tolerance;
  return spec;
}

engine::EngineConfig RunConfig::engine_config() const {
  engine::EngineConfig cfg;
  cfg.top_k = K;
  cfg.patience = P;
  cfg.max_iterations = max_iterations;
  cfg.max_order = max_order;
  cfg.prefilter_m = prefilter_m;
  cfg.estimator.k = knn_k;
  cfg.estimator.subsample_size = subsample_size;
  cfg.estimator.seed = seed;
  cfg.eval_subsample_factor = eval_subsample_factor;
  cfg.seed = seed;
  cfg.threads = default_threads();
  return cfg;
}

nlohmann::json to_json(const RunConfig& c) {
  return {
      {"data", c.data},
      {"schema", opt(c.schema)},
      {"target", c.target},
      {"task", c.task},
      {"model", c.model},
      {"alpha", c.alpha},
      {"C", c.C},
      {"max_model_iterations", c.max_model_iterations},
      {"tolerance", c.tolerance},
      {"K", c.K},
      {"P", c.P},
      {"knn_k", c.knn_k},
      {"subsample_size", c.subsample_size},
      {"split_seed", c.split_seed},
      {"seed", c.seed},
      {"test_fraction", c.test_fraction},
      {"folds", c.folds},
      {"prefilter_m", opt(c.prefilter_m)},
      {"max_order", opt(c.max_order)},
      {"drop_division_ops", c.drop_division_ops},
      {"max_iterations", c.max_iterations},
      {"max_cat_card", c.max_cat_card},
      {"tune", c.tune},
      {"eval_subsample_factor", c.eval_subsample_factor},
      {"output", c.output},
      {"features_out", opt(c.features_out)},
  };
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig base) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    auto it = setters().find(key);
    if (it == setters().end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    try {
      it->second(value, base);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config: bad value for '" + key + "': " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::move(base));
}

}  // namespace iife::cli
