#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>

#include "iife/cli.hpp"
#include "iife/parallel.hpp"
#include "iife/synthetic.hpp"

namespace iife::cli {
namespace {

using features::FeatureExpr;
using features::FittedExpr;
using tabular::ColumnKind;
using tabular::Table;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

struct RunData {
  Table train;
  Table test;
};

RunData load_run_data(const RunConfig& config) {
  tabular::LoadOptions opts;
  opts.max_cat_card = config.max_cat_card;
  if (config.schema) opts.schema = tabular::load_schema(*config.schema);
  const Table t =
      tabular::load_csv(config.data, config.target, tabular::parse_task_kind(config.task), opts);
  auto [train, test] = tabular::train_test_split(t, {config.test_fraction, config.split_seed});
  return {std::move(train), std::move(test)};
}

downstream::Evaluator make_evaluator(const RunConfig& config, const Table& train,
                                     const downstream::ModelSpec& model) {
  downstream::Evaluator ev;
  ev.model = model;
  ev.folds = tabular::make_folds(train.n_rows(), config.folds, config.seed);
  ev.metric = downstream::metric_for(train.task());
  ev.drop_division_ops = config.drop_division_ops;
  return ev;
}

nlohmann::json model_json(const downstream::ModelSpec& m) {
  return {{"kind", downstream::to_string(m.kind)}, {"strength", m.strength()}};
}

nlohmann::json percent_change(double before, double after) {
  if (before == 0.0) return nullptr;
  return 100.0 * (after - before) / std::abs(before);
}

nlohmann::json state_json(const features::NodeState& s) {
  if (!s.group_values.empty()) return {{"groups", s.group_values}};
  if (!s.codes.empty()) return {{"codes", s.codes}};
  return nullptr;
}

features::NodeState parse_state(const nlohmann::json& j) {
  features::NodeState s;
  if (j.is_null()) return s;
  if (j.contains("groups")) {
    for (const auto& [k, v] : j.at("groups").items()) s.group_values.emplace(k, v.get<double>());
  }
  if (j.contains("codes")) {
    for (const auto& [k, v] : j.at("codes").items()) s.codes.emplace(k, v.get<double>());
  }
  return s;
}

bool has_groupby(const FeatureExpr& e) {
  switch (e.type()) {
    case FeatureExpr::NodeType::Column:
      return false;
    case FeatureExpr::NodeType::Unary:
      return has_groupby(e.child());
    case FeatureExpr::NodeType::Binary:
      return features::is_groupby(e.binary_op()) || has_groupby(e.left()) || has_groupby(e.right());
  }
  return false;
}

// One feature-file entry, resolved.
struct StoredFeature {
  FittedExpr fitted;
  std::map<std::string, ColumnKind> columns;
  std::map<std::string, double> impute;
};

StoredFeature parse_feature_entry(const nlohmann::json& j) {
  if (j.is_string()) {
    const FeatureExpr e = features::parse_expr(j.get<std::string>());
    if (has_groupby(e)) {
      throw std::invalid_argument("feature " + features::render_expr(e) +
                                  " needs fitted state; plain strings must be stateless");
    }
    StoredFeature out{FittedExpr(e, std::vector<features::NodeState>(e.node_count())), {}, {}};
    for (const auto& name : features::referenced_columns(e)) out.columns[name] = ColumnKind::Numeric;
    return out;
  }
  if (!j.is_object()) throw std::invalid_argument("feature entries must be strings or objects");
  const FeatureExpr e = features::parse_expr(j.at("expr").get<std::string>());
  std::vector<features::NodeState> states;
  if (j.contains("state")) {
    for (const auto& s : j.at("state")) states.push_back(parse_state(s));
  } else {
    states.resize(e.node_count());
  }
  StoredFeature out{FittedExpr(e, std::move(states)), {}, {}};
  if (j.contains("columns")) {
    for (const auto& [k, v] : j.at("columns").items()) {
      out.columns[k] = tabular::parse_column_kind(v.get<std::string>());
    }
  }
  for (const auto& name : features::referenced_columns(e)) {
    out.columns.try_emplace(name, ColumnKind::Numeric);
  }
  if (j.contains("impute")) {
    for (const auto& [k, v] : j.at("impute").items()) out.impute[k] = v.get<double>();
  }
  return out;
}

}  // namespace

nlohmann::json feature_entry(const FittedExpr& fitted, const Table& train,
                             const tabular::ImputerState& imputer, double cv_score) {
  nlohmann::json columns = nlohmann::json::object();
  nlohmann::json impute = nlohmann::json::object();
  for (const auto& name : features::referenced_columns(fitted.expr())) {
    const auto& col = train.column(name);
    columns[name] = tabular::to_string(col.kind);
    if (col.is_numeric()) {
      auto it = imputer.means.find(name);
      if (it != imputer.means.end()) impute[name] = it->second;
    }
  }
  nlohmann::json state = nlohmann::json::array();
  for (const auto& s : fitted.states()) state.push_back(state_json(s));
  return {{"expr", features::render_expr(fitted.expr())},
          {"order", features::order(fitted.expr())},
          {"cv_score_when_added", cv_score},
          {"columns", std::move(columns)},
          {"impute", std::move(impute)},
          {"state", std::move(state)}};
}

int cmd_run(const RunConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  nlohmann::json report = {{"version", IIFE_VERSION},
                           {"command", "run"},
                           {"seed", config.seed},
                           {"split_seed", config.split_seed},
                           {"config_echo", to_json(config)}};
  try {
    config.validate();
    if (config.output.empty()) throw std::invalid_argument("config: output path is required");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }

  auto write_report = [&](const std::string& status) {
    report["status"] = status;
    report["timing"]["total_seconds"] = seconds_since(start);
    write_text(config.output, report.dump(2) + "\n");
  };

  try {
    const RunData data = load_run_data(config);
    const auto metric = downstream::metric_for(data.train.task());
    downstream::ModelSpec model = config.model_spec();
    downstream::Evaluator ev = make_evaluator(config, data.train, model);
    const auto raw = downstream::column_features(data.train);
    if (config.tune) {
      model = downstream::tune_strength(raw, data.train, ev);
      ev.model = model;
    }
    report["model_before"] = model_json(model);
    const double baseline_test = downstream::holdout_score(raw, data.train, data.test, model, metric);
    report["baseline_test_score"] = baseline_test;

    engine::RunReport run;
    try {
      run = engine::run(data.train, config.engine_config(), ev);
    } catch (const engine::EngineError& e) {
      const auto partial = engine::report_json(e.partial(), false);
      for (const auto& [k, v] : partial.items()) report[k] = v;
      report["error"] = e.what();
      log << "error: " << e.what() << "\n";
      write_report("error");
      return 1;
    }
    const auto engine_json = engine::report_json(run, false);
    for (const auto& key : {"baseline_cv", "final_cv", "history", "features", "pool", "iterations",
                            "candidates_evaluated", "stop_reason"}) {
      report[key] = engine_json.at(key);
    }
    report["timing"]["engine_seconds"] = run.wall_seconds;

    std::vector<FeatureExpr> final_features = raw;
    for (const auto& f : run.features) final_features.push_back(features::parse_expr(f.expr));
    downstream::ModelSpec final_model = model;
    if (config.tune) final_model = downstream::tune_strength(final_features, data.train, ev);
    report["model_after"] = model_json(final_model);
    const double test =
        downstream::holdout_score(final_features, data.train, data.test, final_model, metric);
    report["test_score"] = test;
    report["percent_change_over_baseline"] = percent_change(baseline_test, test);

    if (config.features_out) {
      const auto imputer = tabular::fit_imputer(data.train);
      const Table imputed = tabular::apply_imputer(imputer, data.train);
      nlohmann::json entries = nlohmann::json::array();
      for (const auto& f : run.features) {
        const auto fitted = features::fit_expr(features::parse_expr(f.expr), imputed);
        entries.push_back(feature_entry(fitted, data.train, imputer, f.cv_after));
      }
      write_text(*config.features_out, entries.dump(2) + "\n");
    }
    write_report("complete");
    log << "baseline test " << baseline_test << ", final test " << test << ", "
        << run.features.size() << " features added\n";
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    report["error"] = e.what();
    try {
      write_report("error");
    } catch (const std::exception&) {
    }
    return 1;
  }
}

int cmd_transform(const std::string& features_path, const std::string& data_path,
                  const std::string& output_path, std::ostream& log) {
  try {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_text(features_path));
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("feature file " + features_path + " is not valid JSON: " + e.what());
    }
    if (!doc.is_array()) throw std::invalid_argument("feature file must hold a JSON array");

    const std::string input = read_text(data_path);
    if (doc.empty()) {
      write_text(output_path, input);
      return 0;
    }
    tabular::CsvData csv = tabular::parse_csv(input);
    const std::set<std::string> header(csv.header.begin(), csv.header.end());

    std::vector<StoredFeature> stored;
    tabular::Schema schema;
    tabular::ImputerState imputer;
    for (const auto& entry : doc) {
      StoredFeature f = parse_feature_entry(entry);
      const auto rendered = features::render_expr(f.fitted.expr());
      for (const auto& name : features::referenced_columns(f.fitted.expr())) {
        if (!header.contains(name)) {
          throw std::invalid_argument("feature " + rendered + " references unknown column '" + name + "'");
        }
        auto [it, inserted] = schema.emplace(name, f.columns.at(name));
        if (!inserted && it->second != f.columns.at(name)) {
          throw std::invalid_argument("feature file declares column '" + name + "' with two kinds");
        }
      }
      for (const auto& [k, v] : f.impute) imputer.means.emplace(k, v);
      stored.push_back(std::move(f));
    }

    // Only the referenced columns are typed; the rest pass through verbatim.
    tabular::CsvData subset;
    std::vector<std::size_t> picks;
    for (std::size_t c = 0; c < csv.header.size(); ++c) {
      if (schema.contains(csv.header[c])) {
        subset.header.push_back(csv.header[c]);
        picks.push_back(c);
      }
    }
    for (const auto& row : csv.rows) {
      auto& out = subset.rows.emplace_back();
      for (auto c : picks) out.push_back(c < row.size() ? row[c] : std::string());
    }
    tabular::LoadOptions opts;
    opts.schema = schema;
    const Table rows = tabular::apply_imputer(
        imputer, Table(tabular::infer_columns(subset, opts), std::nullopt, tabular::TaskKind::Regression));

    for (const auto& f : stored) {
      const auto values = f.fitted.evaluate(rows);
      csv.header.push_back(features::render_expr(f.fitted.expr()));
      for (std::size_t r = 0; r < csv.rows.size(); ++r) csv.rows[r].push_back(format_number(values[r]));
    }
    write_text(output_path, tabular::format_csv(csv));
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

nlohmann::json verify_ii(const VerifyConfig& config) {
  std::vector<tabular::Column> columns;
  if (config.data) {
    for (auto& c : tabular::infer_columns(tabular::read_csv(*config.data), {})) {
      if (c.is_numeric()) columns.push_back(std::move(c));
    }
  } else {
    columns = synthetic::gaussian_features(config.n_rows, config.n_features, config.seed);
  }
  if (columns.size() < 2) throw std::invalid_argument("verify-ii needs at least two numeric features");

  std::vector<info::Variable> vars;
  for (const auto& c : columns) vars.push_back(info::Variable::from_column(c));
  std::vector<info::VariableView> views;
  for (const auto& v : vars) views.push_back(v.view());
  const auto pairs = info::all_pairs(vars.size());
  const std::size_t n = vars.front().values.size();

  info::EstimatorConfig est;
  est.k = config.knn_k;
  est.subsample_size = config.subsample_size;
  est.seed = config.seed;
  est.validate();
  const unsigned threads = default_threads();
  const auto marginals = info::pairwise_marginals(pairs, views, est, threads);

  nlohmann::json functions = nlohmann::json::array();
  for (const auto& name : config.functions) {
    double (*fn)(double, double) = nullptr;
    if (name == "sum") {
      fn = [](double x, double y) { return x + y; };
    } else if (name == "product") {
      fn = [](double x, double y) { return x * y; };
    } else if (name == "sin") {
      fn = [](double x, double y) { return std::sin(x * x + x * y + y * y); };
    } else if (name == "expmax") {
      fn = [](double x, double y) { return std::exp(std::abs(std::max(x, y))); };
    } else {
      throw std::invalid_argument("unknown target function '" + name +
                                  "' (expected sum, product, sin or expmax)");
    }
    nlohmann::json ranks = nlohmann::json::array();
    std::vector<std::size_t> histogram(pairs.size(), 0);
    std::size_t top = 0;
    for (const auto& [a, b] : pairs) {
      std::vector<double> y(n);
      for (std::size_t r = 0; r < n; ++r) y[r] = fn(vars[a].values[r], vars[b].values[r]);
      const info::Variable target = info::Variable::numeric(std::move(y));
      const auto entries = info::pairwise_ii(pairs, views, target.view(), est, threads, marginals);
      std::size_t rank = 0;
      while (entries[rank].i != a || entries[rank].j != b) ++rank;
      ranks.push_back({{"i", columns[a].name}, {"j", columns[b].name}, {"rank", rank}});
      ++histogram[rank];
      if (static_cast<double>(rank) < 0.2 * static_cast<double>(pairs.size())) ++top;
    }
    functions.push_back({{"name", name},
                         {"n_pairs", pairs.size()},
                         {"ranks", std::move(ranks)},
                         {"histogram", histogram},
                         {"top20_fraction", static_cast<double>(top) / static_cast<double>(pairs.size())}});
  }
  return {{"version", IIFE_VERSION},
          {"command", "verify-ii"},
          {"n_rows", n},
          {"n_features", vars.size()},
          {"seed", config.seed},
          {"knn_k", config.knn_k},
          {"functions", std::move(functions)}};
}

int cmd_verify_ii(const VerifyConfig& config, std::ostream& log) {
  try {
    if (config.output.empty()) throw std::invalid_argument("verify-ii: output path is required");
    const auto start = std::chrono::steady_clock::now();
    nlohmann::json out = verify_ii(config);
    out["timing"] = {{"total_seconds", seconds_since(start)}};
    write_text(config.output, out.dump(2) + "\n");
    for (const auto& f : out["functions"]) {
      log << f["name"].get<std::string>() << ": top-20% fraction " << f["top20_fraction"].get<double>()
          << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_expand_reduce_bench(const RunConfig& config, const std::vector<double>& filter_factors,
                            std::ostream& log) {
  try {
    config.validate();
    if (config.output.empty()) throw std::invalid_argument("config: output path is required");
    if (filter_factors.empty()) throw std::invalid_argument("at least one filter factor is required");
    const RunData data = load_run_data(config);
    const auto metric = downstream::metric_for(data.train.task());
    const auto model = config.model_spec();
    const auto ev = make_evaluator(config, data.train, model);
    const auto cfg = config.engine_config();

    nlohmann::json rows = nlohmann::json::array();
    nlohmann::json timing = nlohmann::json::array();
    for (double ff : filter_factors) {
      const auto r = engine::expand_reduce(data.train, ev, ff, cfg);
      std::vector<FeatureExpr> pool;
      for (const auto& s : r.pool) pool.push_back(features::parse_expr(s));
      const double test = downstream::holdout_score(pool, data.train, data.test, model, metric);
      nlohmann::json feats = nlohmann::json::array();
      for (const auto& f : r.features) feats.push_back(f.expr);
      rows.push_back({{"filter_factor", ff},
                      {"pairs_considered", r.pairs_considered},
                      {"candidates_evaluated", r.candidates_evaluated},
                      {"baseline_cv", r.baseline_cv},
                      {"cv_score", r.final_cv},
                      {"test_score", test},
                      {"features", std::move(feats)}});
      timing.push_back({{"filter_factor", ff}, {"wall_seconds", r.wall_seconds}});
      log << "filter factor " << ff << ": " << r.candidates_evaluated << " candidates, cv "
          << r.final_cv << ", " << r.wall_seconds << " s\n";
    }
    const nlohmann::json out = {{"version", IIFE_VERSION},
                                {"command", "expand-reduce-bench"},
                                {"seed", config.seed},
                                {"split_seed", config.split_seed},
                                {"config_echo", to_json(config)},
                                {"rows", std::move(rows)},
                                {"timing", std::move(timing)}};
    write_text(config.output, out.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace iife::cli
