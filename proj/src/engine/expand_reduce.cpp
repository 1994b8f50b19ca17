#include <chrono>
#include <cmath>
#include <stdexcept>

#include "iife/engine.hpp"

namespace iife::engine {

RunReport expand_reduce(const tabular::Table& t, const downstream::Evaluator& ev,
                        double filter_factor, const EngineConfig& cfg) {
  if (!(filter_factor >= 1.0)) throw std::invalid_argument("filter_factor must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  cfg.estimator.validate();

  const downstream::CrossValidator cv(t, ev);
  const auto originals = downstream::column_features(t);
  std::vector<tabular::ColumnKind> kinds;
  for (const auto& f : originals) kinds.push_back(t.column(f.column_name()).kind);

  std::vector<info::FeaturePair> pairs = info::all_pairs(originals.size());
  if (filter_factor > 1.0 && !pairs.empty()) {
    const tabular::Table imputed = tabular::apply_imputer(tabular::fit_imputer(t), t);
    std::vector<info::Variable> values;
    for (const auto& f : originals) {
      values.push_back(info::Variable::from_column(imputed.column(f.column_name())));
    }
    std::vector<info::VariableView> views;
    for (const auto& v : values) views.push_back(v.view());
    const info::Variable y = info::Variable::from_column(imputed.target());
    const auto ranked = info::pairwise_ii(pairs, views, y.view(), cfg.estimator, cfg.threads);
    const auto keep = static_cast<std::size_t>(
        std::ceil(static_cast<double>(pairs.size()) / filter_factor - 1e-9));
    pairs.clear();
    for (std::size_t e = 0; e < keep && e < ranked.size(); ++e) {
      pairs.emplace_back(ranked[e].i, ranked[e].j);
    }
  }

  const features::OperatorSets sets{ev.drop_division_ops};
  RunReport report;
  report.pairs_considered = pairs.size();
  std::vector<features::FeatureExpr> current = originals;
  double score = cv.score(current);
  report.baseline_cv = score;
  for (const auto& [i, j] : pairs) {
    for (auto& c : features::bivariate_candidates(originals[i], kinds[i], originals[j], kinds[j], sets)) {
      current.push_back(c);
      const double s = cv.score(current);
      ++report.candidates_evaluated;
      if (s > score) {
        score = s;
        report.features.push_back({features::render_expr(c), features::order(c), s});
        report.history.push_back(s);
      } else {
        current.pop_back();
      }
      cv.retain_only(current);
    }
  }
  report.final_cv = score;
  for (const auto& f : current) report.pool.push_back(features::render_expr(f));
  report.iterations = report.features.size();
  report.stop_reason = "candidates_exhausted";
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace iife::engine
