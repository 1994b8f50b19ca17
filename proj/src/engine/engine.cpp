#include <algorithm>
#include <chrono>
#include <unordered_set>

#include "iife/engine.hpp"
#include "iife/parallel.hpp"
#include "iife/random.hpp"

namespace iife::engine {
namespace {

using downstream::CrossValidator;
using features::FeatureExpr;
using tabular::ColumnKind;
using tabular::Table;

info::Variable feature_values(const FeatureExpr& e, const Table& t) {
  if (e.is_column()) return info::Variable::from_column(t.column(e.column_name()));
  return info::Variable::numeric(features::fit_expr(e, t).evaluate(t));
}

std::vector<double> score_candidates(const CrossValidator& cv, const std::vector<FeatureExpr>& base,
                                     const std::vector<FeatureExpr>& candidates, unsigned threads) {
  std::vector<double> scores(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    std::vector<FeatureExpr> set = base;
    set.push_back(candidates[i]);
    scores[i] = cv.score(set);
  });
  return scores;
}

std::size_t first_argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// Evaluator over a fresh row subsample of the validator's table.
std::unique_ptr<CrossValidator> subsample_validator(const CrossValidator& cv, std::size_t factor,
                                                    std::uint64_t seed) {
  const Table& full = cv.table();
  const std::size_t m = std::max<std::size_t>(full.n_rows() / factor, cv.evaluator().folds.k);
  auto rows = seeded_sample(full.n_rows(), m, seed);
  std::sort(rows.begin(), rows.end());
  downstream::Evaluator ev = cv.evaluator();
  ev.folds = tabular::make_folds(m, ev.folds.k, seed);
  return std::make_unique<CrossValidator>(full.select_rows(rows), ev);
}

void fill_report(RunReport& r, const EngineState& st) {
  r.features = st.added;
  r.pool.clear();
  for (const auto& p : st.pool) r.pool.push_back(p.key);
  r.history = st.history;
  r.iterations = st.iterations;
  r.candidates_evaluated = st.candidates_evaluated;
}

}  // namespace

std::vector<FeatureExpr> EngineState::pool_exprs() const {
  std::vector<FeatureExpr> out;
  out.reserve(pool.size());
  for (const auto& p : pool) out.push_back(p.expr);
  return out;
}

EngineState init(const Table& t, const EngineConfig& cfg) {
  cfg.validate();
  const auto names =
      cfg.prefilter_m ? info::prefilter_features(t, *cfg.prefilter_m, cfg.estimator) : t.feature_names();
  if (names.size() < 2) throw std::invalid_argument("the engine needs at least two features");

  EngineState st;
  for (const auto& name : names) {
    const auto& col = t.column(name);
    PoolFeature p{FeatureExpr::column(name), col.kind, {}, info::Variable::from_column(col)};
    p.key = features::render_expr(p.expr);
    st.pool.push_back(std::move(p));
  }
  st.n_original = st.pool.size();

  std::vector<info::VariableView> views;
  for (const auto& p : st.pool) views.push_back(p.values.view());
  const info::Variable y = info::Variable::from_column(t.target());
  const auto pairs = info::all_pairs(st.pool.size());
  st.ii = info::pairwise_ii(pairs, views, y.view(), cfg.estimator, cfg.threads);
  return st;
}

bool iterate_once(EngineState& st, const Table& t, const EngineConfig& cfg, const CrossValidator& cv) {
  ++st.iterations;
  if (cfg.max_order) {
    std::erase_if(st.ii, [&](const info::IIEntry& e) {
      return features::order(st.pool[e.i].expr) + features::order(st.pool[e.j].expr) > *cfg.max_order;
    });
  }
  if (st.ii.empty()) return false;

  std::unordered_set<std::string> keys;
  for (const auto& p : st.pool) keys.insert(p.key);

  const features::OperatorSets sets{cv.evaluator().drop_division_ops};
  const std::size_t top = std::min(cfg.top_k, st.ii.size());
  std::vector<FeatureExpr> candidates;
  std::vector<std::size_t> source;  // ii index that produced each candidate
  for (std::size_t e = 0; e < top; ++e) {
    const auto& a = st.pool[st.ii[e].i];
    const auto& b = st.pool[st.ii[e].j];
    for (auto& c : features::bivariate_candidates(a.expr, a.kind, b.expr, b.kind, sets)) {
      if (keys.contains(features::render_expr(c))) continue;
      candidates.push_back(std::move(c));
      source.push_back(e);
    }
  }
  if (candidates.empty()) {
    st.ii.erase(st.ii.begin());
    return false;
  }

  std::unique_ptr<CrossValidator> local;
  if (cfg.eval_subsample_factor > 1) {
    local = subsample_validator(cv, cfg.eval_subsample_factor, mix_seed(cfg.seed, 1000 + st.iterations));
  }
  const CrossValidator& scorer = local ? *local : cv;
  const auto base = st.pool_exprs();

  const auto bivariate_scores = score_candidates(scorer, base, candidates, cfg.threads);
  st.candidates_evaluated += candidates.size();
  const std::size_t b_win = first_argmax(bivariate_scores);
  const info::IIEntry winning_pair = st.ii[source[b_win]];

  std::vector<FeatureExpr> unary;
  for (auto& u : features::univariate_candidates(candidates[b_win], sets)) {
    if (!keys.contains(features::render_expr(u))) unary.push_back(std::move(u));
  }
  const auto unary_scores = score_candidates(scorer, base, unary, cfg.threads);
  st.candidates_evaluated += unary.size();
  const FeatureExpr winner = unary[first_argmax(unary_scores)];

  PoolFeature added{winner, ColumnKind::Numeric, features::render_expr(winner),
                    feature_values(winner, t)};
  st.pool.push_back(std::move(added));
  const auto exprs = st.pool_exprs();
  const double score = cv.score(exprs);
  st.history.push_back(score);
  ++st.c;
  st.added.push_back({st.pool.back().key, features::order(winner), score});

  std::erase(st.ii, winning_pair);
  const std::size_t fresh = st.pool.size() - 1;
  std::vector<info::FeaturePair> pairs;
  for (std::size_t p = 0; p < fresh; ++p) pairs.emplace_back(p, fresh);
  std::vector<info::VariableView> views;
  for (const auto& p : st.pool) views.push_back(p.values.view());
  const info::Variable y = info::Variable::from_column(t.target());
  auto entries = info::pairwise_ii(pairs, views, y.view(), cfg.estimator, cfg.threads);
  st.ii.insert(st.ii.end(), entries.begin(), entries.end());
  info::sort_entries(st.ii);

  cv.retain_only(exprs);
  return true;
}

RunReport run(const Table& t, const EngineConfig& cfg, const downstream::Evaluator& ev) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  cfg.validate();
  RunReport report;
  EngineState st;
  try {
    const CrossValidator cv(t, ev);
    report.baseline_cv = cv.score(downstream::column_features(t));
    // Engineered features are scored for II on mean-imputed rows.
    const Table imputed = tabular::apply_imputer(tabular::fit_imputer(t), t);
    st = init(imputed, cfg);
    report.pairs_considered = st.ii.size();
    for (;;) {
      if (stop_condition(st.history, cfg.patience, st.c)) {
        report.stop_reason = "stop_condition";
        break;
      }
      if (st.iterations >= cfg.max_iterations) {
        report.stop_reason = "max_iterations";
        break;
      }
      if (st.ii.empty()) {
        report.stop_reason = "pairs_exhausted";
        break;
      }
      iterate_once(st, imputed, cfg, cv);
    }
    report.final_cv = st.history.empty() ? cv.score(st.pool_exprs()) : st.history.back();
  } catch (const std::exception& e) {
    fill_report(report, st);
    report.stop_reason = "error";
    report.wall_seconds = elapsed();
    throw EngineError(e.what(), std::move(report));
  }
  fill_report(report, st);
  report.wall_seconds = elapsed();
  return report;
}

}  // namespace iife::engine
