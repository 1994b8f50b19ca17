#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iife/downstream.hpp"
#include "iife/features.hpp"
#include "iife/info.hpp"
#include "iife/tabular.hpp"
#include "json.hpp"

// The interaction-information guided greedy feature construction loop.
namespace iife::engine {

struct EngineConfig {
  std::size_t top_k = 3;
  std::size_t patience = 20;  // even
  std::size_t max_iterations = 100;
  std::optional<std::size_t> max_order;
  std::optional<std::size_t> prefilter_m;
  info::EstimatorConfig estimator;
  // Candidate scoring uses a fresh 1/factor row subsample each iteration when > 1.
  std::size_t eval_subsample_factor = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const;
};

// True iff |S| >= P and the mean of the last P/2 scores minus the mean of
// the P/2 before them is <= 0. Requires c == |S| and an even P >= 2.
bool stop_condition(std::span<const double> S, std::size_t P, std::size_t c);

struct PoolFeature {
  features::FeatureExpr expr;
  tabular::ColumnKind kind = tabular::ColumnKind::Numeric;
  std::string key;        // rendered expression
  info::Variable values;  // over the engine's table, for II scoring
};

struct AddedFeature {
  std::string expr;
  std::size_t order = 0;
  double cv_after = 0.0;
};

// Invariants: pool keys are distinct; ii references live pool indices and
// holds no consumed winning pair; history.size() == c.
struct EngineState {
  std::vector<PoolFeature> pool;
  std::size_t n_original = 0;
  std::vector<info::IIEntry> ii;
  std::vector<double> history;
  std::size_t c = 0;
  std::size_t iterations = 0;
  std::size_t candidates_evaluated = 0;
  std::vector<AddedFeature> added;

  std::vector<features::FeatureExpr> pool_exprs() const;
};

// Pool of the (optionally prefiltered) feature columns with the II table over
// all their pairs. Throws if fewer than two features remain.
EngineState init(const tabular::Table& t, const EngineConfig& cfg);

// One loop body. Returns false when nothing was added (every candidate was a
// duplicate, or the II table had no usable pair).
bool iterate_once(EngineState& state, const tabular::Table& t, const EngineConfig& cfg,
                  const downstream::CrossValidator& cv);

struct RunReport {
  std::vector<AddedFeature> features;  // acceptance order
  std::vector<std::string> pool;       // rendered, originals first
  std::vector<double> history;
  double baseline_cv = 0.0;
  double final_cv = 0.0;
  std::optional<double> test_score;
  std::size_t iterations = 0;
  std::size_t candidates_evaluated = 0;
  std::size_t pairs_considered = 0;
  std::string stop_reason;
  double wall_seconds = 0.0;
};

// Carries the report as of the failure.
class EngineError : public std::runtime_error {
 public:
  EngineError(const std::string& what, RunReport partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const RunReport& partial() const { return partial_; }

 private:
  RunReport partial_;
};

// Runs the loop until the stop condition, max_iterations, or an exhausted II
// table. The baseline is the CV score of every original feature column.
RunReport run(const tabular::Table& t, const EngineConfig& cfg, const downstream::Evaluator& ev);

// Order-2 expand-reduce baseline: all pairs in lexicographic order
// (filter_factor == 1) or the top ceil(pairs / filter_factor) pairs by tau,
// every bivariate operator, then one forward-selection pass keeping each
// candidate that strictly improves the CV score.
RunReport expand_reduce(const tabular::Table& t, const downstream::Evaluator& ev,
                        double filter_factor, const EngineConfig& cfg);

// JSON form; wall time goes under "timing" only when include_timing is set.
nlohmann::json report_json(const RunReport& r, bool include_timing = true);

}  // namespace iife::engine
