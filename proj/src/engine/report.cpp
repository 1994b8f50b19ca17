#include "iife/engine.hpp"

namespace iife::engine {

nlohmann::json report_json(const RunReport& r, bool include_timing) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : r.features) {
    features.push_back({{"expr", f.expr}, {"order", f.order}, {"cv_after", f.cv_after}});
  }
  nlohmann::json out = {
      {"baseline_cv", r.baseline_cv},
      {"final_cv", r.final_cv},
      {"history", r.history},
      {"features", std::move(features)},
      {"pool", r.pool},
      {"test_score", r.test_score ? nlohmann::json(*r.test_score) : nlohmann::json(nullptr)},
      {"iterations", r.iterations},
      {"candidates_evaluated", r.candidates_evaluated},
      {"pairs_considered", r.pairs_considered},
      {"stop_reason", r.stop_reason},
  };
  if (include_timing) out["timing"] = {{"wall_seconds", r.wall_seconds}};
  return out;
}

}  // namespace iife::engine
