#include <stdexcept>

#include "iife/engine.hpp"

namespace iife::engine {

bool stop_condition(std::span<const double> S, std::size_t P, std::size_t c) {
  if (P < 2 || P % 2 != 0) throw std::invalid_argument("stop patience must be even and at least 2");
  if (c != S.size()) throw std::invalid_argument("iteration counter must equal the history length");
  if (S.size() < P) return false;
  const std::size_t half = P / 2;
  double recent = 0.0;
  double before = 0.0;
  for (std::size_t i = S.size() - half; i < S.size(); ++i) recent += S[i];
  for (std::size_t i = S.size() - P; i < S.size() - half; ++i) before += S[i];
  const auto h = static_cast<double>(half);
  return recent / h - before / h <= 0.0;
}

void EngineConfig::validate() const {
  if (top_k < 1) throw std::invalid_argument("K must be at least 1");
  if (patience < 2 || patience % 2 != 0) {
    throw std::invalid_argument("stop patience P must be even and at least 2");
  }
  if (max_order && *max_order < 2) throw std::invalid_argument("max_order must be at least 2");
  if (prefilter_m && *prefilter_m < 2) throw std::invalid_argument("prefilter m must be at least 2");
  if (eval_subsample_factor < 1) throw std::invalid_argument("eval_subsample_factor must be >= 1");
  estimator.validate();
}

}  // namespace iife::engine
