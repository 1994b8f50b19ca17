#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iife/tabular.hpp"

namespace iife::tabular {

ScalerState fit_minmax(std::span<const std::vector<double>> columns) {
  ScalerState state;
  state.mins.reserve(columns.size());
  state.maxs.reserve(columns.size());
  for (const auto& col : columns) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : col) {
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo > hi) lo = hi = 0.0;  // empty or all-missing
    state.mins.push_back(lo);
    state.maxs.push_back(hi);
  }
  return state;
}

double apply_minmax(const ScalerState& state, std::size_t column, double value) {
  const double lo = state.mins.at(column);
  const double range = state.maxs.at(column) - lo;
  if (!(range > 0.0)) return 0.0;
  return (value - lo) / range;
}

std::vector<std::vector<double>> apply_minmax(const ScalerState& state,
                                              std::span<const std::vector<double>> columns) {
  if (columns.size() != state.mins.size()) {
    throw std::invalid_argument("apply_minmax: column count does not match fitted state");
  }
  std::vector<std::vector<double>> out(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out[c].reserve(columns[c].size());
    for (double v : columns[c]) out[c].push_back(apply_minmax(state, c, v));
  }
  return out;
}

EncoderState fit_onehot(std::span<const std::string> train) {
  EncoderState state;
  for (const auto& v : train) {
    if (state.index.emplace(v, state.categories.size()).second) state.categories.push_back(v);
  }
  return state;
}

std::vector<std::vector<double>> apply_onehot(const EncoderState& state,
                                              std::span<const std::string> values) {
  std::vector<std::vector<double>> out(state.categories.size(),
                                       std::vector<double>(values.size(), 0.0));
  for (std::size_t r = 0; r < values.size(); ++r) {
    auto it = state.index.find(values[r]);
    if (it != state.index.end()) out[it->second][r] = 1.0;
  }
  return out;
}

ImputerState fit_imputer(const Table& train) {
  ImputerState state;
  for (const auto& c : train.columns()) {
    if (!c.is_numeric()) continue;
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : c.numbers) {
      if (std::isnan(v)) continue;
      sum += v;
      ++count;
    }
    state.means[c.name] = count > 0 ? sum / static_cast<double>(count) : 0.0;
  }
  return state;
}

Table apply_imputer(const ImputerState& state, const Table& rows) {
  std::vector<Column> out = rows.columns();
  for (auto& c : out) {
    if (!c.is_numeric()) continue;
    auto it = state.means.find(c.name);
    const double fill = it != state.means.end() ? it->second : 0.0;
    for (double& v : c.numbers) {
      if (std::isnan(v)) v = fill;
    }
  }
  std::optional<std::string> target;
  if (rows.has_target()) target = rows.target_name();
  return Table(std::move(out), std::move(target), rows.task());
}

}  // namespace iife::tabular
