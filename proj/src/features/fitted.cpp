#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "iife/features.hpp"

namespace iife::features {
namespace {

using tabular::Table;

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

double floored_mod(double a, double b) {
  if (b == 0.0) return 0.0;
  return a - b * std::floor(a / b);
}

double apply_binary(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add:
      return a + b;
    case BinaryOp::Sub:
      return a - b;
    case BinaryOp::RSub:
      return b - a;
    case BinaryOp::Mul:
      return a * b;
    case BinaryOp::Min:
      return std::min(a, b);
    case BinaryOp::Max:
      return std::max(a, b);
    case BinaryOp::SafeDiv:
      return a / (std::abs(b) + 1.0);
    case BinaryOp::RSafeDiv:
      return b / (std::abs(a) + 1.0);
    case BinaryOp::Mod:
      return floored_mod(a, b);
    case BinaryOp::RMod:
      return floored_mod(b, a);
    default:
      throw std::logic_error("group-by operator applied elementwise");
  }
}

double apply_unary(UnaryOp op, double x) {
  switch (op) {
    case UnaryOp::Square:
      return x * x;
    case UnaryOp::Abs:
      return std::abs(x);
    case UnaryOp::SqrtAbs:
      return std::sqrt(std::abs(x));
    case UnaryOp::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case UnaryOp::Reciprocal:
      return x == 0.0 ? 0.0 : 1.0 / x;
  }
  return 0.0;
}

double aggregate(BinaryOp op, std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  switch (op) {
    case BinaryOp::GroupMin:
      return *std::min_element(values.begin(), values.end());
    case BinaryOp::GroupMax:
      return *std::max_element(values.begin(), values.end());
    case BinaryOp::GroupMean: {
      double sum = 0.0;
      for (double v : values) sum += v;
      return sum / n;
    }
    case BinaryOp::GroupMedian: {
      std::sort(values.begin(), values.end());
      const std::size_t mid = values.size() / 2;
      return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    }
    case BinaryOp::GroupStd: {
      double sum = 0.0;
      for (double v : values) sum += v;
      const double mean = sum / n;
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      return std::sqrt(ss / n);
    }
    default:
      throw std::logic_error("not a group-by operator");
  }
}

const tabular::Column& require_column(const Table& t, const std::string& name,
                                      const FeatureExpr& root) {
  const tabular::Column* c = t.find(name);
  if (c == nullptr) {
    throw std::invalid_argument("expression " + render_expr(root) + " references unknown column '" +
                                name + "'");
  }
  return *c;
}

const tabular::Column& require_group_column(const Table& t, const std::string& name,
                                            const FeatureExpr& root) {
  const auto& c = require_column(t, name, root);
  if (!c.is_categorical()) {
    throw std::invalid_argument("group-by in " + render_expr(root) + " needs categorical column '" +
                                name + "'");
  }
  return c;
}

class Fitter {
 public:
  Fitter(const Table& train, const FeatureExpr& root, std::vector<NodeState>& states)
      : train_(train), root_(root), states_(states) {}

  std::vector<double> fit(const FeatureExpr& e) {
    const std::size_t self = next_++;
    const std::size_t n = train_.n_rows();
    switch (e.type()) {
      case FeatureExpr::NodeType::Column: {
        const auto& col = require_column(train_, e.column_name(), root_);
        if (col.is_numeric()) {
          std::vector<double> out(col.numbers);
          for (double& v : out) v = finite_or_zero(v);
          return out;
        }
        auto& codes = states_[self].codes;
        std::vector<double> out(n);
        for (std::size_t r = 0; r < n; ++r) {
          auto [it, inserted] = codes.emplace(col.symbols[r], static_cast<double>(codes.size()));
          out[r] = it->second;
        }
        return out;
      }
      case FeatureExpr::NodeType::Unary: {
        auto out = fit(e.child());
        for (double& v : out) v = finite_or_zero(apply_unary(e.unary_op(), v));
        return out;
      }
      case FeatureExpr::NodeType::Binary: {
        if (is_groupby(e.binary_op())) return fit_groupby(e, self);
        auto lhs = fit(e.left());
        auto rhs = fit(e.right());
        for (std::size_t r = 0; r < n; ++r) {
          lhs[r] = finite_or_zero(apply_binary(e.binary_op(), lhs[r], rhs[r]));
        }
        return lhs;
      }
    }
    return {};
  }

 private:
  std::vector<double> fit_groupby(const FeatureExpr& e, std::size_t self) {
    const auto& keys = require_group_column(train_, e.left().column_name(), root_).symbols;
    ++next_;  // the grouping column node carries no state
    const auto values = fit(e.right());
    std::unordered_map<std::string, std::vector<double>> groups;
    for (std::size_t r = 0; r < values.size(); ++r) groups[keys[r]].push_back(values[r]);
    auto& table = states_[self].group_values;
    for (auto& [key, members] : groups) {
      table.emplace(key, finite_or_zero(aggregate(e.binary_op(), members)));
    }
    std::vector<double> out(values.size());
    for (std::size_t r = 0; r < values.size(); ++r) out[r] = table.find(keys[r])->second;
    return out;
  }

  const Table& train_;
  const FeatureExpr& root_;
  std::vector<NodeState>& states_;
  std::size_t next_ = 0;
};

class Evaluator {
 public:
  Evaluator(const Table& rows, const FeatureExpr& root, const std::vector<NodeState>& states)
      : rows_(rows), root_(root), states_(states) {}

  std::vector<double> eval(const FeatureExpr& e) {
    const std::size_t self = next_++;
    const std::size_t n = rows_.n_rows();
    switch (e.type()) {
      case FeatureExpr::NodeType::Column: {
        const auto& col = require_column(rows_, e.column_name(), root_);
        if (col.is_numeric()) {
          std::vector<double> out(col.numbers);
          for (double& v : out) v = finite_or_zero(v);
          return out;
        }
        const auto& codes = states_[self].codes;
        std::vector<double> out(n);
        for (std::size_t r = 0; r < n; ++r) {
          auto it = codes.find(col.symbols[r]);
          out[r] = it != codes.end() ? it->second : -1.0;
        }
        return out;
      }
      case FeatureExpr::NodeType::Unary: {
        auto out = eval(e.child());
        for (double& v : out) v = finite_or_zero(apply_unary(e.unary_op(), v));
        return out;
      }
      case FeatureExpr::NodeType::Binary: {
        if (is_groupby(e.binary_op())) {
          const auto& keys = require_group_column(rows_, e.left().column_name(), root_).symbols;
          ++next_;
          next_ += e.right().node_count();  // value operand only mattered at fit time
          const auto& table = states_[self].group_values;
          std::vector<double> out(n);
          for (std::size_t r = 0; r < n; ++r) {
            auto it = table.find(keys[r]);
            out[r] = it != table.end() ? it->second : 0.0;
          }
          return out;
        }
        auto lhs = eval(e.left());
        auto rhs = eval(e.right());
        for (std::size_t r = 0; r < n; ++r) {
          lhs[r] = finite_or_zero(apply_binary(e.binary_op(), lhs[r], rhs[r]));
        }
        return lhs;
      }
    }
    return {};
  }

 private:
  const Table& rows_;
  const FeatureExpr& root_;
  const std::vector<NodeState>& states_;
  std::size_t next_ = 0;
};

}  // namespace

FittedExpr::FittedExpr(FeatureExpr expr, std::vector<NodeState> states)
    : expr_(std::move(expr)), states_(std::move(states)) {
  if (states_.size() != expr_.node_count()) {
    throw std::invalid_argument("fitted state count does not match expression size");
  }
}

bool FittedExpr::stateless() const {
  return std::all_of(states_.begin(), states_.end(), [](const NodeState& s) { return s.empty(); });
}

std::vector<double> FittedExpr::evaluate(const Table& rows) const {
  return Evaluator(rows, expr_, states_).eval(expr_);
}

FittedExpr fit_expr(const FeatureExpr& e, const Table& train) {
  std::vector<NodeState> states(e.node_count());
  Fitter(train, e, states).fit(e);
  return FittedExpr(e, std::move(states));
}

std::vector<double> eval_expr(const FittedExpr& fe, const Table& rows) { return fe.evaluate(rows); }

}  // namespace iife::features
