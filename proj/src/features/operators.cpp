#include <stdexcept>

#include "iife/features.hpp"

namespace iife::features {

std::vector<BinaryOp> OperatorSets::numeric_ops() const {
  std::vector<BinaryOp> ops = {BinaryOp::Add, BinaryOp::Sub,     BinaryOp::RSub,
                               BinaryOp::Mul, BinaryOp::Min,     BinaryOp::Max,
                               BinaryOp::SafeDiv, BinaryOp::RSafeDiv, BinaryOp::Mod,
                               BinaryOp::RMod};
  if (drop_division_ops) {
    std::erase_if(ops, [](BinaryOp op) {
      return op == BinaryOp::SafeDiv || op == BinaryOp::RSafeDiv;
    });
  }
  return ops;
}

std::vector<BinaryOp> OperatorSets::groupby_ops() const {
  return {BinaryOp::GroupMin, BinaryOp::GroupMax, BinaryOp::GroupMean, BinaryOp::GroupMedian,
          BinaryOp::GroupStd};
}

std::vector<UnaryOp> OperatorSets::unary_ops() const {
  std::vector<UnaryOp> ops = {UnaryOp::Square, UnaryOp::Abs, UnaryOp::SqrtAbs, UnaryOp::Sigmoid,
                              UnaryOp::Reciprocal};
  if (drop_division_ops) std::erase(ops, UnaryOp::Reciprocal);
  return ops;
}

std::vector<FeatureExpr> bivariate_candidates(const FeatureExpr& a, ColumnKind a_kind,
                                              const FeatureExpr& b, ColumnKind b_kind,
                                              const OperatorSets& sets) {
  if (a == b) throw std::invalid_argument("bivariate_candidates needs two distinct features");
  if ((a_kind == ColumnKind::Categorical && !a.is_column()) ||
      (b_kind == ColumnKind::Categorical && !b.is_column())) {
    throw std::invalid_argument("only column references can be categorical");
  }
  std::vector<FeatureExpr> out;
  const bool a_cat = a_kind == ColumnKind::Categorical;
  const bool b_cat = b_kind == ColumnKind::Categorical;
  if (a_cat) {
    for (auto op : sets.groupby_ops()) out.push_back(FeatureExpr::binary(op, a, b));
  }
  if (b_cat) {
    for (auto op : sets.groupby_ops()) out.push_back(FeatureExpr::binary(op, b, a));
  }
  for (auto op : sets.numeric_ops()) out.push_back(FeatureExpr::binary(op, a, b));
  return out;
}

std::vector<FeatureExpr> univariate_candidates(const FeatureExpr& e, const OperatorSets& sets) {
  std::vector<FeatureExpr> out = {e};
  for (auto op : sets.unary_ops()) out.push_back(FeatureExpr::unary(op, e));
  return out;
}

}  // namespace iife::features
