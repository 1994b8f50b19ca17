#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "iife/tabular.hpp"

namespace iife::features {

using tabular::ColumnKind;

enum class BinaryOp {
  Add,
  Sub,
  RSub,
  Mul,
  Min,
  Max,
  SafeDiv,   // a / (|b| + 1)
  RSafeDiv,  // b / (|a| + 1)
  Mod,       // floored modulo, 0 for a zero divisor
  RMod,
  // Group rows by the categorical left operand and aggregate the right one.
  GroupMin,
  GroupMax,
  GroupMean,
  GroupMedian,
  GroupStd,
};

enum class UnaryOp { Square, Abs, SqrtAbs, Sigmoid, Reciprocal };

bool is_groupby(BinaryOp op);
std::string_view op_name(BinaryOp op);
std::string_view op_name(UnaryOp op);

// Immutable expression tree over named columns. Copies share nodes.
class FeatureExpr {
 public:
  enum class NodeType { Column, Unary, Binary };

  static FeatureExpr column(std::string name);
  static FeatureExpr unary(UnaryOp op, FeatureExpr child);
  static FeatureExpr binary(BinaryOp op, FeatureExpr left, FeatureExpr right);

  NodeType type() const;
  bool is_column() const;
  const std::string& column_name() const;
  UnaryOp unary_op() const;
  BinaryOp binary_op() const;
  const FeatureExpr& child() const;
  const FeatureExpr& left() const;
  const FeatureExpr& right() const;

  // Number of nodes, counted in preorder.
  std::size_t node_count() const;

  friend bool operator==(const FeatureExpr& a, const FeatureExpr& b);

 private:
  struct Node;
  explicit FeatureExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Leaves counted with multiplicity.
std::size_t order(const FeatureExpr& e);

// Distinct column names referenced, sorted.
std::vector<std::string> referenced_columns(const FeatureExpr& e);

// Prefix notation, e.g. "mul(col:F1,col:F2)". Column names escape '\\', ',',
// '(' and ')' with a backslash.
std::string render_expr(const FeatureExpr& e);
// Inverse of render_expr; throws std::invalid_argument with the failing offset.
FeatureExpr parse_expr(std::string_view text);

// Engineered expressions are numeric; a bare column keeps its own kind.
ColumnKind output_kind(const FeatureExpr& e, const tabular::Table& t);

// Throws std::invalid_argument when e references missing columns or a
// group-by node's grouping operand is not a categorical column.
void validate_expr(const FeatureExpr& e, const tabular::Table& t);

struct OperatorSets {
  // Removes SafeDiv, RSafeDiv and Reciprocal (the division-type operators).
  bool drop_division_ops = false;

  std::vector<BinaryOp> numeric_ops() const;
  std::vector<BinaryOp> groupby_ops() const;
  std::vector<UnaryOp> unary_ops() const;
};

// All operator applications for the pair (a, b) in a fixed order. Numeric
// pairs yield the numeric table; a pair with a categorical column first yields
// the group-by aggregates (grouping by the categorical operand, both
// directions when both are categorical) and then the numeric table with
// categorical operands read as ordinal codes.
std::vector<FeatureExpr> bivariate_candidates(const FeatureExpr& a, ColumnKind a_kind,
                                              const FeatureExpr& b, ColumnKind b_kind,
                                              const OperatorSets& sets);

// [e, sq(e), abs(e), sqrtabs(e), sigmoid(e), inv(e)], identity first.
std::vector<FeatureExpr> univariate_candidates(const FeatureExpr& e, const OperatorSets& sets);

// Per-node state learned on training rows, indexed by preorder position.
struct NodeState {
  // Group-by nodes: category -> aggregate of the value operand.
  std::map<std::string, double, std::less<>> group_values;
  // Categorical columns read as numbers: category -> first-appearance code.
  std::map<std::string, double, std::less<>> codes;

  bool empty() const { return group_values.empty() && codes.empty(); }
  bool operator==(const NodeState&) const = default;
};

class FittedExpr {
 public:
  FittedExpr(FeatureExpr expr, std::vector<NodeState> states);

  const FeatureExpr& expr() const { return expr_; }
  const std::vector<NodeState>& states() const { return states_; }
  bool stateless() const;

  // Elementwise evaluation on any rows holding the referenced columns.
  // Unseen categories give 0 at group-by nodes and -1 as ordinal codes;
  // non-finite intermediate values are replaced by 0.
  std::vector<double> evaluate(const tabular::Table& rows) const;

  bool operator==(const FittedExpr&) const = default;

 private:
  FeatureExpr expr_;
  std::vector<NodeState> states_;
};

// Learns every node's state from `train` only.
FittedExpr fit_expr(const FeatureExpr& e, const tabular::Table& train);

// Free-function form of FittedExpr::evaluate.
std::vector<double> eval_expr(const FittedExpr& fe, const tabular::Table& rows);

}  // namespace iife::features
