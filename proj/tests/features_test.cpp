#include <gtest/gtest.h>

#include <cmath>

#include "iife/features.hpp"
#include "iife/random.hpp"

namespace iife::features {
namespace {

using tabular::Column;
using tabular::Table;
using tabular::TaskKind;

FeatureExpr col(const std::string& name) { return FeatureExpr::column(name); }

Table table(std::vector<Column> cols) { return Table(std::move(cols), std::nullopt, TaskKind::Regression); }

std::vector<double> eval(const FeatureExpr& e, const Table& t) { return fit_expr(e, t).evaluate(t); }

TEST(Expr, RenderParseRoundTrip) {
  const auto e = FeatureExpr::unary(
      UnaryOp::Sigmoid,
      FeatureExpr::binary(BinaryOp::GroupMean, col("city"),
                          FeatureExpr::binary(BinaryOp::RSafeDiv, col("a,b"), col("x(1)"))));
  const std::string text = render_expr(e);
  EXPECT_EQ(text, "sigmoid(gbmean(col:city,rdiv(col:a\\,b,col:x\\(1\\))))");
  EXPECT_EQ(parse_expr(text), e);
  EXPECT_EQ(render_expr(parse_expr(text)), text);
}

TEST(Expr, ParseErrorsAreDescriptive) {
  try {
    parse_expr("add(col:F1,col:F2");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("unbalanced parenthesis"), std::string::npos);
  }
  EXPECT_THROW(parse_expr("log(col:F1)"), std::invalid_argument);
  EXPECT_THROW(parse_expr("add(col:F1)"), std::invalid_argument);
  EXPECT_THROW(parse_expr("col:"), std::invalid_argument);
  EXPECT_THROW(parse_expr("sq(col:F1))"), std::invalid_argument);
  EXPECT_THROW(parse_expr("gbmean(sq(col:a),col:b)"), std::invalid_argument);
}

TEST(Expr, OrderCountsLeavesWithMultiplicity) {
  EXPECT_EQ(order(col("a")), 1u);
  EXPECT_EQ(order(parse_expr("add(col:a,col:a)")), 2u);
  EXPECT_EQ(order(parse_expr("sq(mul(col:a,sub(col:b,col:a)))")), 3u);
  EXPECT_EQ(referenced_columns(parse_expr("mul(col:b,sub(col:a,col:b))")),
            (std::vector<std::string>{"a", "b"}));
}

TEST(Expr, ValidateChecksColumnsAndGroupKinds) {
  const Table t = table({Column::numeric("x", {1, 2}), Column::categorical("c", {"a", "b"})});
  EXPECT_NO_THROW(validate_expr(parse_expr("gbstd(col:c,col:x)"), t));
  EXPECT_THROW(validate_expr(parse_expr("gbstd(col:x,col:x)"), t), std::invalid_argument);
  EXPECT_THROW(validate_expr(parse_expr("add(col:x,col:missing)"), t), std::invalid_argument);
  EXPECT_EQ(output_kind(col("c"), t), ColumnKind::Categorical);
  EXPECT_EQ(output_kind(parse_expr("sq(col:c)"), t), ColumnKind::Numeric);
}

TEST(Operators, CandidateCountsPerKindPair) {
  const OperatorSets all;
  const auto num = ColumnKind::Numeric, cat = ColumnKind::Categorical;
  EXPECT_EQ(bivariate_candidates(col("a"), num, col("b"), num, all).size(), 10u);
  EXPECT_EQ(bivariate_candidates(col("a"), num, col("c"), cat, all).size(), 15u);
  EXPECT_EQ(bivariate_candidates(col("c"), cat, col("d"), cat, all).size(), 20u);
  EXPECT_EQ(univariate_candidates(col("a"), all).size(), 6u);

  const OperatorSets lasso{true};
  EXPECT_EQ(bivariate_candidates(col("a"), num, col("b"), num, lasso).size(), 8u);
  EXPECT_EQ(univariate_candidates(col("a"), lasso).size(), 5u);
  for (const auto& e : bivariate_candidates(col("a"), num, col("b"), num, lasso)) {
    EXPECT_NE(e.binary_op(), BinaryOp::SafeDiv);
    EXPECT_NE(e.binary_op(), BinaryOp::RSafeDiv);
  }
}

TEST(Operators, MixedPairListsGroupByFirstGroupedByCategorical) {
  const auto cands = bivariate_candidates(col("x"), ColumnKind::Numeric, col("c"),
                                          ColumnKind::Categorical, OperatorSets{});
  EXPECT_EQ(render_expr(cands[0]), "gbmin(col:c,col:x)");
  EXPECT_EQ(render_expr(cands[5]), "add(col:x,col:c)");
  EXPECT_EQ(render_expr(univariate_candidates(col("x"), {})[0]), "col:x");
  EXPECT_THROW(bivariate_candidates(col("x"), ColumnKind::Numeric, col("x"), ColumnKind::Numeric, {}),
               std::invalid_argument);
}

TEST(Evaluate, ElementwiseSemantics) {
  const Table t = table({Column::numeric("a", {7, -7, 3, 0}), Column::numeric("b", {3, 3, 0, -2})});
  EXPECT_EQ(eval(parse_expr("div(col:a,col:b)"), t), (std::vector<double>{1.75, -1.75, 3, 0}));
  EXPECT_EQ(eval(parse_expr("mod(col:a,col:b)"), t), (std::vector<double>{1, 2, 0, 0}));
  EXPECT_EQ(eval(parse_expr("rsub(col:a,col:b)"), t), (std::vector<double>{-4, 10, -3, -2}));
  EXPECT_EQ(eval(parse_expr("inv(col:b)"), t), (std::vector<double>{1.0 / 3, 1.0 / 3, 0, -0.5}));
  EXPECT_EQ(eval(parse_expr("sqrtabs(col:b)"), t)[3], std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(eval(parse_expr("sigmoid(col:a)"), t)[3], 0.5);
}

TEST(Evaluate, NonFiniteBecomesZero) {
  const Table t = table({Column::numeric("a", {1e200, 2})});
  EXPECT_EQ(eval(parse_expr("sq(col:a)"), t), (std::vector<double>{0, 4}));
}

TEST(Evaluate, GroupAggregatesFitOnTrainUnseenIsZero) {
  const Table train = table({Column::categorical("c", {"u", "u", "v", "v", "v", "u"}),
                             Column::numeric("x", {1, 3, 10, 20, 60, 8})});
  const auto mean = fit_expr(parse_expr("gbmean(col:c,col:x)"), train);
  EXPECT_EQ(mean.evaluate(train), (std::vector<double>{4, 4, 30, 30, 30, 4}));
  EXPECT_EQ(fit_expr(parse_expr("gbmedian(col:c,col:x)"), train).evaluate(train)[0], 3.0);
  EXPECT_DOUBLE_EQ(fit_expr(parse_expr("gbstd(col:c,col:x)"), train).evaluate(train)[2],
                   std::sqrt((400.0 + 100.0 + 900.0) / 3.0));

  const Table test = table({Column::categorical("c", {"v", "w"}), Column::numeric("x", {0, 0})});
  EXPECT_EQ(mean.evaluate(test), (std::vector<double>{30, 0}));
}

TEST(Evaluate, OrdinalCodesFirstAppearanceUnseenMinusOne) {
  const Table train = table({Column::categorical("c", {"q", "p", "q"}), Column::numeric("x", {1, 1, 1})});
  const auto fe = fit_expr(parse_expr("add(col:c,col:x)"), train);
  EXPECT_EQ(fe.evaluate(train), (std::vector<double>{1, 2, 1}));
  const Table test = table({Column::categorical("c", {"p", "new"}), Column::numeric("x", {0, 0})});
  EXPECT_EQ(fe.evaluate(test), (std::vector<double>{1, -1}));
  EXPECT_FALSE(fe.stateless());
  EXPECT_TRUE(fit_expr(parse_expr("add(col:x,col:x)"), train).stateless());
}

TEST(Evaluate, UnknownColumnNamesExpression) {
  const Table t = table({Column::numeric("x", {1})});
  try {
    eval(parse_expr("add(col:x,col:ghost)"), t);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("add(col:x,col:ghost)"), std::string::npos);
  }
}

// Fitted states depend on training rows only.
TEST(Evaluate, StatesIgnoreHeldOutRows) {
  Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<std::string> cats(60);
    std::vector<double> xs(60);
    for (auto& c : cats) c = std::string(1, static_cast<char>('a' + rng.below(4)));
    for (auto& x : xs) x = rng.normal();
    const Table train = table({Column::categorical("c", cats), Column::numeric("x", xs)});
    const auto e = parse_expr("mul(gbmedian(col:c,sq(col:x)),add(col:c,col:x))");
    const auto fitted = fit_expr(e, train);

    std::vector<std::string> test_cats(20);
    std::vector<double> test_xs(20);
    for (auto& c : test_cats) c = std::string(1, static_cast<char>('a' + rng.below(6)));
    for (auto& x : test_xs) x = 100 * rng.normal();
    const Table test = table({Column::categorical("c", test_cats), Column::numeric("x", test_xs)});
    (void)fitted.evaluate(test);
    EXPECT_EQ(fit_expr(e, train), fitted);
  }
}

}  // namespace
}  // namespace iife::features
