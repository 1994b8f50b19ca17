#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "iife/random.hpp"
#include "iife/tabular.hpp"

namespace iife::tabular {
namespace {

CsvData numeric_csv(std::size_t rows, std::size_t distinct) {
  CsvData d;
  d.header = {"x", "label", "y"};
  for (std::size_t r = 0; r < rows; ++r) {
    d.rows.push_back({std::to_string(r % distinct), r % 2 ? "b" : "a", std::to_string(r * 0.5)});
  }
  return d;
}

TEST(Csv, ParsesQuotesEmbeddedNewlinesAndBom) {
  const auto d = parse_csv("\xEF\xBB\xBF" "a,b\n\"x, y\",\"line1\nline2\"\n\"say \"\"hi\"\"\",2\n");
  ASSERT_EQ(d.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_EQ(d.rows[0][0], "x, y");
  EXPECT_EQ(d.rows[0][1], "line1\nline2");
  EXPECT_EQ(d.rows[1][0], "say \"hi\"");
}

TEST(Csv, FormatRoundTrips) {
  CsvData d;
  d.header = {"name", "value"};
  d.rows = {{"plain", "1"}, {"with,comma", "2"}, {"quote\"d", "3"}};
  const auto back = parse_csv(format_csv(d));
  EXPECT_EQ(back.header, d.header);
  EXPECT_EQ(back.rows, d.rows);
}

TEST(Csv, InfersKindsFromCardinality) {
  LoadOptions opts;
  opts.max_cat_card = 5;
  const auto cols = infer_columns(numeric_csv(40, 4), opts);
  EXPECT_TRUE(cols[0].is_categorical());  // 4 distinct values
  EXPECT_TRUE(cols[1].is_categorical());
  EXPECT_TRUE(cols[2].is_numeric());

  const auto wide = infer_columns(numeric_csv(40, 10), opts);
  EXPECT_TRUE(wide[0].is_numeric());
}

TEST(Csv, SchemaOverridesInference) {
  LoadOptions opts;
  opts.schema["x"] = ColumnKind::Numeric;
  opts.schema["y"] = ColumnKind::Categorical;
  const auto cols = infer_columns(numeric_csv(10, 3), opts);
  EXPECT_TRUE(cols[0].is_numeric());
  EXPECT_TRUE(cols[2].is_categorical());

  LoadOptions bad;
  bad.schema["label"] = ColumnKind::Numeric;
  EXPECT_THROW(infer_columns(numeric_csv(10, 3), bad), std::runtime_error);
}

TEST(Csv, MissingCellsBecomeNanOrPlaceholder) {
  CsvData d;
  d.header = {"n", "c", "y"};
  for (int r = 0; r < 30; ++r) {
    d.rows.push_back({r == 3 ? "" : std::to_string(r), r == 4 ? " " : "k", std::to_string(r)});
  }
  const Table t = table_from_csv(d, "y", TaskKind::Regression);
  EXPECT_TRUE(std::isnan(t.column("n").numbers[3]));
  EXPECT_EQ(t.column("c").symbols[4], kMissingCategory);
}

TEST(Csv, RegressionTargetMustBeComplete) {
  CsvData d;
  d.header = {"x", "y"};
  for (int r = 0; r < 30; ++r) d.rows.push_back({std::to_string(r), r == 7 ? "" : std::to_string(r)});
  EXPECT_THROW(table_from_csv(d, "y", TaskKind::Regression), std::runtime_error);
  EXPECT_THROW(table_from_csv(d, "nope", TaskKind::Regression), std::runtime_error);
}

TEST(Table, TargetKindMustMatchTask) {
  std::vector<Column> cols = {Column::numeric("x", {1, 2, 3}), Column::numeric("y", {1, 2, 3})};
  EXPECT_THROW(Table(cols, "y", TaskKind::Classification), std::invalid_argument);
  const Table t(cols, "y", TaskKind::Regression);
  EXPECT_EQ(t.feature_names(), std::vector<std::string>{"x"});
}

TEST(Table, RejectsRaggedAndDuplicateColumns) {
  EXPECT_THROW(Table({Column::numeric("a", {1, 2}), Column::numeric("b", {1})}, std::nullopt,
                     TaskKind::Regression),
               std::invalid_argument);
  EXPECT_THROW(Table({Column::numeric("a", {1}), Column::numeric("a", {1})}, std::nullopt,
                     TaskKind::Regression),
               std::invalid_argument);
}

TEST(Folds, TenRowsFiveFoldsGiveSizeTwo) {
  const FoldPlan plan = make_folds(10, 5, 7);
  for (std::size_t f = 0; f < 5; ++f) EXPECT_EQ(plan.test_rows(f).size(), 2u);
}

TEST(Folds, PartitionBalancedAndDeterministic) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(300);
    const std::size_t k = 2 + rng.below(std::min<std::size_t>(n - 1, 9));
    const std::uint64_t seed = rng.next();
    const FoldPlan plan = make_folds(n, k, seed);
    std::vector<std::size_t> sizes(k, 0);
    for (auto a : plan.assignments) {
      ASSERT_LT(a, k);
      ++sizes[a];
    }
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    EXPECT_GE(*lo, 1u);
    EXPECT_LE(*hi - *lo, 1u);
    EXPECT_EQ(make_folds(n, k, seed).assignments, plan.assignments);
  }
  EXPECT_THROW(make_folds(3, 4, 0), std::invalid_argument);
  EXPECT_THROW(make_folds(10, 1, 0), std::invalid_argument);
}

TEST(Split, SizesDisjointAndDeterministic) {
  const auto [train, test] = split_indices(101, {0.2, 3});
  EXPECT_EQ(train.size(), 81u);  // ceil(101 * 0.8)
  EXPECT_EQ(test.size(), 20u);
  std::set<std::size_t> all(train.begin(), train.end());
  all.insert(test.begin(), test.end());
  EXPECT_EQ(all.size(), 101u);
  EXPECT_EQ(split_indices(101, {0.2, 3}), split_indices(101, {0.2, 3}));
  EXPECT_NE(split_indices(101, {0.2, 3}).first, split_indices(101, {0.2, 4}).first);
  EXPECT_THROW(split_indices(4, {0.2, 0}), std::invalid_argument);
  EXPECT_THROW(split_indices(100, {1.0, 0}), std::invalid_argument);
}

TEST(MinMax, ConstantColumnsMapToZeroAndNoClipping) {
  const std::vector<std::vector<double>> train = {{1.0, 3.0, 2.0}, {5.0, 5.0, 5.0}};
  const ScalerState s = fit_minmax(train);
  const auto scaled = apply_minmax(s, train);
  EXPECT_EQ(scaled[0], (std::vector<double>{0.0, 1.0, 0.5}));
  EXPECT_EQ(scaled[1], (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_DOUBLE_EQ(apply_minmax(s, 0, 5.0), 2.0);
  EXPECT_DOUBLE_EQ(apply_minmax(s, 0, -1.0), -1.0);
}

TEST(OneHot, FirstAppearanceOrderUnseenAllZero) {
  const std::vector<std::string> train = {"b", "a", "b", "c"};
  const EncoderState s = fit_onehot(train);
  EXPECT_EQ(s.categories, (std::vector<std::string>{"b", "a", "c"}));
  const std::vector<std::string> test = {"c", "zz"};
  const auto cols = apply_onehot(s, test);
  ASSERT_EQ(cols.size(), 3u);
  EXPECT_EQ(cols[2], (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(cols[0][1] + cols[1][1] + cols[2][1], 0.0);
}

TEST(Imputer, TrainingMeansFillMissing) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const Table train({Column::numeric("x", {1.0, nan, 3.0})}, std::nullopt, TaskKind::Regression);
  const ImputerState s = fit_imputer(train);
  EXPECT_DOUBLE_EQ(s.means.at("x"), 2.0);
  const Table test({Column::numeric("x", {nan, 10.0})}, std::nullopt, TaskKind::Regression);
  const Table filled = apply_imputer(s, test);
  EXPECT_EQ(filled.column("x").numbers, (std::vector<double>{2.0, 10.0}));
}

}  // namespace
}  // namespace iife::tabular
