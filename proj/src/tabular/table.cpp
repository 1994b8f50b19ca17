#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "iife/random.hpp"
#include "iife/tabular.hpp"

namespace iife::tabular {

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::Numeric ? "numeric" : "categorical";
}

std::string_view to_string(TaskKind task) {
  return task == TaskKind::Classification ? "classification" : "regression";
}

ColumnKind parse_column_kind(std::string_view text) {
  if (text == "numeric") return ColumnKind::Numeric;
  if (text == "categorical") return ColumnKind::Categorical;
  throw std::invalid_argument("unknown column kind '" + std::string(text) +
                              "' (expected numeric or categorical)");
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "classification") return TaskKind::Classification;
  if (text == "regression") return TaskKind::Regression;
  throw std::invalid_argument("unknown task '" + std::string(text) +
                              "' (expected classification or regression)");
}

Column Column::numeric(std::string name, std::vector<double> values) {
  for (double v : values) {
    if (std::isinf(v)) throw std::invalid_argument("column '" + name + "' holds an infinite value");
  }
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Numeric;
  c.numbers = std::move(values);
  return c;
}

Column Column::categorical(std::string name, std::vector<std::string> values) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Categorical;
  c.symbols = std::move(values);
  return c;
}

Table::Table(std::vector<Column> columns, std::optional<std::string> target, TaskKind task)
    : columns_(std::move(columns)), target_(std::move(target)), task_(task) {
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  std::unordered_set<std::string_view> names;
  for (const auto& c : columns_) {
    if (c.size() != n_rows_) {
      throw std::invalid_argument("column '" + c.name + "' has " + std::to_string(c.size()) +
                                  " rows, expected " + std::to_string(n_rows_));
    }
    if (!names.insert(c.name).second) {
      throw std::invalid_argument("duplicate column name '" + c.name + "'");
    }
  }
  if (target_) {
    const Column* y = find(*target_);
    if (y == nullptr) throw std::invalid_argument("target column '" + *target_ + "' not present");
    if (task_ == TaskKind::Classification && !y->is_categorical()) {
      throw std::invalid_argument("classification target must be categorical");
    }
    if (task_ == TaskKind::Regression && !y->is_numeric()) {
      throw std::invalid_argument("regression target must be numeric");
    }
  }
}

const std::string& Table::target_name() const {
  if (!target_) throw std::logic_error("table has no target column");
  return *target_;
}

const Column* Table::find(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Column& Table::column(std::string_view name) const {
  const Column* c = find(name);
  if (c == nullptr) throw std::out_of_range("no column named '" + std::string(name) + "'");
  return *c;
}

std::vector<std::string> Table::feature_names() const {
  std::vector<std::string> names;
  for (const auto& c : columns_) {
    if (!target_ || c.name != *target_) names.push_back(c.name);
  }
  return names;
}

Table Table::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) {
    Column s;
    s.name = c.name;
    s.kind = c.kind;
    if (c.is_numeric()) {
      s.numbers.reserve(rows.size());
      for (auto r : rows) s.numbers.push_back(c.numbers.at(r));
    } else {
      s.symbols.reserve(rows.size());
      for (auto r : rows) s.symbols.push_back(c.symbols.at(r));
    }
    out.push_back(std::move(s));
  }
  return Table(std::move(out), target_, task_);
}

Table Table::with_column(Column column) const {
  std::vector<Column> out = columns_;
  bool replaced = false;
  for (auto& c : out) {
    if (c.name == column.name) {
      c = column;
      replaced = true;
    }
  }
  if (!replaced) out.push_back(std::move(column));
  return Table(std::move(out), target_, task_);
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  return seeded_sample(n, n, seed);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n_rows, const SplitSpec& s) {
  if (!(s.test_fraction > 0.0 && s.test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie strictly between 0 and 1");
  }
  if (n_rows < 5) throw std::invalid_argument("train_test_split needs at least 5 rows");
  const auto n_train =
      static_cast<std::size_t>(std::ceil(static_cast<double>(n_rows) * (1.0 - s.test_fraction) - 1e-9));
  if (n_train == 0 || n_train >= n_rows) {
    throw std::invalid_argument("test_fraction leaves an empty partition");
  }
  auto perm = seeded_permutation(n_rows, s.seed);
  std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  return {std::move(train), std::move(test)};
}

std::pair<Table, Table> train_test_split(const Table& t, const SplitSpec& s) {
  auto [train, test] = split_indices(t.n_rows(), s);
  return {t.select_rows(train), t.select_rows(test)};
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < assignments.size(); ++r) {
    if (assignments[r] != fold) rows.push_back(r);
  }
  return rows;
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < assignments.size(); ++r) {
    if (assignments[r] == fold) rows.push_back(r);
  }
  return rows;
}

FoldPlan make_folds(std::size_t n_rows, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("fold count must be at least 2");
  if (k > n_rows) {
    throw std::invalid_argument("fold count " + std::to_string(k) + " exceeds row count " +
                                std::to_string(n_rows));
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.resize(n_rows);
  const auto perm = seeded_permutation(n_rows, seed);
  for (std::size_t pos = 0; pos < n_rows; ++pos) plan.assignments[perm[pos]] = pos % k;
  return plan;
}

}  // namespace iife::tabular
