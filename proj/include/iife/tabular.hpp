#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iife::tabular {

enum class ColumnKind { Numeric, Categorical };
enum class TaskKind { Classification, Regression };

std::string_view to_string(ColumnKind kind);
std::string_view to_string(TaskKind task);
ColumnKind parse_column_kind(std::string_view text);
TaskKind parse_task_kind(std::string_view text);

// Placeholder symbol that missing categorical cells are mapped to on load.
inline constexpr std::string_view kMissingCategory = "<missing>";

// A named column. Numeric columns use NaN for missing cells; categorical
// columns never hold missing values (they become kMissingCategory).
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<double> numbers;
  std::vector<std::string> symbols;

  static Column numeric(std::string name, std::vector<double> values);
  static Column categorical(std::string name, std::vector<std::string> values);

  std::size_t size() const {
    return kind == ColumnKind::Numeric ? numbers.size() : symbols.size();
  }
  bool is_numeric() const { return kind == ColumnKind::Numeric; }
  bool is_categorical() const { return kind == ColumnKind::Categorical; }
};

// Immutable columnar dataset. Every column has n_rows() cells and names are
// unique. Labeled tables carry a target column whose kind agrees with the
// task; unlabeled frames (used by transform) have no target.
class Table {
 public:
  Table() = default;
  Table(std::vector<Column> columns, std::optional<std::string> target,
        TaskKind task);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_columns() const { return columns_.size(); }
  TaskKind task() const { return task_; }
  bool has_target() const { return target_.has_value(); }
  const std::string& target_name() const;

  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::string_view name) const;
  const Column* find(std::string_view name) const;
  const Column& target() const { return column(target_name()); }

  // Columns other than the target, in file order.
  std::vector<std::string> feature_names() const;

  Table select_rows(std::span<const std::size_t> rows) const;
  Table with_column(Column column) const;

 private:
  std::vector<Column> columns_;
  std::optional<std::string> target_;
  TaskKind task_ = TaskKind::Regression;
  std::size_t n_rows_ = 0;
};

// Raw RFC-4180 contents: header plus rows of unparsed cells.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvData read_csv(const std::string& path);
CsvData parse_csv(std::string_view text);
std::string format_csv(const CsvData& data);

using Schema = std::map<std::string, ColumnKind>;

// Reads {"columns": {name: "numeric"|"categorical"}}.
Schema load_schema(const std::string& path);

struct LoadOptions {
  std::size_t max_cat_card = 20;
  Schema schema;
};

// Builds typed columns from raw cells. Numeric-parseable columns whose
// distinct-value count exceeds max_cat_card become Numeric; the rest are
// Categorical, unless the schema says otherwise.
std::vector<Column> infer_columns(const CsvData& data, const LoadOptions& opts);

Table table_from_csv(const CsvData& data, const std::string& target,
                     TaskKind task, const LoadOptions& opts = {});
Table load_csv(const std::string& path, const std::string& target,
               TaskKind task, const LoadOptions& opts = {});

inline constexpr std::size_t kMaxClasses = 1000;

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

// Seeded shuffle; the first ceil(n*(1-f)) permuted rows form the train part.
std::pair<Table, Table> train_test_split(const Table& t, const SplitSpec& s);
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n_rows, const SplitSpec& s);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;

  std::size_t n_rows() const { return assignments.size(); }
  std::vector<std::size_t> train_rows(std::size_t fold) const;
  std::vector<std::size_t> test_rows(std::size_t fold) const;
};

FoldPlan make_folds(std::size_t n_rows, std::size_t k, std::uint64_t seed);

// Uniform permutation of 0..n-1 from a seeded Mersenne twister. Avoids the
// implementation-defined std::shuffle so results match across toolchains.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct ScalerState {
  std::vector<double> mins;
  std::vector<double> maxs;
  bool operator==(const ScalerState&) const = default;
};

// Columns are given column-major: columns[c][row].
ScalerState fit_minmax(std::span<const std::vector<double>> columns);
std::vector<std::vector<double>> apply_minmax(
    const ScalerState& state, std::span<const std::vector<double>> columns);
double apply_minmax(const ScalerState& state, std::size_t column, double value);

struct EncoderState {
  std::vector<std::string> categories;  // first-appearance order
  std::map<std::string, std::size_t, std::less<>> index;
  bool operator==(const EncoderState&) const = default;
};

EncoderState fit_onehot(std::span<const std::string> train);
// Indicator columns, one per fitted category; unseen values give all zeros.
std::vector<std::vector<double>> apply_onehot(const EncoderState& state,
                                              std::span<const std::string> values);

// Training-fold mean imputation for numeric columns.
struct ImputerState {
  std::map<std::string, double, std::less<>> means;
  bool operator==(const ImputerState&) const = default;
};

ImputerState fit_imputer(const Table& train);
Table apply_imputer(const ImputerState& state, const Table& rows);

}  // namespace iife::tabular
