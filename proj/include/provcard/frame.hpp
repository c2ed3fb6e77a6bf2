#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace provcard {

enum class DType { numeric, categorical, boolean, text };

std::string_view to_string(DType dtype);
DType parse_dtype(std::string_view name);

/// One cell of a snapshot. `missing` is its own state, distinct from the
/// empty string and from zero. Non-finite numbers (NaN, inf) collapse to
/// missing.
class CellValue {
 public:
  enum class Kind { missing, number, text, boolean };

  CellValue() = default;
  static CellValue missing() { return CellValue(); }
  static CellValue number(double value);
  static CellValue text(std::string value);
  static CellValue boolean(bool value);

  Kind kind() const { return static_cast<Kind>(value_.index()); }
  bool is_missing() const { return kind() == Kind::missing; }
  bool is_number() const { return kind() == Kind::number; }
  bool is_text() const { return kind() == Kind::text; }
  bool is_bool() const { return kind() == Kind::boolean; }

  double as_number() const { return std::get<double>(value_); }
  const std::string& as_text() const { return std::get<std::string>(value_); }
  bool as_bool() const { return std::get<bool>(value_); }

  /// Display form: shortest round-trip decimal, raw text, True/False, or "".
  std::string to_string() const;

  /// Numbers compare with a 1e-12 relative tolerance, missing equals only
  /// missing, text is byte-exact, and values of different kinds never match.
  friend bool operator==(const CellValue& a, const CellValue& b);

 private:
  std::variant<std::monostate, double, std::string, bool> value_;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Strict decimal parse (optional sign, digits, fraction, exponent).
std::optional<double> parse_decimal(std::string_view text);

struct ColumnDescriptor {
  std::string name;
  DType dtype = DType::text;

  friend bool operator==(const ColumnDescriptor&, const ColumnDescriptor&) = default;
};

using RowId = std::int64_t;

/// Categorical columns hold at most this many distinct values.
inline constexpr std::size_t kCategoricalLimit = 20;

/// Dtype of a column of already-typed values.
DType infer_dtype(std::span<const CellValue> values);

class TabularFrame {
 public:
  TabularFrame() = default;
  /// Validates shape, unique column names, and unique row ids.
  TabularFrame(std::vector<ColumnDescriptor> columns, std::vector<RowId> row_ids,
               std::vector<std::vector<CellValue>> rows);

  /// Builds a frame and infers each column's dtype from its values.
  static TabularFrame from_values(const std::vector<std::string>& names,
                                  std::vector<RowId> row_ids,
                                  std::vector<std::vector<CellValue>> rows);

  const std::vector<ColumnDescriptor>& columns() const { return columns_; }
  const std::vector<RowId>& row_ids() const { return row_ids_; }
  const std::vector<std::vector<CellValue>>& rows() const { return rows_; }
  std::size_t num_rows() const { return row_ids_.size(); }
  std::size_t num_columns() const { return columns_.size(); }
  bool empty() const { return columns_.empty() && row_ids_.empty(); }

  std::optional<std::size_t> column_index(std::string_view name) const;
  std::optional<std::size_t> row_position(RowId id) const;
  bool has_column(std::string_view name) const { return column_index(name).has_value(); }
  bool has_row(RowId id) const { return row_position(id).has_value(); }

  const CellValue& at(std::size_t row, std::size_t column) const { return rows_[row][column]; }
  /// Cell by (row id, column name), or nullptr when either is absent.
  const CellValue* find(RowId id, std::string_view column) const;
  std::vector<CellValue> column_values(std::size_t column) const;
  std::vector<std::string> column_names() const;

  friend bool operator==(const TabularFrame& a, const TabularFrame& b);

 private:
  void build_indexes();

  std::vector<ColumnDescriptor> columns_;
  std::vector<RowId> row_ids_;
  std::vector<std::vector<CellValue>> rows_;
  std::unordered_map<std::string, std::size_t> column_lookup_;
  std::unordered_map<RowId, std::size_t> row_lookup_;
};

/// Candidates ordered by case-insensitive edit distance to `name`, closest
/// first, truncated to `limit`.
std::vector<std::string> nearest_names(std::string_view name,
                                       const std::vector<std::string>& candidates,
                                       std::size_t limit = 3);

}  // namespace provcard
