#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "provcard/frame.hpp"
#include "provcard/llm.hpp"
#include "provcard/snapgrid.hpp"

namespace provcard {

enum class CompareOp { eq, ne, lt, le, gt, ge };

std::string_view to_string(CompareOp op);
/// Accepts the canonical symbols plus "=" (read as "==").
CompareOp parse_compare_op(std::string_view symbol);
bool is_ordering(CompareOp op);

struct FilterCondition {
  std::string column;
  CompareOp op = CompareOp::eq;
  CellValue value;
  friend bool operator==(const FilterCondition&, const FilterCondition&) = default;
};

struct QueryResult {
  std::vector<RowId> rows;     // ascending row id
  std::vector<CellRef> cells;  // matching rows x referenced columns, row-major
};

/// What the compiler knows about the target columns. A column without a dtype
/// types each value from its text (decimal or not). Category values let a
/// bare word such as "Female" stand for `Gender == Female`.
struct QueryColumn {
  std::string name;
  std::optional<DType> dtype;
  std::vector<std::string> categories;
};

struct QuerySchema {
  std::vector<QueryColumn> columns;

  static QuerySchema from_names(const std::vector<std::string>& names);
  /// Typed columns; categorical and boolean columns list their distinct values.
  static QuerySchema from_frame(const TabularFrame& frame);
  const QueryColumn* find(std::string_view name) const;
  std::vector<std::string> names() const;
};

/// Lowercase and drop everything that is not a letter or digit.
std::string normalize_column_key(std::string_view text);

/// Exact match after normalize_column_key, or nullopt.
std::optional<std::string> resolve_column(std::string_view reference, const QuerySchema& schema);

/// Rule-based compiler for the constrained query forms. Throws UnknownColumn
/// (with nearest names) when a comparison has no resolvable column,
/// ParseError for "or" and for text that yields no condition, and
/// ValidationError for typing problems.
std::vector<FilterCondition> parse_query_grammar(std::string_view text, const QuerySchema& schema);

/// Converts an LLM filter reply, normalizing "=" to "==" and resolving each
/// column with the same rule as the grammar backend.
std::vector<FilterCondition> conditions_from_json(const llm::Json& reply, const QuerySchema& schema);

enum class QueryBackend { grammar, llm };

/// Front end choosing a backend. The LLM path falls back to the grammar when
/// the gateway is disabled or fails.
std::vector<FilterCondition> parse_query(std::string_view text, const QuerySchema& schema,
                                         QueryBackend backend = QueryBackend::grammar,
                                         llm::Gateway* gateway = nullptr);

/// Throws ValidationError when a column is absent, an ordering operator is
/// used on a non-numeric column, or a value has the wrong type.
void validate_conditions(const std::vector<FilterCondition>& conditions, const TabularFrame& frame);

/// Conjunction of the conditions; missing cells never match. Throws
/// ParseError on an empty condition list.
QueryResult apply_filters(const TabularFrame& frame, const std::vector<FilterCondition>& conditions);

/// True when `cell` satisfies `op value`.
bool condition_holds(const CellValue& cell, CompareOp op, const CellValue& value);

}  // namespace provcard
