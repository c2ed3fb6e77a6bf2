#pragma once

#include <string>
#include <utility>
#include <vector>

#include "provcard/frame.hpp"

namespace provcard {

struct ModifiedCell {
  RowId row_id = 0;
  std::string column;
  CellValue old_value;
  CellValue new_value;

  friend bool operator==(const ModifiedCell&, const ModifiedCell&) = default;
};

/// An added or removed column and its values keyed by row id (the new values
/// for an added column, the last values for a removed one).
struct ColumnValues {
  std::string name;
  DType dtype = DType::text;
  std::vector<std::pair<RowId, CellValue>> values;

  friend bool operator==(const ColumnValues&, const ColumnValues&) = default;
};

/// An added row with its values for every retained column. Cells in added
/// columns live in `ChangeSet::added_columns` instead.
struct AddedRow {
  RowId row_id = 0;
  std::vector<std::pair<std::string, CellValue>> values;

  friend bool operator==(const AddedRow&, const AddedRow&) = default;
};

struct ColumnRetype {
  std::string name;
  DType old_dtype = DType::text;
  DType new_dtype = DType::text;

  friend bool operator==(const ColumnRetype&, const ColumnRetype&) = default;
};

/// Structured difference between two consecutive versions. Rows align by row
/// id and columns by exact name; a renamed column is a remove plus an add.
///
/// `column_order` and `row_order` are empty unless the next frame's order
/// differs from the natural order apply() produces (retained entries in
/// previous order, then added columns in next order and added rows by
/// ascending id).
struct ChangeSet {
  std::vector<ModifiedCell> modified_cells;  // row id ascending, next column order
  std::vector<ColumnValues> added_columns;   // next column order
  std::vector<ColumnValues> removed_columns; // previous column order
  std::vector<AddedRow> added_rows;          // row id ascending
  std::vector<RowId> removed_rows;           // ascending
  std::vector<ColumnRetype> retyped_columns;
  std::vector<std::string> column_order;
  std::vector<RowId> row_order;
  bool full_replacement = false;

  bool empty() const;
  std::vector<std::string> added_column_names() const;
  std::vector<std::string> removed_column_names() const;
  std::vector<RowId> added_row_ids() const;

  friend bool operator==(const ChangeSet&, const ChangeSet&) = default;
};

/// Total function. A null `prev` marks the first version of a variable: every
/// column and row is reported added and full_replacement is set. With a
/// previous frame, full_replacement is set only when the two frames share no
/// row ids and no column names (an unrelated dataset bound to the same name).
ChangeSet diff(const TabularFrame* prev, const TabularFrame& next);
inline ChangeSet diff(const TabularFrame& prev, const TabularFrame& next) { return diff(&prev, next); }

/// Rebuilds the next frame from `prev` and a ChangeSet produced by diff().
/// Throws InconsistentChange when the ChangeSet references rows or columns
/// that `prev` does not have (or already has, for additions).
TabularFrame apply(const TabularFrame& prev, const ChangeSet& changes);

}  // namespace provcard
