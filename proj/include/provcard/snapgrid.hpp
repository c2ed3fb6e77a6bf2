#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "provcard/diff.hpp"
#include "provcard/frame.hpp"
#include "provcard/relationships.hpp"

namespace provcard {

inline constexpr std::size_t kGridRows = 9;
inline constexpr std::size_t kGridColumns = 9;
inline constexpr std::size_t kDisplayChars = 12;
inline constexpr std::string_view kLegendVersion = "1";

enum class CellState { unchanged, modified, added, removed, not_present, query_match };

std::string_view to_string(CellState state);
CellState parse_cell_state(std::string_view name);

struct CellRef {
  RowId row_id = 0;
  std::string column;

  friend bool operator==(const CellRef&, const CellRef&) = default;
};

/// Source column and the columns derived from it; drawn as a box around the source.
struct RelationshipBox {
  std::string source;
  std::vector<std::string> derived;

  friend bool operator==(const RelationshipBox&, const RelationshipBox&) = default;
};

struct SnapGridSpec {
  std::vector<RowId> rows;             // ascending row id, at most 9
  std::vector<std::string> columns;    // union column order, at most 9
  std::vector<RelationshipBox> boxes;

  friend bool operator==(const SnapGridSpec&, const SnapGridSpec&) = default;
};

/// Rows and cells matched by an active filter query.
struct QueryFocus {
  std::vector<RowId> rows;
  std::vector<std::string> columns;
  std::vector<CellRef> cells;
};

struct GridCell {
  CellState state = CellState::unchanged;
  std::optional<CellValue> old_value;  // value in the previous frame, when present there
  std::optional<CellValue> new_value;  // value in the next frame, when present there
  std::string display;                 // ellipsized; "old → new" for modified cells
  bool in_relationship_box = false;
  bool query_hit = false;              // border overlay, independent of state
};

struct GridColumn {
  std::string name;
  CellState header_state = CellState::unchanged;  // added/removed/modified/unchanged
  std::size_t changed_count = 0;                  // over the full dataset
  std::optional<std::size_t> overflow_count;      // set when changed_count > 9
};

struct SnapGrid {
  std::vector<RowId> rows;
  std::vector<GridColumn> columns;
  std::vector<std::vector<GridCell>> cells;  // [row][column]
  std::vector<RelationshipBox> boxes;
  std::string legend_version{kLegendVersion};
  std::vector<std::string> warnings;
};

/// Which cells of the union of two frames count as changed: a cell present in
/// exactly one frame, or present in both with differing values.
class ChangeIndex {
 public:
  ChangeIndex(const ChangeSet& changes, const TabularFrame* prev, const TabularFrame& next);

  bool in_prev(RowId row, const std::string& column) const;
  bool in_next(RowId row, const std::string& column) const;
  bool modified(RowId row, const std::string& column) const;
  bool changed(RowId row, const std::string& column) const;

  /// Union of row ids, ascending.
  const std::vector<RowId>& rows() const { return rows_; }
  /// Next frame's columns with removed columns re-inserted after their
  /// nearest preceding surviving neighbour.
  const std::vector<std::string>& columns() const { return columns_; }

  std::size_t column_changes(const std::string& column) const;
  std::size_t row_changes(RowId row, const std::vector<std::string>& columns) const;

 private:
  static const TabularFrame kEmpty;
  const TabularFrame& prev_;
  const TabularFrame& next_;
  std::vector<RowId> rows_;
  std::vector<std::string> columns_;
  std::unordered_map<std::string, std::unordered_set<RowId>> modified_;
};

/// Picks the window that covers the most changed cells. Columns: every
/// changed column plus relationship sources, ranked by changed-cell count
/// when more than nine qualify, padded with unchanged columns in frame order.
/// Rows: the nine with the most changed cells inside those columns, ties by
/// ascending row id (which also pads with unchanged rows). With `query`, the
/// rows are the first nine matching rows by row id and the query's columns
/// are kept first.
SnapGridSpec select_subset(const ChangeSet& changes, const TabularFrame* prev,
                           const TabularFrame& next, const ColumnRelationships& relationships,
                           const QueryFocus* query = nullptr);

/// Number of changed cells inside the window.
std::size_t coverage(const SnapGridSpec& spec, const ChangeIndex& index);

/// Assigns each cell one state by precedence: not_present (in neither frame),
/// removed, added, modified, query_match, unchanged. Query cells outside both
/// frames are dropped with a warning.
SnapGrid render_snapgrid(const SnapGridSpec& spec, const ChangeSet& changes,
                         const TabularFrame* prev, const TabularFrame& next,
                         const std::vector<CellRef>* query_matches = nullptr);

/// Truncates to `max_chars` code points, replacing the tail with "…".
std::string ellipsize(std::string_view text, std::size_t max_chars = kDisplayChars);

}  // namespace provcard
