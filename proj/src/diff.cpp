#include "provcard/diff.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "provcard/errors.hpp"

namespace provcard {

bool ChangeSet::empty() const {
  return modified_cells.empty() && added_columns.empty() && removed_columns.empty() &&
         added_rows.empty() && removed_rows.empty() && retyped_columns.empty() &&
         column_order.empty() && row_order.empty() && !full_replacement;
}

std::vector<std::string> ChangeSet::added_column_names() const {
  std::vector<std::string> out;
  for (const auto& c : added_columns) out.push_back(c.name);
  return out;
}

std::vector<std::string> ChangeSet::removed_column_names() const {
  std::vector<std::string> out;
  for (const auto& c : removed_columns) out.push_back(c.name);
  return out;
}

std::vector<RowId> ChangeSet::added_row_ids() const {
  std::vector<RowId> out;
  for (const auto& r : added_rows) out.push_back(r.row_id);
  return out;
}

namespace {

ColumnValues column_of(const TabularFrame& frame, std::size_t c) {
  ColumnValues cv{frame.columns()[c].name, frame.columns()[c].dtype, {}};
  cv.values.reserve(frame.num_rows());
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    cv.values.emplace_back(frame.row_ids()[r], frame.at(r, c));
  }
  return cv;
}

}  // namespace

ChangeSet diff(const TabularFrame* prev, const TabularFrame& next) {
  ChangeSet cs;
  static const TabularFrame kEmpty;
  const TabularFrame& before = prev ? *prev : kEmpty;

  std::vector<std::size_t> retained_next_cols;  // next indexes of shared columns
  for (std::size_t c = 0; c < next.num_columns(); ++c) {
    if (auto pc = before.column_index(next.columns()[c].name)) {
      retained_next_cols.push_back(c);
      if (before.columns()[*pc].dtype != next.columns()[c].dtype) {
        cs.retyped_columns.push_back(
            {next.columns()[c].name, before.columns()[*pc].dtype, next.columns()[c].dtype});
      }
    } else {
      cs.added_columns.push_back(column_of(next, c));
    }
  }
  for (std::size_t c = 0; c < before.num_columns(); ++c) {
    if (!next.has_column(before.columns()[c].name)) cs.removed_columns.push_back(column_of(before, c));
  }

  std::vector<RowId> retained_rows;
  for (RowId id : next.row_ids()) {
    if (before.has_row(id)) {
      retained_rows.push_back(id);
    } else {
      AddedRow row{id, {}};
      const std::size_t r = *next.row_position(id);
      for (std::size_t c : retained_next_cols) {
        row.values.emplace_back(next.columns()[c].name, next.at(r, c));
      }
      cs.added_rows.push_back(std::move(row));
    }
  }
  for (RowId id : before.row_ids()) {
    if (!next.has_row(id)) cs.removed_rows.push_back(id);
  }
  std::sort(cs.added_rows.begin(), cs.added_rows.end(),
            [](const AddedRow& a, const AddedRow& b) { return a.row_id < b.row_id; });
  std::sort(cs.removed_rows.begin(), cs.removed_rows.end());

  std::vector<RowId> sorted_retained = retained_rows;
  std::sort(sorted_retained.begin(), sorted_retained.end());
  for (RowId id : sorted_retained) {
    const std::size_t pr = *before.row_position(id);
    const std::size_t nr = *next.row_position(id);
    for (std::size_t c : retained_next_cols) {
      const std::size_t pc = *before.column_index(next.columns()[c].name);
      const CellValue& old_value = before.at(pr, pc);
      const CellValue& new_value = next.at(nr, c);
      if (!(old_value == new_value)) {
        cs.modified_cells.push_back({id, next.columns()[c].name, old_value, new_value});
      }
    }
  }

  // Natural orders apply() would produce without explicit ordering.
  std::vector<std::string> natural_cols;
  for (const auto& c : before.columns()) {
    if (next.has_column(c.name)) natural_cols.push_back(c.name);
  }
  for (const auto& c : cs.added_columns) natural_cols.push_back(c.name);
  if (natural_cols != next.column_names()) cs.column_order = next.column_names();

  std::vector<RowId> natural_rows;
  for (RowId id : before.row_ids()) {
    if (next.has_row(id)) natural_rows.push_back(id);
  }
  for (const auto& r : cs.added_rows) natural_rows.push_back(r.row_id);
  if (natural_rows != next.row_ids()) cs.row_order = next.row_ids();

  if (!prev) {
    cs.full_replacement = true;
  } else if (!before.empty() && retained_rows.empty() && retained_next_cols.empty()) {
    cs.full_replacement = true;
  }
  return cs;
}

TabularFrame apply(const TabularFrame& prev, const ChangeSet& changes) {
  // Working copy as column-major maps keyed by row id.
  std::vector<ColumnDescriptor> columns = prev.columns();
  std::vector<RowId> row_ids = prev.row_ids();

  std::unordered_map<std::string, std::unordered_map<RowId, CellValue>> cells;
  for (std::size_t c = 0; c < prev.num_columns(); ++c) {
    auto& col = cells[prev.columns()[c].name];
    for (std::size_t r = 0; r < prev.num_rows(); ++r) col[prev.row_ids()[r]] = prev.at(r, c);
  }

  for (const auto& removed : changes.removed_columns) {
    auto it = std::find_if(columns.begin(), columns.end(),
                           [&](const ColumnDescriptor& d) { return d.name == removed.name; });
    if (it == columns.end()) {
      throw InconsistentChange("removed column '" + removed.name + "' is not in the frame");
    }
    columns.erase(it);
    cells.erase(removed.name);
  }

  std::unordered_set<RowId> removed_rows(changes.removed_rows.begin(), changes.removed_rows.end());
  for (RowId id : changes.removed_rows) {
    if (!prev.has_row(id)) {
      throw InconsistentChange("removed row " + std::to_string(id) + " is not in the frame");
    }
  }
  row_ids.erase(std::remove_if(row_ids.begin(), row_ids.end(),
                               [&](RowId id) { return removed_rows.count(id) > 0; }),
                row_ids.end());
  for (auto& [name, col] : cells) {
    for (RowId id : changes.removed_rows) col.erase(id);
  }

  for (const auto& retype : changes.retyped_columns) {
    auto it = std::find_if(columns.begin(), columns.end(),
                           [&](const ColumnDescriptor& d) { return d.name == retype.name; });
    if (it == columns.end()) {
      throw InconsistentChange("retyped column '" + retype.name + "' is not in the frame");
    }
    it->dtype = retype.new_dtype;
  }

  for (const auto& added : changes.added_rows) {
    if (prev.has_row(added.row_id) && !removed_rows.count(added.row_id)) {
      throw InconsistentChange("added row " + std::to_string(added.row_id) + " already exists");
    }
    row_ids.push_back(added.row_id);
    for (const auto& [name, value] : added.values) {
      auto it = cells.find(name);
      if (it == cells.end()) {
        throw InconsistentChange("added row " + std::to_string(added.row_id) +
                                 " references unknown column '" + name + "'");
      }
      it->second[added.row_id] = value;
    }
  }

  for (const auto& added : changes.added_columns) {
    if (cells.count(added.name)) {
      throw InconsistentChange("added column '" + added.name + "' already exists");
    }
    columns.push_back({added.name, added.dtype});
    auto& col = cells[added.name];
    for (const auto& [id, value] : added.values) col[id] = value;
  }

  std::unordered_set<RowId> live(row_ids.begin(), row_ids.end());
  for (const auto& m : changes.modified_cells) {
    auto it = cells.find(m.column);
    if (it == cells.end()) {
      throw InconsistentChange("modified cell references unknown column '" + m.column + "'");
    }
    if (!live.count(m.row_id)) {
      throw InconsistentChange("modified cell references unknown row " + std::to_string(m.row_id));
    }
    it->second[m.row_id] = m.new_value;
  }

  if (!changes.column_order.empty()) {
    std::vector<ColumnDescriptor> ordered;
    for (const auto& name : changes.column_order) {
      auto it = std::find_if(columns.begin(), columns.end(),
                             [&](const ColumnDescriptor& d) { return d.name == name; });
      if (it == columns.end()) {
        throw InconsistentChange("column order names unknown column '" + name + "'");
      }
      ordered.push_back(*it);
    }
    if (ordered.size() != columns.size()) {
      throw InconsistentChange("column order does not cover every column");
    }
    columns = std::move(ordered);
  }
  if (!changes.row_order.empty()) {
    if (changes.row_order.size() != row_ids.size()) {
      throw InconsistentChange("row order does not cover every row");
    }
    for (RowId id : changes.row_order) {
      if (!live.count(id)) {
        throw InconsistentChange("row order names unknown row " + std::to_string(id));
      }
    }
    row_ids = changes.row_order;
  }

  std::vector<std::vector<CellValue>> rows;
  rows.reserve(row_ids.size());
  for (RowId id : row_ids) {
    std::vector<CellValue> row;
    row.reserve(columns.size());
    for (const auto& c : columns) {
      const auto& col = cells[c.name];
      auto it = col.find(id);
      if (it == col.end()) {
        throw InconsistentChange("no value for row " + std::to_string(id) + " in column '" +
                                 c.name + "'");
      }
      row.push_back(it->second);
    }
    rows.push_back(std::move(row));
  }
  return TabularFrame(std::move(columns), std::move(row_ids), std::move(rows));
}

}  // namespace provcard
