#include "provcard/snapgrid.hpp"

#include <algorithm>
#include <set>

#include "provcard/errors.hpp"

namespace provcard {

std::string_view to_string(CellState state) {
  switch (state) {
    case CellState::unchanged: return "unchanged";
    case CellState::modified: return "modified";
    case CellState::added: return "added";
    case CellState::removed: return "removed";
    case CellState::not_present: return "not_present";
    case CellState::query_match: return "query_match";
  }
  return "unchanged";
}

CellState parse_cell_state(std::string_view name) {
  for (auto s : {CellState::unchanged, CellState::modified, CellState::added, CellState::removed,
                 CellState::not_present, CellState::query_match}) {
    if (to_string(s) == name) return s;
  }
  throw ParseError("unknown cell state '" + std::string(name) + "'");
}

const TabularFrame ChangeIndex::kEmpty;

ChangeIndex::ChangeIndex(const ChangeSet& changes, const TabularFrame* prev,
                         const TabularFrame& next)
    : prev_(prev ? *prev : kEmpty), next_(next) {
  std::set<RowId> rows(next.row_ids().begin(), next.row_ids().end());
  rows.insert(prev_.row_ids().begin(), prev_.row_ids().end());
  rows_.assign(rows.begin(), rows.end());

  columns_ = next.column_names();
  std::size_t anchor = 0;
  for (const auto& c : prev_.columns()) {
    auto it = std::find(columns_.begin(), columns_.end(), c.name);
    if (it != columns_.end()) {
      anchor = static_cast<std::size_t>(it - columns_.begin()) + 1;
    } else {
      columns_.insert(columns_.begin() + static_cast<std::ptrdiff_t>(anchor), c.name);
      ++anchor;
    }
  }

  for (const auto& m : changes.modified_cells) modified_[m.column].insert(m.row_id);
}

bool ChangeIndex::in_prev(RowId row, const std::string& column) const {
  return prev_.has_row(row) && prev_.has_column(column);
}

bool ChangeIndex::in_next(RowId row, const std::string& column) const {
  return next_.has_row(row) && next_.has_column(column);
}

bool ChangeIndex::modified(RowId row, const std::string& column) const {
  auto it = modified_.find(column);
  return it != modified_.end() && it->second.count(row) > 0;
}

bool ChangeIndex::changed(RowId row, const std::string& column) const {
  return in_prev(row, column) != in_next(row, column) || modified(row, column);
}

std::size_t ChangeIndex::column_changes(const std::string& column) const {
  const bool p = prev_.has_column(column), n = next_.has_column(column);
  if (p && !n) return prev_.num_rows();
  if (n && !p) return next_.num_rows();
  if (!p && !n) return 0;
  std::size_t count = 0;
  for (RowId id : prev_.row_ids()) count += next_.has_row(id) ? 0 : 1;
  for (RowId id : next_.row_ids()) count += prev_.has_row(id) ? 0 : 1;
  auto it = modified_.find(column);
  if (it != modified_.end()) count += it->second.size();
  return count;
}

std::size_t ChangeIndex::row_changes(RowId row, const std::vector<std::string>& columns) const {
  std::size_t count = 0;
  for (const auto& c : columns) count += changed(row, c) ? 1 : 0;
  return count;
}

namespace {

std::vector<std::string> choose_columns(const ChangeIndex& index,
                                        const ColumnRelationships& relationships,
                                        const QueryFocus* query) {
  const auto& all = index.columns();
  std::set<std::string> qualifying;
  for (const auto& c : all) {
    if (index.column_changes(c) > 0) qualifying.insert(c);
  }
  for (const auto& rel : relationships) {
    for (const auto& src : rel.sources) {
      if (std::find(all.begin(), all.end(), src) != all.end()) qualifying.insert(src);
    }
  }

  std::vector<std::string> chosen;
  auto take = [&](const std::string& c) {
    if (chosen.size() < kGridColumns && std::find(chosen.begin(), chosen.end(), c) == chosen.end())
      chosen.push_back(c);
  };
  if (query) {
    for (const auto& c : query->columns) {
      if (std::find(all.begin(), all.end(), c) != all.end()) take(c);
    }
  }

  std::vector<std::string> ranked;
  for (const auto& c : all) {
    if (qualifying.count(c)) ranked.push_back(c);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [&](const std::string& a, const std::string& b) {
    return index.column_changes(a) > index.column_changes(b);
  });
  for (const auto& c : ranked) take(c);
  for (const auto& c : all) take(c);

  // Display in union order.
  std::vector<std::string> ordered;
  for (const auto& c : all) {
    if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) ordered.push_back(c);
  }
  return ordered;
}

}  // namespace

SnapGridSpec select_subset(const ChangeSet& changes, const TabularFrame* prev,
                           const TabularFrame& next, const ColumnRelationships& relationships,
                           const QueryFocus* query) {
  ChangeIndex index(changes, prev, next);
  SnapGridSpec spec;
  spec.columns = choose_columns(index, relationships, query);

  if (query) {
    std::vector<RowId> rows = query->rows;
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    for (RowId id : rows) {
      if (spec.rows.size() == kGridRows) break;
      if (std::binary_search(index.rows().begin(), index.rows().end(), id)) spec.rows.push_back(id);
    }
  } else {
    std::vector<std::pair<std::size_t, RowId>> scored;
    scored.reserve(index.rows().size());
    for (RowId id : index.rows()) scored.emplace_back(index.row_changes(id, spec.columns), id);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (std::size_t i = 0; i < scored.size() && i < kGridRows; ++i) {
      spec.rows.push_back(scored[i].second);
    }
    std::sort(spec.rows.begin(), spec.rows.end());
  }

  for (const auto& rel : relationships) {
    for (const auto& src : rel.sources) {
      if (std::find(spec.columns.begin(), spec.columns.end(), src) == spec.columns.end()) continue;
      auto box = std::find_if(spec.boxes.begin(), spec.boxes.end(),
                              [&](const RelationshipBox& b) { return b.source == src; });
      if (box == spec.boxes.end()) {
        spec.boxes.push_back({src, {rel.derived}});
      } else if (std::find(box->derived.begin(), box->derived.end(), rel.derived) ==
                 box->derived.end()) {
        box->derived.push_back(rel.derived);
      }
    }
  }
  return spec;
}

std::size_t coverage(const SnapGridSpec& spec, const ChangeIndex& index) {
  std::size_t total = 0;
  for (RowId id : spec.rows) total += index.row_changes(id, spec.columns);
  return total;
}

std::string ellipsize(std::string_view text, std::size_t max_chars) {
  std::size_t count = 0;
  std::size_t cut = text.size();
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto byte = static_cast<unsigned char>(text[i]);
    if ((byte & 0xC0) == 0x80) continue;  // continuation byte
    if (count == max_chars - 1) cut = i;
    ++count;
  }
  if (count <= max_chars) return std::string(text);
  return std::string(text.substr(0, cut)) + "…";
}

namespace {

// Missing cells read the way pandas prints them.
std::string shown(const CellValue& v) { return ellipsize(v.is_missing() ? "NaN" : v.to_string()); }

}  // namespace

SnapGrid render_snapgrid(const SnapGridSpec& spec, const ChangeSet& changes,
                         const TabularFrame* prev, const TabularFrame& next,
                         const std::vector<CellRef>* query_matches) {
  static const TabularFrame kEmpty;
  const TabularFrame& before = prev ? *prev : kEmpty;
  ChangeIndex index(changes, prev, next);

  SnapGrid grid;
  grid.rows = spec.rows;
  grid.boxes = spec.boxes;

  std::set<std::pair<RowId, std::string>> hits;
  if (query_matches) {
    for (const auto& ref : *query_matches) {
      if (!before.find(ref.row_id, ref.column) && !next.find(ref.row_id, ref.column)) {
        grid.warnings.push_back("query match (" + std::to_string(ref.row_id) + ", '" +
                                ref.column + "') is outside both frames; ignored");
        continue;
      }
      hits.emplace(ref.row_id, ref.column);
    }
  }

  std::set<std::string> boxed;
  for (const auto& b : spec.boxes) boxed.insert(b.source);

  for (const auto& name : spec.columns) {
    GridColumn col;
    col.name = name;
    const bool p = before.has_column(name), n = next.has_column(name);
    col.header_state = p && !n   ? CellState::removed
                       : n && !p ? CellState::added
                                 : CellState::unchanged;
    col.changed_count = index.column_changes(name);
    if (col.header_state == CellState::unchanged && col.changed_count > 0) {
      col.header_state = CellState::modified;
    }
    if (col.changed_count > kGridRows) col.overflow_count = col.changed_count;
    grid.columns.push_back(std::move(col));
  }

  for (RowId id : spec.rows) {
    std::vector<GridCell> row;
    row.reserve(spec.columns.size());
    for (const auto& name : spec.columns) {
      GridCell cell;
      const CellValue* old_value = before.find(id, name);
      const CellValue* new_value = next.find(id, name);
      if (old_value) cell.old_value = *old_value;
      if (new_value) cell.new_value = *new_value;
      cell.in_relationship_box = boxed.count(name) > 0;
      cell.query_hit = hits.count({id, name}) > 0;

      if (!old_value && !new_value) {
        cell.state = CellState::not_present;
      } else if (old_value && !new_value) {
        cell.state = CellState::removed;
        cell.display = shown(*old_value);
      } else if (!old_value && new_value) {
        cell.state = CellState::added;
        cell.display = shown(*new_value);
      } else if (index.modified(id, name)) {
        cell.state = CellState::modified;
        cell.display = shown(*old_value) + " → " + shown(*new_value);
      } else {
        cell.state = cell.query_hit ? CellState::query_match : CellState::unchanged;
        cell.display = shown(*new_value);
      }
      row.push_back(std::move(cell));
    }
    grid.cells.push_back(std::move(row));
  }
  return grid;
}

}  // namespace provcard
