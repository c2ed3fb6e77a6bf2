#include "provcard/frame.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "provcard/errors.hpp"

namespace provcard {

namespace {

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += "'" + n + "'";
  }
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const bool same = std::tolower(static_cast<unsigned char>(a[i - 1])) ==
                        std::tolower(static_cast<unsigned char>(b[j - 1]));
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (same ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

UnknownColumn::UnknownColumn(const std::string& column, std::vector<std::string> nearest)
    : Error("unknown column '" + column + "'" +
            (nearest.empty() ? std::string() : "; nearest: " + join_names(nearest))),
      column_(column),
      nearest_(std::move(nearest)) {}

std::string_view to_string(DType dtype) {
  switch (dtype) {
    case DType::numeric: return "numeric";
    case DType::categorical: return "categorical";
    case DType::boolean: return "boolean";
    case DType::text: return "text";
  }
  return "text";
}

DType parse_dtype(std::string_view name) {
  if (name == "numeric") return DType::numeric;
  if (name == "categorical") return DType::categorical;
  if (name == "boolean") return DType::boolean;
  if (name == "text") return DType::text;
  throw ParseError("unknown dtype '" + std::string(name) + "'");
}

CellValue CellValue::number(double value) {
  CellValue v;
  if (std::isfinite(value)) v.value_ = value;
  return v;
}

CellValue CellValue::text(std::string value) {
  CellValue v;
  v.value_ = std::move(value);
  return v;
}

CellValue CellValue::boolean(bool value) {
  CellValue v;
  v.value_ = value;
  return v;
}

std::string CellValue::to_string() const {
  switch (kind()) {
    case Kind::missing: return "";
    case Kind::number: return format_number(as_number());
    case Kind::text: return as_text();
    case Kind::boolean: return as_bool() ? "True" : "False";
  }
  return "";
}

bool operator==(const CellValue& a, const CellValue& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case CellValue::Kind::missing: return true;
    case CellValue::Kind::number: {
      const double x = a.as_number(), y = b.as_number();
      if (x == y) return true;
      if (std::isinf(x) || std::isinf(y)) return false;
      const double scale = std::max({1.0, std::abs(x), std::abs(y)});
      return std::abs(x - y) <= 1e-12 * scale;
    }
    case CellValue::Kind::text: return a.as_text() == b.as_text();
    case CellValue::Kind::boolean: return a.as_bool() == b.as_bool();
  }
  return false;
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, end);
}

std::optional<double> parse_decimal(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  if (i < n && (text[i] == '+' || text[i] == '-')) ++i;
  std::size_t digits = 0;
  while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++digits;
  if (i < n && text[i] == '.') {
    ++i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++digits;
  }
  if (digits == 0) return std::nullopt;
  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    if (i < n && (text[i] == '+' || text[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++exp_digits;
    if (exp_digits == 0) return std::nullopt;
  }
  if (i != n) return std::nullopt;
  // from_chars rejects a leading '+'.
  std::string_view body = text;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
  if (ec != std::errc() || ptr != body.data() + body.size()) return std::nullopt;
  return out;
}

DType infer_dtype(std::span<const CellValue> values) {
  bool all_numbers = true, all_bools = true;
  std::set<std::string> distinct;
  for (const auto& v : values) {
    if (v.is_missing()) continue;
    all_numbers = all_numbers && v.is_number();
    all_bools = all_bools && v.is_bool();
    if (distinct.size() <= kCategoricalLimit) distinct.insert(v.to_string());
  }
  if (all_numbers) return DType::numeric;
  if (all_bools) return DType::boolean;
  return distinct.size() <= kCategoricalLimit ? DType::categorical : DType::text;
}

TabularFrame::TabularFrame(std::vector<ColumnDescriptor> columns, std::vector<RowId> row_ids,
                           std::vector<std::vector<CellValue>> rows)
    : columns_(std::move(columns)), row_ids_(std::move(row_ids)), rows_(std::move(rows)) {
  if (row_ids_.size() != rows_.size()) {
    throw ValidationError("frame has " + std::to_string(rows_.size()) + " rows but " +
                          std::to_string(row_ids_.size()) + " row ids");
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != columns_.size()) {
      throw ValidationError("row " + std::to_string(row_ids_[r]) + " has " +
                            std::to_string(rows_[r].size()) + " cells, expected " +
                            std::to_string(columns_.size()));
    }
  }
  build_indexes();
}

void TabularFrame::build_indexes() {
  std::vector<std::string> duplicates;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (!column_lookup_.emplace(columns_[c].name, c).second) {
      if (std::find(duplicates.begin(), duplicates.end(), columns_[c].name) == duplicates.end())
        duplicates.push_back(columns_[c].name);
    }
  }
  if (!duplicates.empty()) throw ValidationError("duplicate column names: " + join_names(duplicates));
  for (std::size_t r = 0; r < row_ids_.size(); ++r) {
    if (!row_lookup_.emplace(row_ids_[r], r).second) {
      throw ValidationError("duplicate row id " + std::to_string(row_ids_[r]));
    }
  }
}

TabularFrame TabularFrame::from_values(const std::vector<std::string>& names,
                                       std::vector<RowId> row_ids,
                                       std::vector<std::vector<CellValue>> rows) {
  std::vector<ColumnDescriptor> columns;
  columns.reserve(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::vector<CellValue> values;
    values.reserve(rows.size());
    for (const auto& row : rows) {
      if (c < row.size()) values.push_back(row[c]);
    }
    columns.push_back({names[c], infer_dtype(values)});
  }
  return TabularFrame(std::move(columns), std::move(row_ids), std::move(rows));
}

std::optional<std::size_t> TabularFrame::column_index(std::string_view name) const {
  auto it = column_lookup_.find(std::string(name));
  if (it == column_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TabularFrame::row_position(RowId id) const {
  auto it = row_lookup_.find(id);
  if (it == row_lookup_.end()) return std::nullopt;
  return it->second;
}

const CellValue* TabularFrame::find(RowId id, std::string_view column) const {
  auto r = row_position(id);
  auto c = column_index(column);
  if (!r || !c) return nullptr;
  return &rows_[*r][*c];
}

std::vector<CellValue> TabularFrame::column_values(std::size_t column) const {
  std::vector<CellValue> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row[column]);
  return out;
}

std::vector<std::string> TabularFrame::column_names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

bool operator==(const TabularFrame& a, const TabularFrame& b) {
  return a.columns_ == b.columns_ && a.row_ids_ == b.row_ids_ && a.rows_ == b.rows_;
}

std::vector<std::string> nearest_names(std::string_view name,
                                       const std::vector<std::string>& candidates,
                                       std::size_t limit) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) scored.emplace_back(edit_distance(name, c), c);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < limit; ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace provcard
