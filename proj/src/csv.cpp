#include "provcard/csv.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "provcard/errors.hpp"

namespace provcard {

namespace {

struct Field {
  std::string text;
  bool quoted = false;
};

using Record = std::vector<Field>;

std::vector<Record> split_records(std::string_view text) {
  std::vector<Record> records;
  Record record;
  Field field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field = Field{};
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.text += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !field.quoted) {
          throw ParseError("line " + std::to_string(line) + ": stray quote inside unquoted field");
        }
        in_quotes = true;
        field.quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        if (field.quoted) {
          throw ParseError("line " + std::to_string(line) + ": text after closing quote");
        }
        field.text += ch;
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field at end of input");
  if (field_started || !record.empty()) end_record();
  return records;
}

bool is_bool_token(const std::string& s, bool* value) {
  std::string lower;
  for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "true" || lower == "1") {
    *value = true;
    return true;
  }
  if (lower == "false" || lower == "0") {
    *value = false;
    return true;
  }
  return false;
}

bool is_missing(const Field& f) { return !f.quoted && f.text.empty(); }

DType infer_field_dtype(const std::vector<Record>& records, std::size_t col) {
  bool numeric = true, boolean = true;
  std::set<std::string> distinct;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const Field& f = records[r][col];
    if (is_missing(f)) continue;
    numeric = numeric && parse_decimal(f.text).has_value();
    bool b = false;
    boolean = boolean && is_bool_token(f.text, &b);
    if (distinct.size() <= kCategoricalLimit) distinct.insert(f.text);
  }
  if (numeric) return DType::numeric;
  if (boolean) return DType::boolean;
  return distinct.size() <= kCategoricalLimit ? DType::categorical : DType::text;
}

CellValue convert(const Field& f, DType dtype, std::size_t line, const std::string& column) {
  if (is_missing(f)) return CellValue::missing();
  switch (dtype) {
    case DType::numeric: {
      auto v = parse_decimal(f.text);
      if (!v) {
        throw ParseError("line " + std::to_string(line) + ": column '" + column +
                         "' expects a number, got '" + f.text + "'");
      }
      return CellValue::number(*v);
    }
    case DType::boolean: {
      bool b = false;
      if (!is_bool_token(f.text, &b)) {
        throw ParseError("line " + std::to_string(line) + ": column '" + column +
                         "' expects a boolean, got '" + f.text + "'");
      }
      return CellValue::boolean(b);
    }
    case DType::categorical:
    case DType::text:
      return CellValue::text(f.text);
  }
  return CellValue::missing();
}

bool needs_quotes(const std::string& s) {
  return s.empty() || s.find_first_of(",\"\n\r") != std::string::npos || s.front() == ' ' ||
         s.back() == ' ';
}

void write_field(std::ostringstream& out, const CellValue& v) {
  if (v.is_missing()) return;
  std::string s = v.to_string();
  if (!v.is_text() || !needs_quotes(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

TabularFrame parse_snapshot_csv(std::string_view text, const std::vector<DType>* dtypes) {
  std::vector<Record> records = split_records(text);
  // A trailing blank line parses as a single missing field; drop those.
  while (records.size() > 1 && records.back().size() == 1 && is_missing(records.back()[0])) {
    records.pop_back();
  }
  if (records.empty()) return TabularFrame();

  const Record& header = records.front();
  const bool has_row_ids = !header.empty() && header.front().text == kRowIdColumn;
  const std::size_t first = has_row_ids ? 1 : 0;

  std::vector<std::string> names;
  std::vector<std::string> duplicates;
  std::set<std::string> seen;
  for (std::size_t c = first; c < header.size(); ++c) {
    const std::string& name = header[c].text;
    if (name.empty() && !header[c].quoted && header.size() == 1) break;
    if (!seen.insert(name).second &&
        std::find(duplicates.begin(), duplicates.end(), name) == duplicates.end()) {
      duplicates.push_back(name);
    }
    names.push_back(name);
  }
  if (!duplicates.empty()) {
    std::string list;
    for (const auto& d : duplicates) list += (list.empty() ? "'" : ", '") + d + "'";
    throw ParseError("duplicate column names: " + list);
  }
  if (dtypes && dtypes->size() != names.size()) {
    throw ParseError("dtype list has " + std::to_string(dtypes->size()) + " entries for " +
                     std::to_string(names.size()) + " columns");
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != header.size()) {
      throw ParseError("line " + std::to_string(r + 1) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(records[r].size()));
    }
  }

  std::vector<ColumnDescriptor> columns;
  for (std::size_t c = 0; c < names.size(); ++c) {
    DType dtype = dtypes ? (*dtypes)[c] : infer_field_dtype(records, c + first);
    columns.push_back({names[c], dtype});
  }

  std::vector<RowId> row_ids;
  std::vector<std::vector<CellValue>> rows;
  row_ids.reserve(records.size() - 1);
  rows.reserve(records.size() - 1);
  std::set<RowId> seen_ids;
  for (std::size_t r = 1; r < records.size(); ++r) {
    RowId id = static_cast<RowId>(r - 1);
    if (has_row_ids) {
      const std::string& raw = records[r][0].text;
      auto v = parse_decimal(raw);
      if (!v || *v != static_cast<double>(static_cast<RowId>(*v))) {
        throw ParseError("line " + std::to_string(r + 1) + ": row id '" + raw +
                         "' is not an integer");
      }
      id = static_cast<RowId>(*v);
    }
    if (!seen_ids.insert(id).second) {
      throw ParseError("line " + std::to_string(r + 1) + ": duplicate row id " +
                       std::to_string(id));
    }
    row_ids.push_back(id);
    std::vector<CellValue> row;
    row.reserve(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      row.push_back(convert(records[r][c + first], columns[c].dtype, r + 1, columns[c].name));
    }
    rows.push_back(std::move(row));
  }
  return TabularFrame(std::move(columns), std::move(row_ids), std::move(rows));
}

TabularFrame read_snapshot_csv(const std::filesystem::path& path,
                               const std::vector<DType>* dtypes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open snapshot '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_snapshot_csv(buf.str(), dtypes);
}

std::string write_snapshot_csv(const TabularFrame& frame) {
  std::ostringstream out;
  out << kRowIdColumn;
  for (const auto& c : frame.columns()) {
    out << ',';
    write_field(out, CellValue::text(c.name));
  }
  out << '\n';
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    out << frame.row_ids()[r];
    for (std::size_t c = 0; c < frame.num_columns(); ++c) {
      out << ',';
      write_field(out, frame.at(r, c));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace provcard
