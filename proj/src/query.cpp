#include "provcard/query.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "provcard/errors.hpp"

namespace provcard {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Word {
  std::string raw;    // quotes stripped, case kept
  std::string lower;  // lowercase raw
};

bool is_symbol_char(char c) { return c == '<' || c == '>' || c == '=' || c == '!'; }

std::vector<Word> split_words(std::string_view text) {
  // Comparison symbols and commas become their own words.
  std::string spaced;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_symbol_char(c)) {
      spaced += ' ';
      while (i < text.size() && is_symbol_char(text[i])) spaced += text[i++];
      spaced += ' ';
      --i;
    } else if (c == ',' || c == ';') {
      spaced += " , ";
    } else if (c == '(' || c == ')' || c == '?') {
      spaced += ' ';
    } else {
      spaced += c;
    }
  }

  static constexpr std::array<std::string_view, 6> quotes = {
      "\"", "'", "\xE2\x80\x9C", "\xE2\x80\x9D", "\xE2\x80\x98", "\xE2\x80\x99"};
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < spaced.size()) {
    while (i < spaced.size() && std::isspace(static_cast<unsigned char>(spaced[i]))) ++i;
    std::size_t j = i;
    while (j < spaced.size() && !std::isspace(static_cast<unsigned char>(spaced[j]))) ++j;
    std::string w = spaced.substr(i, j - i);
    i = j;
    bool stripped = true;
    while (stripped && !w.empty()) {
      stripped = false;
      for (auto q : quotes) {
        if (w.size() >= q.size() && w.compare(0, q.size(), q) == 0) {
          w.erase(0, q.size());
          stripped = true;
        }
        if (w.size() >= q.size() && w.compare(w.size() - q.size(), q.size(), q) == 0) {
          w.erase(w.size() - q.size());
          stripped = true;
        }
      }
      // A sentence-final period, but not a decimal point.
      if (w.size() > 1 && (w.back() == '.' || w.back() == '!') &&
          !std::isdigit(static_cast<unsigned char>(w[w.size() - 2]))) {
        w.pop_back();
        stripped = true;
      } else if (w == ".") {
        w.clear();
      }
    }
    if (!w.empty()) words.push_back({w, lower(w)});
  }
  return words;
}

struct Phrase {
  std::vector<std::string_view> words;
  CompareOp op;
};

const std::vector<Phrase>& comparator_phrases() {
  static const std::vector<Phrase> phrases = [] {
    std::vector<Phrase> p = {
        {{"greater", "than", "or", "equal", "to"}, CompareOp::ge},
        {{"more", "than", "or", "equal", "to"}, CompareOp::ge},
        {{"less", "than", "or", "equal", "to"}, CompareOp::le},
        {{"fewer", "than", "or", "equal", "to"}, CompareOp::le},
        {{"not", "equal", "to"}, CompareOp::ne},
        {{"does", "not", "equal"}, CompareOp::ne},
        {{"is", "not"}, CompareOp::ne},
        {{"isn't"}, CompareOp::ne},
        {{"at", "least"}, CompareOp::ge},
        {{"no", "less", "than"}, CompareOp::ge},
        {{"not", "less", "than"}, CompareOp::ge},
        {{"at", "most"}, CompareOp::le},
        {{"no", "more", "than"}, CompareOp::le},
        {{"not", "more", "than"}, CompareOp::le},
        {{"less", "than"}, CompareOp::lt},
        {{"lower", "than"}, CompareOp::lt},
        {{"smaller", "than"}, CompareOp::lt},
        {{"fewer", "than"}, CompareOp::lt},
        {{"below"}, CompareOp::lt},
        {{"under"}, CompareOp::lt},
        {{"greater", "than"}, CompareOp::gt},
        {{"more", "than"}, CompareOp::gt},
        {{"higher", "than"}, CompareOp::gt},
        {{"larger", "than"}, CompareOp::gt},
        {{"above"}, CompareOp::gt},
        {{"over"}, CompareOp::gt},
        {{"exceeds"}, CompareOp::gt},
        {{"equal", "to"}, CompareOp::eq},
        {{"equals"}, CompareOp::eq},
        {{"exactly"}, CompareOp::eq},
        {{">="}, CompareOp::ge},
        {{"=>"}, CompareOp::ge},
        {{"<="}, CompareOp::le},
        {{"=<"}, CompareOp::le},
        {{"!="}, CompareOp::ne},
        {{"<>"}, CompareOp::ne},
        {{"<"}, CompareOp::lt},
        {{">"}, CompareOp::gt},
        {{"=="}, CompareOp::eq},
        {{"="}, CompareOp::eq},
    };
    std::stable_sort(p.begin(), p.end(),
                     [](const Phrase& a, const Phrase& b) { return a.words.size() > b.words.size(); });
    return p;
  }();
  return phrases;
}

bool phrase_at(const std::vector<Word>& words, std::size_t i, const Phrase& p) {
  if (i + p.words.size() > words.size()) return false;
  for (std::size_t k = 0; k < p.words.size(); ++k) {
    if (words[i + k].lower != p.words[k]) return false;
  }
  return true;
}

// Comparator starting at word i: the operator and the number of words used.
std::optional<std::pair<CompareOp, std::size_t>> comparator_at(const std::vector<Word>& words,
                                                                std::size_t i) {
  static const std::set<std::string_view> copulas = {"is", "are", "was", "were"};
  if (i < words.size() && copulas.count(words[i].lower)) {
    for (const auto& p : comparator_phrases()) {
      if (phrase_at(words, i + 1, p)) return std::pair{p.op, p.words.size() + 1};
    }
  }
  for (const auto& p : comparator_phrases()) {
    if (phrase_at(words, i, p)) return std::pair{p.op, p.words.size()};
  }
  if (i < words.size() && copulas.count(words[i].lower)) return std::pair{CompareOp::eq, std::size_t{1}};
  return std::nullopt;
}

const std::set<std::string_view>& filler_words() {
  static const std::set<std::string_view> words = {
      ",",      "and",     "show",   "me",      "give",    "find",    "list",   "all",
      "rows",   "row",     "records", "entries", "where",   "whose",   "who",    "with",
      "having", "has",     "have",   "that",    "which",   "the",     "a",      "an",
      "of",     "for",     "value",  "values",  "their",   "its",     "in",     "is",
      "are",    "patients", "students", "subjects", "people", "data",  "only",   "whom"};
  return words;
}

const std::set<std::string_view>& value_stops() {
  static const std::set<std::string_view> words = {",", "and", "or", "whose", "where", "who",
                                                   "with", "which", "that", "having"};
  return words;
}

bool is_decimal(std::string_view s) { return parse_decimal(s).has_value(); }

constexpr std::size_t kMaxColumnWords = 8;

}  // namespace

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "==";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "==";
}

CompareOp parse_compare_op(std::string_view symbol) {
  if (symbol == "=") return CompareOp::eq;
  for (auto op : {CompareOp::eq, CompareOp::ne, CompareOp::lt, CompareOp::le, CompareOp::gt, CompareOp::ge}) {
    if (to_string(op) == symbol) return op;
  }
  throw ParseError("unknown comparison operator '" + std::string(symbol) + "'");
}

bool is_ordering(CompareOp op) { return op != CompareOp::eq && op != CompareOp::ne; }

std::string normalize_column_key(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (static_cast<unsigned char>(c) >= 0x80) {
      out += c;
    }
  }
  return out;
}

QuerySchema QuerySchema::from_names(const std::vector<std::string>& names) {
  QuerySchema s;
  for (const auto& n : names) s.columns.push_back({n, std::nullopt, {}});
  return s;
}

QuerySchema QuerySchema::from_frame(const TabularFrame& frame) {
  QuerySchema s;
  for (std::size_t c = 0; c < frame.num_columns(); ++c) {
    QueryColumn col{frame.columns()[c].name, frame.columns()[c].dtype, {}};
    if (col.dtype == DType::categorical) {
      for (std::size_t r = 0; r < frame.num_rows(); ++r) {
        const auto& v = frame.at(r, c);
        if (v.is_missing()) continue;
        const std::string text = v.to_string();
        if (std::find(col.categories.begin(), col.categories.end(), text) == col.categories.end()) {
          col.categories.push_back(text);
        }
      }
    }
    s.columns.push_back(std::move(col));
  }
  return s;
}

const QueryColumn* QuerySchema::find(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<std::string> QuerySchema::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

std::optional<std::string> resolve_column(std::string_view reference, const QuerySchema& schema) {
  if (schema.find(reference)) return std::string(reference);
  const std::string key = normalize_column_key(reference);
  if (key.empty()) return std::nullopt;
  for (const auto& c : schema.columns) {
    if (normalize_column_key(c.name) == key) return c.name;
  }
  return std::nullopt;
}

namespace {

CellValue type_value(std::string_view text, const QueryColumn& col, CompareOp op) {
  const bool text_typed = col.dtype == DType::categorical || col.dtype == DType::text;
  if (is_ordering(op) && (text_typed || col.dtype == DType::boolean)) {
    throw ValidationError("operator " + std::string(to_string(op)) + " needs a numeric column, but '" +
                          col.name + "' is " + std::string(to_string(*col.dtype)));
  }
  if (col.dtype == DType::numeric || (!col.dtype && is_decimal(text))) {
    const auto number = parse_decimal(text);
    if (!number) {
      throw ValidationError("column '" + col.name + "' is numeric but '" + std::string(text) +
                            "' is not a number");
    }
    return CellValue::number(*number);
  }
  if (col.dtype == DType::boolean) {
    const std::string l = lower(text);
    if (l == "true" || l == "1" || l == "yes") return CellValue::boolean(true);
    if (l == "false" || l == "0" || l == "no") return CellValue::boolean(false);
    throw ValidationError("column '" + col.name + "' is boolean but '" + std::string(text) +
                          "' is not true or false");
  }
  if (is_ordering(op)) {
    throw ValidationError("operator " + std::string(to_string(op)) + " needs a number, got '" +
                          std::string(text) + "'");
  }
  for (const auto& cat : col.categories) {
    if (lower(cat) == lower(text)) return CellValue::text(cat);
  }
  return CellValue::text(std::string(text));
}

class GrammarParser {
 public:
  GrammarParser(std::string_view text, const QuerySchema& schema)
      : words_(split_words(text)), schema_(schema) {}

  std::vector<FilterCondition> run() {
    std::size_t i = 0;
    while (i < words_.size()) {
      const Word& w = words_[i];
      if (w.lower == "or") {
        throw ParseError("queries joined with 'or' are not supported; use 'and'");
      }
      if (w.lower == "between") {
        i = parse_between(i);
        continue;
      }
      if (auto span = column_at(i)) {
        current_ = span->first;
        column_fresh_ = true;
        unresolved_.clear();
        i += span->second;
        continue;
      }
      if (auto cmp = comparator_at(words_, i); cmp && (w.lower != "is" || column_fresh_ || !current_)) {
        i = parse_comparison(i, cmp->first, cmp->second);
        continue;
      }
      if (auto cat = category_at(i)) {
        out_.push_back({cat->column, CompareOp::eq, CellValue::text(cat->value)});
        i += cat->length;
        continue;
      }
      if (!filler_words().count(w.lower)) unresolved_.push_back(w.raw);
      ++i;
    }
    if (out_.empty()) throw ParseError("the query produced no filter conditions");
    return out_;
  }

 private:
  struct CategoryMatch {
    std::string column;
    std::string value;
    std::size_t length;
  };

  std::optional<std::pair<std::string, std::size_t>> column_at(std::size_t i) const {
    const std::size_t max = std::min(kMaxColumnWords, words_.size() - i);
    for (std::size_t len = max; len >= 1; --len) {
      std::string joined;
      for (std::size_t k = 0; k < len; ++k) joined += words_[i + k].raw;
      if (normalize_column_key(joined).empty()) continue;
      if (auto col = resolve_column(joined, schema_)) return std::pair{*col, len};
    }
    return std::nullopt;
  }

  std::optional<CategoryMatch> category_at(std::size_t i) const {
    std::optional<CategoryMatch> best;
    for (const auto& col : schema_.columns) {
      for (const auto& cat : col.categories) {
        const auto parts = split_words(cat);
        if (parts.empty() || i + parts.size() > words_.size()) continue;
        bool match = true;
        for (std::size_t k = 0; k < parts.size() && match; ++k) match = words_[i + k].lower == parts[k].lower;
        if (match && (!best || parts.size() > best->length)) best = CategoryMatch{col.name, cat, parts.size()};
      }
    }
    return best;
  }

  // Value words after a comparator: one token for numbers, a category span when
  // the column lists categories, else words up to the next clause boundary.
  std::pair<std::string, std::size_t> value_at(std::size_t j, const QueryColumn& col) const {
    if (j >= words_.size()) throw ParseError("missing value after the comparison on '" + col.name + "'");
    std::size_t best_len = 0;
    std::string best;
    for (const auto& cat : col.categories) {
      const auto parts = split_words(cat);
      if (parts.empty() || j + parts.size() > words_.size() || parts.size() <= best_len) continue;
      bool match = true;
      for (std::size_t k = 0; k < parts.size() && match; ++k) match = words_[j + k].lower == parts[k].lower;
      if (match) {
        best_len = parts.size();
        best = cat;
      }
    }
    if (best_len > 0) return {best, best_len};
    if (col.dtype == DType::numeric || col.dtype == DType::boolean || is_decimal(words_[j].raw)) {
      return {words_[j].raw, 1};
    }
    std::string text = words_[j].raw;
    std::size_t k = j + 1;
    while (k < words_.size() && !value_stops().count(words_[k].lower) && !column_at(k) &&
           !comparator_at(words_, k)) {
      text += " " + words_[k].raw;
      ++k;
    }
    return {text, k - j};
  }

  const QueryColumn& target_column(std::string_view context) {
    if (!column_fresh_ && !unresolved_.empty()) {
      std::string phrase;
      for (const auto& u : unresolved_) phrase += (phrase.empty() ? "" : " ") + u;
      throw UnknownColumn(phrase, nearest_names(phrase, schema_.names()));
    }
    if (!current_) {
      throw UnknownColumn(std::string(context), nearest_names(context, schema_.names()));
    }
    return *schema_.find(*current_);
  }

  std::size_t parse_comparison(std::size_t i, CompareOp op, std::size_t len) {
    std::string context;
    for (std::size_t k = i; k < i + len; ++k) context += (context.empty() ? "" : " ") + words_[k].raw;
    const QueryColumn& col = target_column(context);
    const auto [text, used] = value_at(i + len, col);
    out_.push_back({col.name, op, type_value(text, col, op)});
    column_fresh_ = false;
    unresolved_.clear();
    return i + len + used;
  }

  std::size_t parse_between(std::size_t i) {
    std::size_t j = i + 1;
    std::optional<std::string> named;
    while (j < words_.size() && !is_decimal(words_[j].raw)) {
      if (auto span = column_at(j)) {
        named = span->first;
        j += span->second;
      } else if (filler_words().count(words_[j].lower)) {
        ++j;
      } else {
        unresolved_.push_back(words_[j].raw);
        ++j;
      }
    }
    if (named) {
      current_ = named;
      column_fresh_ = true;
      unresolved_.clear();
    }
    if (j + 2 >= words_.size()) {
      throw ParseError("'between' needs two bounds, as in 'between 25 and 35'");
    }
    const std::string sep = words_[j + 1].lower;
    if (sep != "and" && sep != "to" && sep != "-") {
      throw ParseError("'between' needs two bounds joined by 'and' or 'to'");
    }
    const QueryColumn& col = target_column("between");
    out_.push_back({col.name, CompareOp::ge, type_value(words_[j].raw, col, CompareOp::ge)});
    out_.push_back({col.name, CompareOp::le, type_value(words_[j + 2].raw, col, CompareOp::le)});
    column_fresh_ = false;
    unresolved_.clear();
    return j + 3;
  }

  std::vector<Word> words_;
  const QuerySchema& schema_;
  std::optional<std::string> current_;
  bool column_fresh_ = false;  // a column was named since the last condition
  std::vector<std::string> unresolved_;
  std::vector<FilterCondition> out_;
};

}  // namespace

std::vector<FilterCondition> parse_query_grammar(std::string_view text, const QuerySchema& schema) {
  std::string_view t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  if (t.empty()) throw ParseError("the query is empty");
  return GrammarParser(text, schema).run();
}

std::vector<FilterCondition> conditions_from_json(const llm::Json& reply, const QuerySchema& schema) {
  if (!reply.is_array()) throw ParseError("filter reply must be an array");
  std::vector<FilterCondition> out;
  for (const auto& e : reply) {
    const auto reference = e.at("column").get<std::string>();
    const auto column = resolve_column(reference, schema);
    if (!column) throw UnknownColumn(reference, nearest_names(reference, schema.names()));
    const QueryColumn& col = *schema.find(*column);
    const CompareOp op = parse_compare_op(e.at("operator").get<std::string>());
    const auto& v = e.at("value");
    std::string text;
    if (v.is_string()) {
      text = v.get<std::string>();
    } else if (v.is_boolean()) {
      text = v.get<bool>() ? "true" : "false";
    } else {
      text = format_number(v.get<double>());
    }
    out.push_back({col.name, op, type_value(text, col, op)});
  }
  if (out.empty()) throw ParseError("the query produced no filter conditions");
  return out;
}

std::vector<FilterCondition> parse_query(std::string_view text, const QuerySchema& schema,
                                         QueryBackend backend, llm::Gateway* gateway) {
  if (backend == QueryBackend::llm && gateway && gateway->enabled()) {
    std::string columns = "[";
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
      columns += (i ? ", " : "") + schema.columns[i].name;
    }
    columns += "]";
    try {
      const auto reply = gateway->complete_structured(
          llm::TemplateId::query_to_filters,
          {{"columns", columns}, {"natural_language_query", "\"" + std::string(text) + "\""}},
          llm::SchemaId::query_filters);
      return conditions_from_json(reply, schema);
    } catch (const llm::GatewayError&) {
      // fall through to the grammar
    }
  }
  return parse_query_grammar(text, schema);
}

bool condition_holds(const CellValue& cell, CompareOp op, const CellValue& value) {
  if (cell.is_missing() || value.is_missing()) return false;
  if (op == CompareOp::eq) return cell == value;
  if (op == CompareOp::ne) return !(cell == value);
  if (!cell.is_number() || !value.is_number()) return false;
  const double a = cell.as_number(), b = value.as_number();
  switch (op) {
    case CompareOp::lt: return a < b;
    case CompareOp::le: return a <= b || cell == value;
    case CompareOp::gt: return a > b;
    case CompareOp::ge: return a >= b || cell == value;
    default: return false;
  }
}

void validate_conditions(const std::vector<FilterCondition>& conditions, const TabularFrame& frame) {
  for (const auto& c : conditions) {
    const auto idx = frame.column_index(c.column);
    if (!idx) {
      throw ValidationError("condition names unknown column '" + c.column + "'");
    }
    const DType dtype = frame.columns()[*idx].dtype;
    if (is_ordering(c.op) && dtype != DType::numeric) {
      throw ValidationError("operator " + std::string(to_string(c.op)) + " needs a numeric column, but '" +
                            c.column + "' is " + std::string(to_string(dtype)));
    }
    const bool ok = c.value.is_missing() ||
                    (dtype == DType::numeric && c.value.is_number()) ||
                    (dtype == DType::boolean && c.value.is_bool()) ||
                    ((dtype == DType::categorical || dtype == DType::text) && c.value.is_text());
    if (!ok) {
      throw ValidationError("value '" + c.value.to_string() + "' does not fit " +
                            std::string(to_string(dtype)) + " column '" + c.column + "'");
    }
  }
}

QueryResult apply_filters(const TabularFrame& frame, const std::vector<FilterCondition>& conditions) {
  if (conditions.empty()) throw ParseError("no filter conditions to apply");
  validate_conditions(conditions, frame);
  std::vector<std::size_t> indexes;
  std::vector<std::string> referenced;
  for (const auto& c : conditions) {
    indexes.push_back(*frame.column_index(c.column));
    if (std::find(referenced.begin(), referenced.end(), c.column) == referenced.end()) {
      referenced.push_back(c.column);
    }
  }
  std::vector<std::size_t> order(frame.num_rows());
  for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return frame.row_ids()[a] < frame.row_ids()[b]; });

  QueryResult result;
  for (std::size_t r : order) {
    bool all = true;
    for (std::size_t k = 0; k < conditions.size() && all; ++k) {
      all = condition_holds(frame.at(r, indexes[k]), conditions[k].op, conditions[k].value);
    }
    if (!all) continue;
    const RowId id = frame.row_ids()[r];
    result.rows.push_back(id);
    for (const auto& col : referenced) result.cells.push_back({id, col});
  }
  return result;
}

}  // namespace provcard
