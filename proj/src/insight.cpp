#include "provcard/insight.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "provcard/errors.hpp"
#include "provcard/pycode.hpp"

namespace provcard {

namespace {

using pycode::Call;
using pycode::Statement;

constexpr OperationKind kAllKinds[] = {
    OperationKind::dataset_loading,       OperationKind::missing_value_imputation,
    OperationKind::replace_missing_with_label, OperationKind::outlier_removal,
    OperationKind::one_hot_encoding,      OperationKind::categorical_to_numeric,
    OperationKind::feature_filtering,     OperationKind::dataset_splitting,
    OperationKind::model_training,        OperationKind::other};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (!contains(v, s)) v.push_back(s);
}

std::string quote(std::string_view s) { return "'" + std::string(s) + "'"; }

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? " and " : ", ";
    out += items[i];
  }
  return out;
}

std::vector<std::string> quoted(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& s : items) out.push_back(quote(s));
  return out;
}

std::string count_of(std::size_t n, std::string_view one, std::string_view many) {
  return std::to_string(n) + " " + std::string(n == 1 ? one : many);
}

std::string columns_phrase(const std::vector<std::string>& names) {
  return std::string(names.size() == 1 ? "column " : "columns ") + join_list(quoted(names));
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

bool has_call(const std::vector<Statement>& stmts, const Vocabulary& vocab, VocabKind kind) {
  for (const auto& st : stmts) {
    for (const auto& c : st.calls) {
      if (vocab.contains(kind, c.method)) return true;
    }
  }
  return false;
}

const Call* first_call(const std::vector<Statement>& stmts, const Vocabulary& vocab, VocabKind kind) {
  for (const auto& st : stmts) {
    for (const auto& c : st.calls) {
      if (vocab.contains(kind, c.method)) return &c;
    }
  }
  return nullptr;
}

bool is_binary_column(const ColumnValues& col) {
  for (const auto& [id, v] : col.values) {
    if (v.is_missing() || v.is_bool()) continue;
    if (!v.is_number() || (v.as_number() != 0.0 && v.as_number() != 1.0)) return false;
  }
  return true;
}

// Every added column is "<removed>_<suffix>" for some removed column.
bool added_by_prefix(const ChangeSet& changes) {
  if (changes.added_columns.empty() || changes.removed_columns.empty()) return false;
  for (const auto& a : changes.added_columns) {
    bool matched = false;
    for (const auto& r : changes.removed_columns) {
      matched = matched || a.name.rfind(r.name + "_", 0) == 0;
    }
    if (!matched) return false;
  }
  return true;
}

bool retyped_to_numeric(const ChangeSet& changes) {
  for (const auto& r : changes.retyped_columns) {
    const bool was_label = r.old_dtype == DType::categorical || r.old_dtype == DType::text;
    const bool now_number = r.new_dtype == DType::numeric || r.new_dtype == DType::boolean;
    if (was_label && now_number) return true;
  }
  if (changes.modified_cells.empty()) return false;
  return std::all_of(changes.modified_cells.begin(), changes.modified_cells.end(),
                     [](const ModifiedCell& m) { return m.old_value.is_text() && m.new_value.is_number(); });
}

bool only_fills_missing(const ChangeSet& changes) {
  if (changes.modified_cells.empty()) return false;
  return std::all_of(changes.modified_cells.begin(), changes.modified_cells.end(),
                     [](const ModifiedCell& m) { return m.old_value.is_missing() && !m.new_value.is_missing(); });
}

enum class FillStrategy { mode, mean, median, forward, backward, interpolate, none };

FillStrategy fill_strategy(std::string_view code) {
  const std::string c = lower(code);
  if (c.find(".mode(") != std::string::npos || c.find("most_frequent") != std::string::npos) {
    return FillStrategy::mode;
  }
  if (c.find(".median(") != std::string::npos || c.find("'median'") != std::string::npos ||
      c.find("\"median\"") != std::string::npos) {
    return FillStrategy::median;
  }
  if (c.find(".mean(") != std::string::npos || c.find("'mean'") != std::string::npos ||
      c.find("\"mean\"") != std::string::npos) {
    return FillStrategy::mean;
  }
  if (c.find("ffill") != std::string::npos || c.find("'pad'") != std::string::npos) return FillStrategy::forward;
  if (c.find("bfill") != std::string::npos) return FillStrategy::backward;
  if (c.find("interpolate(") != std::string::npos) return FillStrategy::interpolate;
  if (c.find("imputer") != std::string::npos) return FillStrategy::mode;
  return FillStrategy::none;
}

// Fill values per column, in first-seen order.
std::vector<std::pair<std::string, std::vector<CellValue>>> fills_by_column(const ChangeSet& changes) {
  std::vector<std::pair<std::string, std::vector<CellValue>>> out;
  for (const auto& m : changes.modified_cells) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == m.column; });
    if (it == out.end()) {
      out.push_back({m.column, {}});
      it = out.end() - 1;
    }
    if (std::find(it->second.begin(), it->second.end(), m.new_value) == it->second.end()) {
      it->second.push_back(m.new_value);
    }
  }
  return out;
}

bool column_has_value(const TabularFrame& frame, const std::string& column, const CellValue& v) {
  const auto idx = frame.column_index(column);
  if (!idx) return false;
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    if (frame.at(r, *idx) == v) return true;
  }
  return false;
}

OperationKind classify_fill(std::string_view code, const std::vector<Statement>& stmts,
                            const ChangeSet& changes, const TabularFrame* prev) {
  if (fill_strategy(code) != FillStrategy::none) return OperationKind::missing_value_imputation;
  for (const auto& [column, values] : fills_by_column(changes)) {
    if (values.size() != 1 || !values.front().is_text()) continue;
    const CellValue& label = values.front();
    if (prev) {
      if (!column_has_value(*prev, column, label)) return OperationKind::replace_missing_with_label;
    } else {
      for (const auto& st : stmts) {
        if (contains(st.strings, label.as_text())) return OperationKind::replace_missing_with_label;
      }
    }
  }
  return OperationKind::missing_value_imputation;
}

// ---- model metadata helpers ----

std::string metric_from_comments(const std::vector<std::string>& comments, const Vocabulary& vocab) {
  std::string best;
  for (const auto& line : comments) {
    const std::string l = lower(line);
    for (auto kind : {VocabKind::metric, VocabKind::keras_metric}) {
      for (const auto* e : vocab.entries(kind)) {
        const std::string d = lower(e->display);
        const auto pos = l.find(d);
        if (pos == std::string::npos) continue;
        const bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(l[pos - 1]));
        const std::size_t after = pos + d.size();
        const bool right_ok = after == l.size() || !std::isalnum(static_cast<unsigned char>(l[after]));
        if (left_ok && right_ok && e->display.size() > best.size()) best = e->display;
      }
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(OperationKind kind) {
  switch (kind) {
    case OperationKind::dataset_loading: return "dataset_loading";
    case OperationKind::missing_value_imputation: return "missing_value_imputation";
    case OperationKind::replace_missing_with_label: return "replace_missing_with_label";
    case OperationKind::outlier_removal: return "outlier_removal";
    case OperationKind::one_hot_encoding: return "one_hot_encoding";
    case OperationKind::categorical_to_numeric: return "categorical_to_numeric";
    case OperationKind::feature_filtering: return "feature_filtering";
    case OperationKind::dataset_splitting: return "dataset_splitting";
    case OperationKind::model_training: return "model_training";
    case OperationKind::other: return "other";
  }
  return "other";
}

OperationKind parse_operation_kind(std::string_view name) {
  for (auto k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  throw ParseError("unknown operation kind '" + std::string(name) + "'");
}

std::string_view to_string(Backend backend) {
  return backend == Backend::llm ? "llm" : "deterministic";
}

std::string format_column_list(const std::vector<std::string>& names) {
  std::string out = "[";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ", ";
    out += llm::Json(names[i]).dump();
  }
  return out + "]";
}

OperationKind classify_operation(std::string_view code, const ChangeSet& changes,
                                 const TabularFrame* prev, const Vocabulary& vocab) {
  if (trim(code).empty()) return OperationKind::other;
  const auto stmts = pycode::parse_statements(code);
  const bool splits = has_call(stmts, vocab, VocabKind::splitter);
  const bool loads = has_call(stmts, vocab, VocabKind::loader);
  const bool encodes = has_call(stmts, vocab, VocabKind::encoder);
  const bool trains = has_call(stmts, vocab, VocabKind::estimator);

  if (changes.full_replacement) {
    if (splits) return OperationKind::dataset_splitting;
    if (loads) return OperationKind::dataset_loading;
    return OperationKind::other;
  }
  if (changes.empty()) return trains ? OperationKind::model_training : OperationKind::other;

  const bool rows_removed = !changes.removed_rows.empty();
  const bool rows_added = !changes.added_rows.empty();
  const bool cols_removed = !changes.removed_columns.empty();
  const bool cols_added = !changes.added_columns.empty();
  const bool modified = !changes.modified_cells.empty();

  if (splits && !cols_added && !modified) return OperationKind::dataset_splitting;
  if (cols_added && (encodes || added_by_prefix(changes))) return OperationKind::one_hot_encoding;
  if (rows_removed && !rows_added && !cols_added && !cols_removed && !modified) {
    return OperationKind::outlier_removal;
  }
  if (cols_removed && !cols_added && !rows_added && !rows_removed && !modified) {
    return OperationKind::feature_filtering;
  }
  if (modified && !cols_added && !cols_removed && !rows_added && !rows_removed) {
    if (retyped_to_numeric(changes)) return OperationKind::categorical_to_numeric;
    if (only_fills_missing(changes)) return classify_fill(code, stmts, changes, prev);
  }
  if (trains) return OperationKind::model_training;
  return OperationKind::other;
}

std::string scrub_summary(std::string text) {
  static constexpr std::string_view needle = "dataframe";
  std::string l = lower(text);
  for (std::size_t pos = l.find(needle); pos != std::string::npos; pos = l.find(needle, pos)) {
    text.replace(pos, needle.size(), "dataset");
    l.replace(pos, needle.size(), "dataset");
    pos += 7;
  }
  return text;
}

std::string deterministic_summary(std::string_view code, std::string_view variable,
                                  const ChangeSet& changes, OperationKind kind,
                                  const TabularFrame* prev, const TabularFrame& next,
                                  const Vocabulary& vocab) {
  const auto stmts = pycode::parse_statements(code);
  const std::string var(variable);
  const std::string shape = count_of(next.num_rows(), "row", "rows") + " and " +
                            count_of(next.num_columns(), "column", "columns");
  std::string text;

  switch (kind) {
    case OperationKind::dataset_loading: {
      const Call* loader = first_call(stmts, vocab, VocabKind::loader);
      std::string source = "a data source";
      if (loader) {
        const auto pos = loader->positional();
        if (!pos.empty() && !pos.front()->strings.empty()) {
          source = quote(pos.front()->strings.front());
        } else {
          source = "the " + vocab.lookup(VocabKind::loader, loader->method)->display;
        }
      }
      text = "Reads " + source + " into " + var + ", which now holds " + shape + ".";
      break;
    }
    case OperationKind::missing_value_imputation: {
      const auto fills = fills_by_column(changes);
      std::vector<std::string> cols;
      for (const auto& f : fills) cols.push_back(f.first);
      const bool single = cols.size() == 1;
      std::string how;
      switch (fill_strategy(code)) {
        case FillStrategy::mode:
          how = single ? "that column's mode, its most frequent value"
                       : "the mode of each column, its most frequent value";
          break;
        case FillStrategy::mean: how = single ? "the column average" : "each column's average"; break;
        case FillStrategy::median: how = single ? "the column median" : "each column's median"; break;
        case FillStrategy::forward: how = "the value from the row above"; break;
        case FillStrategy::backward: how = "the value from the row below"; break;
        case FillStrategy::interpolate: how = "values interpolated from neighbouring rows"; break;
        case FillStrategy::none:
          how = single && fills.front().second.size() == 1
                    ? "the existing value " + quote(fills.front().second.front().to_string())
                    : "values already present in the data";
      }
      text = "Fills " + count_of(changes.modified_cells.size(), "missing entry", "missing entries") +
             " of " + columns_phrase(cols) + " with " + how + ".";
      break;
    }
    case OperationKind::replace_missing_with_label: {
      const auto fills = fills_by_column(changes);
      std::vector<std::string> cols, labels;
      for (const auto& f : fills) {
        cols.push_back(f.first);
        for (const auto& v : f.second) push_unique(labels, quote(v.to_string()));
      }
      text = "Marks " + count_of(changes.modified_cells.size(), "missing entry", "missing entries") +
             " of " + columns_phrase(cols) + " with the new " +
             (labels.size() == 1 ? "label " : "labels ") + join_list(labels) + ".";
      break;
    }
    case OperationKind::outlier_removal: {
      const auto& rows = changes.removed_rows;
      text = "Drops " + count_of(rows.size(), "row", "rows") + " from " + var;
      if (rows.size() <= 6) {
        std::vector<std::string> ids;
        for (RowId id : rows) ids.push_back(std::to_string(id));
        text += std::string(rows.size() == 1 ? " (row id " : " (row ids ") + join_list(ids) + ")";
      }
      text += "; " + count_of(next.num_rows(), "row remains", "rows remain") + ".";
      break;
    }
    case OperationKind::one_hot_encoding: {
      const auto rels = deterministic_relationships(
          code, prev ? prev->column_names() : std::vector<std::string>{},
          changes.added_column_names(), &changes, vocab);
      std::vector<std::string> sources;
      for (const auto& r : rels) {
        for (const auto& s : r.sources) push_unique(sources, s);
      }
      std::vector<std::string> parts;
      for (const auto& s : sources) {
        std::vector<std::string> derived;
        for (const auto& r : rels) {
          if (contains(r.sources, s)) derived.push_back(r.derived);
        }
        std::string part = "expands " + quote(s) + " into " + count_of(derived.size(), "indicator column", "indicator columns") +
                           " (" + join_list(quoted(derived)) + "), one 0/1 flag per category";
        if (contains(changes.removed_column_names(), s)) part += ", and drops " + quote(s) + " itself";
        parts.push_back(part);
      }
      if (parts.empty()) {
        text = "Adds indicator " + columns_phrase(changes.added_column_names()) + " to " + var + ".";
      } else {
        text = capitalize(join_list(parts)) + ".";
      }
      break;
    }
    case OperationKind::categorical_to_numeric: {
      std::vector<std::string> cols;
      std::vector<std::pair<std::string, std::string>> pairs;
      for (const auto& m : changes.modified_cells) {
        push_unique(cols, m.column);
        std::pair<std::string, std::string> p{m.old_value.to_string(), m.new_value.to_string()};
        if (std::find(pairs.begin(), pairs.end(), p) == pairs.end()) pairs.push_back(p);
      }
      for (const auto& r : changes.retyped_columns) push_unique(cols, r.name);
      text = "Recodes " + columns_phrase(cols) + " as numbers";
      if (cols.size() == 1 && !pairs.empty() && pairs.size() <= 6) {
        std::vector<std::string> maps;
        for (const auto& [from, to] : pairs) maps.push_back(quote(from) + " becomes " + to);
        text += ": " + join_list(maps);
      } else {
        text += " across " + count_of(changes.modified_cells.size(), "cell", "cells");
      }
      text += ".";
      break;
    }
    case OperationKind::feature_filtering:
      text = "Drops " + columns_phrase(changes.removed_column_names()) + " from " + var + "; " +
             count_of(next.num_columns(), "column remains", "columns remain") + ".";
      break;
    case OperationKind::dataset_splitting: {
      const Call* splitter = first_call(stmts, vocab, VocabKind::splitter);
      text = "Creates " + var + " as one part of a " +
             (splitter ? vocab.lookup(VocabKind::splitter, splitter->method)->display
                       : std::string("data split")) +
             "; it holds " + shape + ".";
      break;
    }
    case OperationKind::model_training: {
      const auto meta = deterministic_model_metadata(code, nullptr, vocab);
      text = meta ? "Trains a " + meta->model_name + " model" : std::string("Trains a model");
      if (meta && !meta->train_variables.empty()) text += " on " + join_list(meta->train_variables);
      text += "; the values in " + var + " stay the same.";
      break;
    }
    case OperationKind::other: {
      if (changes.empty()) {
        text = "No changes to the data.";
        break;
      }
      if (changes.full_replacement) {
        text = "Assigns " + var + " a new table with " + shape + ".";
        break;
      }
      std::vector<std::string> parts;
      if (!changes.modified_cells.empty()) {
        std::vector<std::string> cols;
        for (const auto& m : changes.modified_cells) push_unique(cols, m.column);
        parts.push_back("changes " + count_of(changes.modified_cells.size(), "value", "values") +
                        " in " + columns_phrase(cols));
      }
      if (!changes.added_columns.empty()) parts.push_back("adds " + columns_phrase(changes.added_column_names()));
      if (!changes.removed_columns.empty()) {
        parts.push_back("removes " + columns_phrase(changes.removed_column_names()));
      }
      if (!changes.added_rows.empty()) parts.push_back("adds " + count_of(changes.added_rows.size(), "row", "rows"));
      if (!changes.removed_rows.empty()) {
        parts.push_back("removes " + count_of(changes.removed_rows.size(), "row", "rows"));
      }
      if (parts.empty()) parts.push_back("reorders the rows or columns");
      text = "Updates " + var + ": " + join_list(parts) + ".";
      break;
    }
  }
  return scrub_summary(text);
}

bool summary_is_grounded(std::string_view summary, std::string_view code, const ChangeSet& changes,
                         const TabularFrame* prev, const TabularFrame& next) {
  std::set<std::string> known;
  for (const auto& c : next.columns()) known.insert(c.name);
  if (prev) {
    for (const auto& c : prev->columns()) known.insert(c.name);
  }
  for (const auto& m : changes.modified_cells) {
    known.insert(m.old_value.to_string());
    known.insert(m.new_value.to_string());
  }

  // Typographic quotes count as ASCII ones.
  std::string s(summary);
  for (auto [from, to] : {std::pair<std::string_view, char>{"\xE2\x80\x9C", '"'},
                          {"\xE2\x80\x9D", '"'}, {"\xE2\x80\x98", '\''}, {"\xE2\x80\x99", '\''}}) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos)) {
      s.replace(pos, from.size(), 1, to);
    }
  }
  auto word_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char q = s[i];
    if ((q != '\'' && q != '"') || (i > 0 && word_char(s[i - 1]))) continue;
    std::size_t j = i + 1;
    while (j < s.size() && s[j] != q && s[j] != '\n') ++j;
    if (j >= s.size() || s[j] != q || (j + 1 < s.size() && word_char(s[j + 1]))) continue;
    const std::string token = s.substr(i + 1, j - i - 1);
    if (!token.empty() && token.size() <= 80 && code.find(token) == std::string_view::npos &&
        !known.count(token)) {
      return false;
    }
    i = j;
  }
  return true;
}

ColumnRelationships deterministic_relationships(std::string_view code,
                                                const std::vector<std::string>& existing,
                                                const std::vector<std::string>& added,
                                                const ChangeSet* changes, const Vocabulary& vocab) {
  ColumnRelationships out;
  if (added.empty()) return out;
  const auto stmts = pycode::parse_statements(code);
  const bool encodes = has_call(stmts, vocab, VocabKind::encoder);
  std::vector<std::string> removed;
  if (changes) removed = changes->removed_column_names();

  for (const auto& derived : added) {
    std::vector<std::string> sources;
    for (const auto& st : stmts) {
      if (!contains(st.subscript_targets, derived)) continue;
      for (const auto& key : st.subscript_keys) {
        if (key != derived && contains(existing, key)) push_unique(sources, key);
      }
    }
    if (sources.empty()) {
      std::string best;
      for (const auto& x : existing) {
        if (x != derived && derived.rfind(x + "_", 0) == 0 && x.size() > best.size()) best = x;
      }
      if (!best.empty()) {
        bool binary = false;
        if (changes) {
          for (const auto& col : changes->added_columns) {
            if (col.name == derived) binary = is_binary_column(col);
          }
        }
        if (contains(removed, best) || binary || encodes) sources.push_back(best);
      }
    }
    if (!sources.empty()) out.push_back({derived, sources});
  }
  return out;
}

ColumnRelationships relationships_from_json(const llm::Json& reply,
                                            const std::vector<std::string>& existing,
                                            const std::vector<std::string>& added) {
  ColumnRelationships out;
  auto take = [&](const llm::Json& obj) {
    for (const auto& [derived, sources] : obj.items()) {
      if (!contains(added, derived)) continue;
      auto it = std::find_if(out.begin(), out.end(),
                             [&](const ColumnRelationship& r) { return r.derived == derived; });
      if (it == out.end()) {
        out.push_back({derived, {}});
        it = out.end() - 1;
      }
      for (const auto& s : sources) {
        const auto name = s.get<std::string>();
        if (contains(existing, name) && name != derived) push_unique(it->sources, name);
      }
      if (it->sources.empty()) out.erase(it);
    }
  };
  if (reply.is_object()) {
    take(reply);
  } else if (reply.is_array()) {
    for (const auto& e : reply) take(e);
  }
  // Keep the order in which the columns were added.
  std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    return std::find(added.begin(), added.end(), a.derived) < std::find(added.begin(), added.end(), b.derived);
  });
  return out;
}

std::optional<ModelMetadata> deterministic_model_metadata(std::string_view code,
                                                          const MetricValues* values,
                                                          const Vocabulary& vocab) {
  const auto stmts = pycode::parse_statements(code);
  ModelMetadata meta;
  std::set<std::string> model_vars;

  for (const auto& st : stmts) {
    for (const auto& c : st.calls) {
      if (const auto* e = vocab.lookup(VocabKind::estimator, c.method)) {
        if (meta.model_name.empty()) meta.model_name = e->display;
        model_vars.insert(st.targets.begin(), st.targets.end());
      }
    }
  }
  if (meta.model_name.empty()) return std::nullopt;

  std::vector<std::string> candidates, predictions, keras_metrics;
  std::vector<std::string> keras_outputs;
  for (const auto& st : stmts) {
    auto on_model = [&](const Call& c) {
      if (model_vars.count(c.receiver)) return true;
      for (int i = c.receiver_call; i >= 0; i = st.calls[static_cast<std::size_t>(i)].receiver_call) {
        if (vocab.contains(VocabKind::estimator, st.calls[static_cast<std::size_t>(i)].method)) return true;
      }
      return false;
    };
    for (const auto& c : st.calls) {
      if (c.method == "fit" && on_model(c)) {
        for (const auto* a : c.positional()) {
          if (a->name) push_unique(meta.train_variables, *a->name);
        }
      } else if ((c.method == "predict" || c.method == "predict_proba" || c.method == "evaluate" ||
                  c.method == "score") &&
                 on_model(c)) {
        for (const auto* a : c.positional()) {
          if (a->name) push_unique(candidates, *a->name);
        }
        if (c.method != "evaluate" && c.method != "score") {
          for (const auto& t : st.targets) push_unique(predictions, t);
        }
        if (c.method == "evaluate" && st.targets.size() > 1) {
          keras_outputs.assign(st.targets.begin() + 1, st.targets.end());
        }
      } else if (c.method == "compile" && on_model(c)) {
        if (const auto* m = c.keyword("metrics")) {
          for (const auto& s : m->strings) {
            const auto* e = vocab.lookup(VocabKind::keras_metric, s);
            keras_metrics.push_back(e ? e->display : s);
          }
        }
      } else if (const auto* e = vocab.lookup(VocabKind::metric, c.method)) {
        for (const auto* a : c.positional()) {
          if (a->name) push_unique(candidates, *a->name);
        }
        if (!st.targets.empty()) {
          std::string name = metric_from_comments(st.comments, vocab);
          if (name.empty()) name = e->display;
          meta.metrics.push_back({name, st.targets.front(), std::nullopt});
        }
      }
    }
  }
  for (std::size_t i = 0; i < keras_outputs.size() && i < keras_metrics.size(); ++i) {
    meta.metrics.push_back({keras_metrics[i], keras_outputs[i], std::nullopt});
  }
  for (const auto& c : candidates) {
    if (!contains(meta.train_variables, c) && !contains(predictions, c)) {
      push_unique(meta.test_variables, c);
    }
  }
  if (values) {
    for (auto& m : meta.metrics) {
      auto it = values->find(m.variable);
      if (it != values->end()) m.value = it->second;
    }
  }
  return meta;
}

std::optional<ModelMetadata> model_metadata_from_json(const llm::Json& reply,
                                                      const MetricValues* values) {
  if (!reply.is_object() || reply.empty()) return std::nullopt;
  auto find = [](const llm::Json& obj, std::string_view key) -> const llm::Json* {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (lower(it.key()) == key) return &it.value();
    }
    return nullptr;
  };
  ModelMetadata meta;
  const auto* name = find(reply, "model name");
  if (!name || !name->is_string() || name->get<std::string>().empty()) return std::nullopt;
  meta.model_name = name->get<std::string>();
  if (const auto* v = find(reply, "train variables"); v && v->is_array()) {
    for (const auto& s : *v) meta.train_variables.push_back(s.get<std::string>());
  }
  if (const auto* v = find(reply, "test variables"); v && v->is_array()) {
    for (const auto& s : *v) meta.test_variables.push_back(s.get<std::string>());
  }
  if (const auto* v = find(reply, "metrics"); v && v->is_array()) {
    for (const auto& m : *v) {
      const auto* metric = find(m, "metric");
      const auto* var = find(m, "metric variable");
      if (!metric || !metric->is_string()) continue;
      ModelMetric entry{metric->get<std::string>(), var && var->is_string() ? var->get<std::string>() : "",
                        std::nullopt};
      if (entry.name.empty()) continue;
      if (values) {
        auto it = values->find(entry.variable);
        if (it != values->end()) entry.value = it->second;
      }
      meta.metrics.push_back(std::move(entry));
    }
  }
  return meta;
}

CodeInsight::CodeInsight(Backend backend, std::shared_ptr<llm::Gateway> gateway,
                         const Vocabulary* vocab)
    : backend_(backend), gateway_(std::move(gateway)), vocab_(vocab ? vocab : &Vocabulary::builtin()) {}

SummaryResult CodeInsight::summarize(std::string_view code, std::string_view variable,
                                     const ChangeSet& changes, OperationKind kind,
                                     const TabularFrame* prev, const TabularFrame& next) const {
  SummaryResult result{deterministic_summary(code, variable, changes, kind, prev, next, *vocab_),
                       Backend::deterministic, std::nullopt};
  if (backend_ != Backend::llm) return result;
  if (!use_llm()) {
    result.fallback_reason = "language model gateway is disabled";
    return result;
  }
  try {
    const std::string reply = gateway_->complete(
        llm::TemplateId::code_summary,
        {{"dataframe_var", std::string(variable)}, {"code", std::string(code)}});
    const std::string text = scrub_summary(std::string(trim(reply)));
    if (text.empty()) {
      result.fallback_reason = "empty summary reply";
    } else if (!summary_is_grounded(text, code, changes, prev, next)) {
      result.fallback_reason = "summary quoted names that are not in the code or the data";
    } else {
      return {text, Backend::llm, std::nullopt};
    }
  } catch (const llm::GatewayError& e) {
    result.fallback_reason = e.what();
  }
  return result;
}

ColumnRelationships CodeInsight::infer_column_relationships(
    std::string_view code, const std::vector<std::string>& existing,
    const std::vector<std::string>& added, const ChangeSet* changes,
    std::vector<std::string>* warnings) const {
  if (added.empty()) return {};
  if (use_llm()) {
    try {
      const auto reply = gateway_->complete_structured(
          llm::TemplateId::column_relationships,
          {{"code", std::string(code)},
           {"existing_columns", format_column_list(existing)},
           {"added_columns", format_column_list(added)}},
          llm::SchemaId::column_relationships);
      return relationships_from_json(reply, existing, added);
    } catch (const llm::GatewayError& e) {
      if (warnings) warnings->push_back(std::string("column relationships: ") + e.what());
      if (e.kind() == llm::GatewayError::Kind::malformed_reply) return {};
    }
  }
  return deterministic_relationships(code, existing, added, changes, *vocab_);
}

std::optional<ModelMetadata> CodeInsight::extract_model_metadata(
    std::string_view code, const MetricValues* values, std::vector<std::string>* warnings) const {
  if (use_llm()) {
    try {
      const auto reply = gateway_->complete_structured(
          llm::TemplateId::model_metrics, {{"input_code", std::string(code)}},
          llm::SchemaId::model_metrics);
      return model_metadata_from_json(reply, values);
    } catch (const llm::GatewayError& e) {
      if (warnings) warnings->push_back(std::string("model metadata: ") + e.what());
      if (e.kind() == llm::GatewayError::Kind::malformed_reply) return std::nullopt;
    }
  }
  return deterministic_model_metadata(code, values, *vocab_);
}

}  // namespace provcard
