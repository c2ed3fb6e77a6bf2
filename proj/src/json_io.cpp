#include "provcard/json_io.hpp"

#include "provcard/errors.hpp"

namespace provcard {

ChangeSummary summarize_changes(const ChangeSet& changes) {
  ChangeSummary s;
  s.full_replacement = changes.full_replacement;
  s.modified_cells = changes.modified_cells.size();
  s.added_columns = changes.added_column_names();
  s.removed_columns = changes.removed_column_names();
  s.added_rows = changes.added_rows.size();
  s.removed_rows = changes.removed_rows;
  for (const auto& r : changes.retyped_columns) s.retyped_columns.push_back(r.name);
  return s;
}

std::string_view to_string(Role role) {
  return role == Role::domain_expert ? "domain_expert" : "data_scientist";
}

Role parse_role(std::string_view name) {
  if (name == "domain_expert") return Role::domain_expert;
  if (name == "data_scientist") return Role::data_scientist;
  throw ValidationError("unknown role '" + std::string(name) + "'; expected domain_expert or data_scientist");
}

}  // namespace provcard

namespace provcard::json {

namespace {

const Json& req(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return req(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

Json strings(const std::vector<std::string>& v) { return Json(v); }

std::vector<std::string> strings_from(const Json& j, const char* key) {
  return get<std::vector<std::string>>(j, key);
}

Json column_values(const ColumnValues& c) {
  Json values = Json::array();
  for (const auto& [id, v] : c.values) values.push_back(Json::array({id, to_json(v)}));
  return {{"name", c.name}, {"dtype", to_string(c.dtype)}, {"values", values}};
}

ColumnValues column_values_from(const Json& j) {
  ColumnValues c;
  c.name = get<std::string>(j, "name");
  c.dtype = parse_dtype(get<std::string>(j, "dtype"));
  for (const auto& pair : req(j, "values")) {
    c.values.emplace_back(pair.at(0).get<RowId>(), cell_value_from_json(pair.at(1)));
  }
  return c;
}

Json metric_json(const ModelMetric& m) {
  Json j = {{"Metric", m.name}, {"Metric Variable", m.variable}};
  j["Value"] = m.value ? Json(*m.value) : Json(nullptr);
  return j;
}

}  // namespace

Json to_json(const CellValue& v) {
  switch (v.kind()) {
    case CellValue::Kind::missing: return nullptr;
    case CellValue::Kind::number: return v.as_number();
    case CellValue::Kind::text: return v.as_text();
    case CellValue::Kind::boolean: return v.as_bool();
  }
  return nullptr;
}

CellValue cell_value_from_json(const Json& j) {
  if (j.is_null()) return CellValue::missing();
  if (j.is_boolean()) return CellValue::boolean(j.get<bool>());
  if (j.is_number()) return CellValue::number(j.get<double>());
  if (j.is_string()) return CellValue::text(j.get<std::string>());
  throw ParseError("cell value must be null, a number, a string or a boolean");
}

Json to_json(const ChangeSet& c) {
  Json j;
  Json modified = Json::array();
  for (const auto& m : c.modified_cells) {
    modified.push_back({{"row_id", m.row_id}, {"column", m.column}, {"old", to_json(m.old_value)},
                        {"new", to_json(m.new_value)}});
  }
  j["modified_cells"] = modified;
  j["added_columns"] = Json::array();
  for (const auto& a : c.added_columns) j["added_columns"].push_back(column_values(a));
  j["removed_columns"] = Json::array();
  for (const auto& r : c.removed_columns) j["removed_columns"].push_back(column_values(r));
  j["added_rows"] = Json::array();
  for (const auto& row : c.added_rows) {
    Json values = Json::array();
    for (const auto& [col, v] : row.values) values.push_back(Json::array({col, to_json(v)}));
    j["added_rows"].push_back({{"row_id", row.row_id}, {"values", values}});
  }
  j["removed_rows"] = c.removed_rows;
  j["retyped_columns"] = Json::array();
  for (const auto& r : c.retyped_columns) {
    j["retyped_columns"].push_back(
        {{"name", r.name}, {"old_dtype", to_string(r.old_dtype)}, {"new_dtype", to_string(r.new_dtype)}});
  }
  j["column_order"] = c.column_order;
  j["row_order"] = c.row_order;
  j["full_replacement"] = c.full_replacement;
  return j;
}

ChangeSet changeset_from_json(const Json& j) {
  ChangeSet c;
  for (const auto& m : req(j, "modified_cells")) {
    c.modified_cells.push_back({get<RowId>(m, "row_id"), get<std::string>(m, "column"),
                                cell_value_from_json(req(m, "old")), cell_value_from_json(req(m, "new"))});
  }
  for (const auto& a : req(j, "added_columns")) c.added_columns.push_back(column_values_from(a));
  for (const auto& r : req(j, "removed_columns")) c.removed_columns.push_back(column_values_from(r));
  for (const auto& row : req(j, "added_rows")) {
    AddedRow added{get<RowId>(row, "row_id"), {}};
    for (const auto& pair : req(row, "values")) {
      added.values.emplace_back(pair.at(0).get<std::string>(), cell_value_from_json(pair.at(1)));
    }
    c.added_rows.push_back(std::move(added));
  }
  c.removed_rows = get<std::vector<RowId>>(j, "removed_rows");
  for (const auto& r : req(j, "retyped_columns")) {
    c.retyped_columns.push_back({get<std::string>(r, "name"), parse_dtype(get<std::string>(r, "old_dtype")),
                                 parse_dtype(get<std::string>(r, "new_dtype"))});
  }
  c.column_order = strings_from(j, "column_order");
  c.row_order = get<std::vector<RowId>>(j, "row_order");
  c.full_replacement = get<bool>(j, "full_replacement");
  return c;
}

Json to_json(const ChangeSummary& c) {
  return {{"full_replacement", c.full_replacement},
          {"modified_cells", c.modified_cells},
          {"added_columns", strings(c.added_columns)},
          {"removed_columns", strings(c.removed_columns)},
          {"added_rows", c.added_rows},
          {"removed_rows", c.removed_rows},
          {"retyped_columns", strings(c.retyped_columns)}};
}

ChangeSummary change_summary_from_json(const Json& j) {
  ChangeSummary c;
  c.full_replacement = get<bool>(j, "full_replacement");
  c.modified_cells = get<std::size_t>(j, "modified_cells");
  c.added_columns = strings_from(j, "added_columns");
  c.removed_columns = strings_from(j, "removed_columns");
  c.added_rows = get<std::size_t>(j, "added_rows");
  c.removed_rows = get<std::vector<RowId>>(j, "removed_rows");
  c.retyped_columns = strings_from(j, "retyped_columns");
  return c;
}

Json to_json(const ColumnRelationships& r) {
  Json j = Json::object();
  for (const auto& rel : r) j[rel.derived] = rel.sources;
  return j;
}

ColumnRelationships relationships_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("relationships must be an object of derived column -> sources");
  ColumnRelationships r;
  for (const auto& [derived, sources] : j.items()) {
    if (!sources.is_array()) throw ParseError("relationship sources for '" + derived + "' must be a list");
    ColumnRelationship rel{derived, {}};
    for (const auto& s : sources) {
      if (!s.is_string()) throw ParseError("relationship source names must be strings");
      rel.sources.push_back(s.get<std::string>());
    }
    r.push_back(std::move(rel));
  }
  return r;
}

Json to_json(const SnapGrid& g) {
  Json j;
  j["legend_version"] = g.legend_version;
  j["rows"] = g.rows;
  j["columns"] = Json::array();
  for (const auto& c : g.columns) {
    Json col = {{"name", c.name}, {"header_state", to_string(c.header_state)}, {"changed_count", c.changed_count}};
    col["overflow_count"] = c.overflow_count ? Json(*c.overflow_count) : Json(nullptr);
    j["columns"].push_back(col);
  }
  j["cells"] = Json::array();
  for (const auto& row : g.cells) {
    Json r = Json::array();
    for (const auto& cell : row) {
      Json c = {{"state", to_string(cell.state)}, {"display", cell.display}};
      c["old"] = cell.old_value ? to_json(*cell.old_value) : Json(nullptr);
      c["new"] = cell.new_value ? to_json(*cell.new_value) : Json(nullptr);
      c["has_old"] = cell.old_value.has_value();
      c["has_new"] = cell.new_value.has_value();
      c["in_relationship_box"] = cell.in_relationship_box;
      c["query_hit"] = cell.query_hit;
      r.push_back(c);
    }
    j["cells"].push_back(r);
  }
  j["boxes"] = Json::array();
  for (const auto& b : g.boxes) j["boxes"].push_back({{"source", b.source}, {"derived", b.derived}});
  j["warnings"] = g.warnings;
  return j;
}

SnapGrid snapgrid_from_json(const Json& j) {
  SnapGrid g;
  g.legend_version = get<std::string>(j, "legend_version");
  g.rows = get<std::vector<RowId>>(j, "rows");
  for (const auto& c : req(j, "columns")) {
    GridColumn col{get<std::string>(c, "name"), parse_cell_state(get<std::string>(c, "header_state")),
                   get<std::size_t>(c, "changed_count"), std::nullopt};
    if (!req(c, "overflow_count").is_null()) col.overflow_count = c["overflow_count"].get<std::size_t>();
    g.columns.push_back(col);
  }
  for (const auto& row : req(j, "cells")) {
    std::vector<GridCell> r;
    for (const auto& c : row) {
      GridCell cell;
      cell.state = parse_cell_state(get<std::string>(c, "state"));
      cell.display = get<std::string>(c, "display");
      if (get<bool>(c, "has_old")) cell.old_value = cell_value_from_json(req(c, "old"));
      if (get<bool>(c, "has_new")) cell.new_value = cell_value_from_json(req(c, "new"));
      cell.in_relationship_box = get<bool>(c, "in_relationship_box");
      cell.query_hit = get<bool>(c, "query_hit");
      r.push_back(std::move(cell));
    }
    g.cells.push_back(std::move(r));
  }
  for (const auto& b : req(j, "boxes")) g.boxes.push_back({get<std::string>(b, "source"), strings_from(b, "derived")});
  g.warnings = strings_from(j, "warnings");
  return g;
}

Json to_json(const ModelMetadata& m) {
  Json metrics = Json::array();
  for (const auto& metric : m.metrics) metrics.push_back(metric_json(metric));
  return {{"Model Name", m.model_name},
          {"Train Variables", m.train_variables},
          {"Test Variables", m.test_variables},
          {"Metrics", metrics}};
}

ModelMetadata model_metadata_from_json(const Json& j) {
  ModelMetadata m;
  m.model_name = get<std::string>(j, "Model Name");
  m.train_variables = strings_from(j, "Train Variables");
  m.test_variables = strings_from(j, "Test Variables");
  for (const auto& metric : req(j, "Metrics")) {
    ModelMetric entry{get<std::string>(metric, "Metric"), get<std::string>(metric, "Metric Variable"), std::nullopt};
    if (metric.contains("Value") && !metric["Value"].is_null()) entry.value = metric["Value"].get<double>();
    m.metrics.push_back(std::move(entry));
  }
  return m;
}

Json to_json(const CellExecution& e) {
  return {{"cell_id", e.cell_id}, {"execution_count", e.execution_count}, {"code", e.code}};
}

CellExecution cell_execution_from_json(const Json& j) {
  return {get<std::string>(j, "cell_id"), get<std::string>(j, "code"), get<std::int64_t>(j, "execution_count")};
}

Json to_json(const DataVersionCard& c) {
  Json j;
  j["variable"] = c.variable;
  j["index"] = c.index;
  j["seq"] = c.seq;
  j["created_at"] = c.created_at;
  j["provenance"] = to_json(c.provenance);
  j["operation_kind"] = to_string(c.operation_kind);
  j["summary"] = c.summary;
  j["summary_backend"] = to_string(c.summary_backend);
  j["summary_fallback"] = c.summary_fallback ? Json(*c.summary_fallback) : Json(nullptr);
  j["shape"] = {{"rows", c.rows}, {"columns", c.columns}};
  j["changes"] = to_json(c.changes);
  j["relationships"] = to_json(c.relationships);
  j["snapgrid"] = to_json(c.snapgrid);
  j["model_metadata"] = c.model_metadata ? to_json(*c.model_metadata) : Json(nullptr);
  j["warnings"] = c.warnings;
  return j;
}

DataVersionCard card_from_json(const Json& j) {
  DataVersionCard c;
  c.variable = get<std::string>(j, "variable");
  c.index = get<std::size_t>(j, "index");
  c.seq = get<std::uint64_t>(j, "seq");
  c.created_at = get<Timestamp>(j, "created_at");
  c.provenance = cell_execution_from_json(req(j, "provenance"));
  c.operation_kind = parse_operation_kind(get<std::string>(j, "operation_kind"));
  c.summary = get<std::string>(j, "summary");
  c.summary_backend = get<std::string>(j, "summary_backend") == "llm" ? Backend::llm : Backend::deterministic;
  if (!req(j, "summary_fallback").is_null()) c.summary_fallback = j["summary_fallback"].get<std::string>();
  c.rows = get<std::size_t>(req(j, "shape"), "rows");
  c.columns = get<std::size_t>(req(j, "shape"), "columns");
  c.changes = change_summary_from_json(req(j, "changes"));
  c.relationships = relationships_from_json(req(j, "relationships"));
  c.snapgrid = snapgrid_from_json(req(j, "snapgrid"));
  if (!req(j, "model_metadata").is_null()) c.model_metadata = model_metadata_from_json(j["model_metadata"]);
  c.warnings = strings_from(j, "warnings");
  return c;
}

Json to_json(const Comment& c) {
  Json read_by = Json::array();
  for (const auto& s : c.read_by) read_by.push_back(s);
  return {{"id", c.id},         {"seq", c.seq},   {"variable", c.variable},     {"version", c.version},
          {"author", to_string(c.author)}, {"text", c.text}, {"created_at", c.created_at}, {"read_by", read_by}};
}

Comment comment_from_json(const Json& j) {
  Comment c;
  c.id = get<std::uint64_t>(j, "id");
  c.seq = get<std::uint64_t>(j, "seq");
  c.variable = get<std::string>(j, "variable");
  c.version = get<std::size_t>(j, "version");
  c.author = parse_role(get<std::string>(j, "author"));
  c.text = get<std::string>(j, "text");
  c.created_at = get<Timestamp>(j, "created_at");
  for (const auto& s : strings_from(j, "read_by")) c.read_by.insert(s);
  return c;
}

Json to_json(const ColumnStats& s) {
  Json j;
  j["column"] = s.column;
  j["dtype"] = to_string(s.dtype);
  j["row_count"] = s.row_count;
  j["missing_count"] = s.missing_count;
  j["bins"] = Json::array();
  for (const auto& b : s.bins) j["bins"].push_back(Json::array({b.lower, b.upper, b.count}));
  j["mean"] = s.mean ? Json(*s.mean) : Json(nullptr);
  j["median"] = s.median ? Json(*s.median) : Json(nullptr);
  j["stddev"] = s.stddev ? Json(*s.stddev) : Json(nullptr);
  j["categories"] = Json::array();
  for (const auto& [value, count] : s.categories) j["categories"].push_back(Json::array({value, count}));
  return j;
}

Json to_json(const FilterCondition& f) {
  return {{"column", f.column}, {"operator", to_string(f.op)}, {"value", to_json(f.value)}};
}

Json to_json(const std::vector<FilterCondition>& fs) {
  Json j = Json::array();
  for (const auto& f : fs) j.push_back(to_json(f));
  return j;
}

Json to_json(const QueryResult& r) {
  Json cells = Json::array();
  for (const auto& c : r.cells) cells.push_back({{"row_id", c.row_id}, {"column", c.column}});
  return {{"rows", r.rows}, {"cells", cells}};
}

}  // namespace provcard::json
