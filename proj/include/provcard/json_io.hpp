#pragma once

#include "json.hpp"
#include "provcard/card.hpp"
#include "provcard/diff.hpp"
#include "provcard/frame.hpp"
#include "provcard/insight.hpp"
#include "provcard/query.hpp"
#include "provcard/snapgrid.hpp"
#include "provcard/stats.hpp"

// Interchange form of the public types. Field names here are the wire schema
// documented in docs/wire-format.md; readers reject missing required fields
// with ParseError.
namespace provcard::json {

using Json = nlohmann::ordered_json;

Json to_json(const CellValue& v);  // null | number | string | bool
CellValue cell_value_from_json(const Json& j);

Json to_json(const ChangeSet& c);
ChangeSet changeset_from_json(const Json& j);

Json to_json(const ChangeSummary& c);
ChangeSummary change_summary_from_json(const Json& j);

Json to_json(const ColumnRelationships& r);
ColumnRelationships relationships_from_json(const Json& j);

Json to_json(const SnapGrid& g);
SnapGrid snapgrid_from_json(const Json& j);

Json to_json(const ModelMetadata& m);
ModelMetadata model_metadata_from_json(const Json& j);

Json to_json(const CellExecution& e);
CellExecution cell_execution_from_json(const Json& j);

Json to_json(const DataVersionCard& c);
DataVersionCard card_from_json(const Json& j);

Json to_json(const Comment& c);
Comment comment_from_json(const Json& j);

Json to_json(const ColumnStats& s);

Json to_json(const FilterCondition& f);
Json to_json(const std::vector<FilterCondition>& fs);

Json to_json(const QueryResult& r);

}  // namespace provcard::json
