#include "provcard/pipeline.hpp"

#include "provcard/csv.hpp"
#include "provcard/errors.hpp"
#include "provcard/snapgrid.hpp"

namespace provcard {

DataVersionCard assemble_card(const IngestEvent& event, const TabularFrame* prev,
                              const ChangeSet& changes, std::size_t index, const CodeInsight& insight) {
  DataVersionCard card;
  card.variable = event.variable;
  card.index = index;
  card.provenance = event.provenance;
  card.rows = event.frame.num_rows();
  card.columns = event.frame.num_columns();
  card.changes = summarize_changes(changes);

  const std::string& code = event.provenance.code;
  card.operation_kind = insight.classify(code, changes, prev);
  if (prev && !changes.added_columns.empty()) {
    card.relationships = insight.infer_column_relationships(code, prev->column_names(),
                                                            changes.added_column_names(), &changes,
                                                            &card.warnings);
  }
  const SnapGridSpec spec = select_subset(changes, prev, event.frame, card.relationships);
  card.snapgrid = render_snapgrid(spec, changes, prev, event.frame);

  // Model metadata only makes sense for cells that fit something.
  if (card.operation_kind == OperationKind::model_training || code.find("fit(") != std::string::npos) {
    card.model_metadata = insight.extract_model_metadata(code, &event.metric_values, &card.warnings);
    if (card.model_metadata && card.operation_kind == OperationKind::other && changes.empty()) {
      card.operation_kind = OperationKind::model_training;
    }
  }

  const SummaryResult summary =
      insight.summarize(code, event.variable, changes, card.operation_kind, prev, event.frame);
  card.summary = summary.text;
  card.summary_backend = summary.backend;
  card.summary_fallback = summary.fallback_reason;
  return card;
}

IngestEvent event_from_json(const nlohmann::ordered_json& body) {
  if (!body.is_object()) throw ParseError("event body must be a JSON object");
  auto field = [&](const char* key) -> const nlohmann::ordered_json& {
    if (!body.contains(key)) throw ParseError(std::string("event is missing '") + key + "'");
    return body.at(key);
  };
  IngestEvent event;
  try {
    event.variable = field("variable").get<std::string>();
    event.provenance.cell_id = field("cell_id").get<std::string>();
    event.provenance.execution_count = field("execution_count").get<std::int64_t>();
    event.provenance.code = body.value("code", std::string());
    const auto csv = field("snapshot_csv").get<std::string>();
    if (body.contains("dtypes")) {
      std::vector<DType> dtypes;
      for (const auto& d : body["dtypes"]) dtypes.push_back(parse_dtype(d.get<std::string>()));
      event.frame = parse_snapshot_csv(csv, &dtypes);
    } else {
      event.frame = parse_snapshot_csv(csv);
    }
    if (body.contains("metric_values")) {
      for (const auto& [k, v] : body["metric_values"].items()) {
        if (v.is_number()) event.metric_values[k] = v.get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed event: ") + e.what());
  }
  return event;
}

nlohmann::ordered_json event_to_json(const IngestEvent& event) {
  nlohmann::ordered_json j;
  j["variable"] = event.variable;
  j["cell_id"] = event.provenance.cell_id;
  j["execution_count"] = event.provenance.execution_count;
  j["code"] = event.provenance.code;
  j["snapshot_csv"] = write_snapshot_csv(event.frame);
  j["dtypes"] = nlohmann::ordered_json::array();
  for (const auto& c : event.frame.columns()) j["dtypes"].push_back(to_string(c.dtype));
  j["metric_values"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : event.metric_values) j["metric_values"][k] = v;
  return j;
}

}  // namespace provcard
