#pragma once

#include <string>

#include "json.hpp"
#include "provcard/card.hpp"
#include "provcard/frame.hpp"
#include "provcard/insight.hpp"

namespace provcard {

/// One captured cell run for one tracked variable.
struct IngestEvent {
  std::string variable;
  TabularFrame frame;
  CellExecution provenance;
  MetricValues metric_values;
};

/// Runs diff -> relationships -> subset -> insight for one new version and
/// returns the card without its seq and timestamp.
DataVersionCard assemble_card(const IngestEvent& event, const TabularFrame* prev,
                              const ChangeSet& changes, std::size_t index, const CodeInsight& insight);

/// Reads a POST /events body:
///   {"variable", "cell_id", "execution_count", "code", "snapshot_csv",
///    "dtypes"?: [..], "metric_values"?: {name: number}}
/// Throws ParseError with the CSV diagnostics on a malformed snapshot.
IngestEvent event_from_json(const nlohmann::ordered_json& body);
nlohmann::ordered_json event_to_json(const IngestEvent& event);

}  // namespace provcard
