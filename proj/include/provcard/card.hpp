#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "provcard/diff.hpp"
#include "provcard/insight.hpp"
#include "provcard/relationships.hpp"
#include "provcard/snapgrid.hpp"

namespace provcard {

using Timestamp = std::int64_t;  // milliseconds since the Unix epoch

/// The notebook cell run that produced a version.
struct CellExecution {
  std::string cell_id;
  std::string code;
  std::int64_t execution_count = 0;
  friend bool operator==(const CellExecution&, const CellExecution&) = default;
};

/// Headline facts of a ChangeSet, small enough to ship with every card.
struct ChangeSummary {
  bool full_replacement = false;
  std::size_t modified_cells = 0;
  std::vector<std::string> added_columns;
  std::vector<std::string> removed_columns;
  std::size_t added_rows = 0;
  std::vector<RowId> removed_rows;
  std::vector<std::string> retyped_columns;
  friend bool operator==(const ChangeSummary&, const ChangeSummary&) = default;
};

ChangeSummary summarize_changes(const ChangeSet& changes);

struct DataVersionCard {
  std::string variable;
  std::size_t index = 0;
  std::uint64_t seq = 0;  // position in the sync log
  Timestamp created_at = 0;
  CellExecution provenance;
  OperationKind operation_kind = OperationKind::other;
  std::string summary;
  Backend summary_backend = Backend::deterministic;
  std::optional<std::string> summary_fallback;
  ChangeSummary changes;
  ColumnRelationships relationships;
  SnapGrid snapgrid;
  std::optional<ModelMetadata> model_metadata;
  std::vector<std::string> warnings;
  std::size_t rows = 0;
  std::size_t columns = 0;
};

enum class Role { domain_expert, data_scientist };
std::string_view to_string(Role role);
Role parse_role(std::string_view name);

struct Comment {
  std::uint64_t id = 0;
  std::uint64_t seq = 0;
  std::string variable;
  std::size_t version = 0;
  Role author = Role::domain_expert;
  std::string text;
  Timestamp created_at = 0;
  std::set<std::string> read_by;
};

}  // namespace provcard
