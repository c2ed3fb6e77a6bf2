#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "provcard/pipeline.hpp"

namespace provcard {

/// One scripted capture event before its snapshot is loaded.
struct SessionStep {
  std::size_t number = 0;  // 1-based position in the file
  std::size_t line = 0;    // line of the [step] header
  std::string variable;
  CellExecution provenance;
  std::filesystem::path snapshot;  // resolved against the session file
  MetricValues metric_values;
};

/// Session script format:
///
///   # comment
///   [step]
///   variable = df
///   cell_id = cell-2
///   execution_count = 2
///   snapshot = snapshots/step2_df.csv
///   metric mse = 237.79
///   code <<<
///   df = df.dropna()
///   >>>
///
/// Throws ParseError naming the line (and step) of the first problem.
std::vector<SessionStep> parse_session(std::string_view text, const std::filesystem::path& base_dir);
std::vector<SessionStep> read_session(const std::filesystem::path& path);

/// Loads the step's snapshot; a missing or malformed file is a ParseError
/// naming the step.
IngestEvent load_step(const SessionStep& step);

}  // namespace provcard
