#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "provcard/diff.hpp"
#include "provcard/frame.hpp"
#include "provcard/llm.hpp"
#include "provcard/relationships.hpp"
#include "provcard/vocabulary.hpp"

namespace provcard {

enum class OperationKind {
  dataset_loading,
  missing_value_imputation,
  replace_missing_with_label,
  outlier_removal,
  one_hot_encoding,
  categorical_to_numeric,
  feature_filtering,
  dataset_splitting,
  model_training,
  other,
};

std::string_view to_string(OperationKind kind);
OperationKind parse_operation_kind(std::string_view name);

enum class Backend { deterministic, llm };
std::string_view to_string(Backend backend);

struct ModelMetric {
  std::string name;
  std::string variable;
  std::optional<double> value;  // from captured runtime values, when supplied
  friend bool operator==(const ModelMetric&, const ModelMetric&) = default;
};

/// Present only when the code builds a predictive model; never a record with
/// blank fields.
struct ModelMetadata {
  std::string model_name;
  std::vector<std::string> train_variables;
  std::vector<std::string> test_variables;
  std::vector<ModelMetric> metrics;
  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

/// Captured values of scalar variables, keyed by variable name.
using MetricValues = std::map<std::string, double>;

/// Classifies from the ChangeSet first and uses the code only to separate
/// cases the diff cannot tell apart (loading vs splitting, training vs no-op).
/// `prev` lets imputation be told apart from a new fill label.
OperationKind classify_operation(std::string_view code, const ChangeSet& changes,
                                 const TabularFrame* prev = nullptr,
                                 const Vocabulary& vocab = Vocabulary::builtin());

/// Template summary built from ChangeSet facts. Mentions only columns that the
/// ChangeSet or the frames carry.
std::string deterministic_summary(std::string_view code, std::string_view variable,
                                  const ChangeSet& changes, OperationKind kind,
                                  const TabularFrame* prev, const TabularFrame& next,
                                  const Vocabulary& vocab = Vocabulary::builtin());

/// Replaces every case-insensitive occurrence of "dataframe" with "dataset".
std::string scrub_summary(std::string text);

/// True when every quoted token in `summary` occurs in the code, in a column
/// name of either frame, or in a value the ChangeSet touches.
bool summary_is_grounded(std::string_view summary, std::string_view code,
                         const ChangeSet& changes, const TabularFrame* prev,
                         const TabularFrame& next);

ColumnRelationships deterministic_relationships(std::string_view code,
                                                const std::vector<std::string>& existing,
                                                const std::vector<std::string>& added,
                                                const ChangeSet* changes = nullptr,
                                                const Vocabulary& vocab = Vocabulary::builtin());

/// Drops entries whose derived column is not in `added` or whose sources are
/// not in `existing`; merges repeated derived columns.
ColumnRelationships relationships_from_json(const llm::Json& reply,
                                            const std::vector<std::string>& existing,
                                            const std::vector<std::string>& added);

std::optional<ModelMetadata> deterministic_model_metadata(
    std::string_view code, const MetricValues* values = nullptr,
    const Vocabulary& vocab = Vocabulary::builtin());

/// Reads a model-metrics reply (keys matched case-insensitively); `{}` is absent.
std::optional<ModelMetadata> model_metadata_from_json(const llm::Json& reply,
                                                      const MetricValues* values = nullptr);

struct SummaryResult {
  std::string text;
  Backend backend = Backend::deterministic;    // backend that produced `text`
  std::optional<std::string> fallback_reason;  // set when the LLM result was discarded
};

/// Front end that runs either backend and falls back to the deterministic one
/// whenever the gateway fails or the reply cannot be trusted.
class CodeInsight {
 public:
  explicit CodeInsight(Backend backend = Backend::deterministic,
                       std::shared_ptr<llm::Gateway> gateway = nullptr,
                       const Vocabulary* vocab = nullptr);

  Backend backend() const { return backend_; }
  const Vocabulary& vocabulary() const { return *vocab_; }

  OperationKind classify(std::string_view code, const ChangeSet& changes,
                         const TabularFrame* prev) const {
    return classify_operation(code, changes, prev, *vocab_);
  }

  SummaryResult summarize(std::string_view code, std::string_view variable,
                          const ChangeSet& changes, OperationKind kind, const TabularFrame* prev,
                          const TabularFrame& next) const;

  ColumnRelationships infer_column_relationships(std::string_view code,
                                                 const std::vector<std::string>& existing,
                                                 const std::vector<std::string>& added,
                                                 const ChangeSet* changes,
                                                 std::vector<std::string>* warnings = nullptr) const;

  std::optional<ModelMetadata> extract_model_metadata(std::string_view code,
                                                      const MetricValues* values = nullptr,
                                                      std::vector<std::string>* warnings = nullptr) const;

 private:
  bool use_llm() const { return backend_ == Backend::llm && gateway_ && gateway_->enabled(); }

  Backend backend_;
  std::shared_ptr<llm::Gateway> gateway_;
  const Vocabulary* vocab_;
};

/// `["a", "b"]`, the list form used in prompt bindings.
std::string format_column_list(const std::vector<std::string>& names);

}  // namespace provcard
