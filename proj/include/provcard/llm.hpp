#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "provcard/errors.hpp"

namespace provcard::llm {

using Json = nlohmann::ordered_json;
using Bindings = std::map<std::string, std::string>;

enum class TemplateId { code_summary, column_relationships, model_metrics, query_to_filters };
enum class SchemaId { column_relationships, model_metrics, query_filters };
enum class ReplyShape { free_text, structured };

std::string_view to_string(TemplateId id);
std::string_view to_string(SchemaId id);
std::optional<TemplateId> parse_template_id(std::string_view name);

struct PromptTemplate {
  TemplateId id;
  std::string_view text;
  std::vector<std::string_view> placeholders;  // names without angle brackets
  ReplyShape shape;
  std::optional<SchemaId> schema;
};

const PromptTemplate& prompt_template(TemplateId id);

/// Substitutes each declared `<name>` placeholder. Angle-bracket text that is
/// not a declared placeholder is left alone. Throws GatewayError(binding) if a
/// placeholder is unbound or a binding names no placeholder.
std::string render(const PromptTemplate& tmpl, const Bindings& bindings);

class GatewayError : public Error {
 public:
  enum class Kind { disabled, binding, timeout, transport, malformed_reply };
  GatewayError(Kind kind, const std::string& what, std::string raw_reply = {})
      : Error(what), kind_(kind), raw_reply_(std::move(raw_reply)) {}
  Kind kind() const { return kind_; }
  /// The unparseable reply, for malformed_reply errors.
  const std::string& raw_reply() const { return raw_reply_; }

 private:
  Kind kind_;
  std::string raw_reply_;
};

std::string_view to_string(GatewayError::Kind kind);

enum class GatewayMode { live, disabled };

struct GatewayConfig {
  std::string endpoint = "https://api.openai.com/v1/completions";
  std::string model = "gpt-3.5-turbo-instruct";
  std::string credential_env = "PROVCARD_LLM_API_KEY";  // env var holding the key
  std::chrono::seconds timeout{20};
  int max_retries = 1;
  GatewayMode mode = GatewayMode::disabled;
  std::optional<std::filesystem::path> log_path;

  /// JSON keys: endpoint, model, credential_env, timeout_seconds, max_retries,
  /// mode ("live" | "disabled"), log_path. Missing keys keep defaults.
  static GatewayConfig load(const std::filesystem::path& path);
  static GatewayConfig from_json(const Json& j);
  /// PROVCARD_LLM_ENDPOINT, PROVCARD_LLM_MODEL, PROVCARD_LLM_MODE and
  /// PROVCARD_LLM_TIMEOUT override the corresponding fields.
  void apply_env_overrides();
};

struct CompletionRequest {
  TemplateId template_id;
  Bindings bindings;
  std::string prompt;
  std::string model;
  std::chrono::seconds timeout{20};
};

/// Carries a rendered prompt to a completion service and returns the raw
/// text. Implementations throw GatewayError(timeout | transport).
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string send(const CompletionRequest& request) = 0;
};

/// Posts OpenAI-style completion requests over HTTP(S).
class HttpTransport : public Transport {
 public:
  HttpTransport(std::string endpoint, std::string api_key);
  std::string send(const CompletionRequest& request) override;

 private:
  std::string endpoint_;
  std::string api_key_;
};

/// Replays canned replies from a JSON fixture:
/// [{"template": "<id>", "match": {"<binding>": "<exact value>"}, "reply": "..."}]
/// or "replies": [...] to return successive replies on repeated calls.
/// An unmatched request is a transport error.
class RecordedTransport : public Transport {
 public:
  explicit RecordedTransport(Json entries);
  static std::shared_ptr<RecordedTransport> from_file(const std::filesystem::path& path);
  std::string send(const CompletionRequest& request) override;

 private:
  struct Entry {
    TemplateId template_id;
    Bindings match;
    std::vector<std::string> replies;
    std::size_t next = 0;
  };
  std::mutex mutex_;
  std::vector<Entry> entries_;
};

/// Counts calls and forwards them to an optional inner transport.
class CountingTransport : public Transport {
 public:
  explicit CountingTransport(std::shared_ptr<Transport> inner = nullptr) : inner_(std::move(inner)) {}
  std::string send(const CompletionRequest& request) override;
  std::size_t calls() const;

 private:
  std::shared_ptr<Transport> inner_;
  mutable std::mutex mutex_;
  std::size_t calls_ = 0;
};

/// Strips prose around the first structured body and normalizes quote
/// characters, then parses. Returns nullopt when nothing parses.
std::optional<Json> repair_structured(std::string_view raw);

/// True when `value` matches the schema's documented shape.
bool validate(SchemaId schema, const Json& value);

class Gateway {
 public:
  Gateway(GatewayConfig config, std::shared_ptr<Transport> transport);

  /// A disabled gateway that never touches a transport.
  static std::shared_ptr<Gateway> disabled();

  const GatewayConfig& config() const { return config_; }
  bool enabled() const { return config_.mode == GatewayMode::live; }

  /// Raw completion. Disabled mode fails before rendering; binding errors
  /// fail before any transport call; transport failures retry up to
  /// max_retries times.
  std::string complete(TemplateId id, const Bindings& bindings);

  /// Parses the reply against `schema`: plain parse, then one repair pass,
  /// then one fresh request. Never returns a value that fails validate().
  Json complete_structured(TemplateId id, const Bindings& bindings, SchemaId schema);

 private:
  void log(TemplateId id, std::chrono::milliseconds latency, std::string_view outcome);

  GatewayConfig config_;
  std::shared_ptr<Transport> transport_;
  std::mutex log_mutex_;
};

}  // namespace provcard::llm
