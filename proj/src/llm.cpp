#include "provcard/llm.hpp"

#include <array>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>

namespace provcard::llm {

namespace detail {
extern const std::string_view kCodeSummaryText;
extern const std::string_view kColumnRelationshipsText;
extern const std::string_view kModelMetricsText;
extern const std::string_view kQueryToFiltersText;
}  // namespace detail

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::code_summary: return "code_summary";
    case TemplateId::column_relationships: return "column_relationships";
    case TemplateId::model_metrics: return "model_metrics";
    case TemplateId::query_to_filters: return "query_to_filters";
  }
  return "code_summary";
}

std::string_view to_string(SchemaId id) {
  switch (id) {
    case SchemaId::column_relationships: return "column_relationships";
    case SchemaId::model_metrics: return "model_metrics";
    case SchemaId::query_filters: return "query_filters";
  }
  return "column_relationships";
}

std::optional<TemplateId> parse_template_id(std::string_view name) {
  for (auto id : {TemplateId::code_summary, TemplateId::column_relationships,
                  TemplateId::model_metrics, TemplateId::query_to_filters}) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

std::string_view to_string(GatewayError::Kind kind) {
  switch (kind) {
    case GatewayError::Kind::disabled: return "disabled";
    case GatewayError::Kind::binding: return "binding";
    case GatewayError::Kind::timeout: return "timeout";
    case GatewayError::Kind::transport: return "transport";
    case GatewayError::Kind::malformed_reply: return "malformed_reply";
  }
  return "transport";
}

const PromptTemplate& prompt_template(TemplateId id) {
  static const std::array<PromptTemplate, 4> templates = {{
      {TemplateId::code_summary, detail::kCodeSummaryText, {"dataframe_var", "code"},
       ReplyShape::free_text, std::nullopt},
      {TemplateId::column_relationships, detail::kColumnRelationshipsText,
       {"code", "existing_columns", "added_columns"}, ReplyShape::structured,
       SchemaId::column_relationships},
      {TemplateId::model_metrics, detail::kModelMetricsText, {"input_code"},
       ReplyShape::structured, SchemaId::model_metrics},
      {TemplateId::query_to_filters, detail::kQueryToFiltersText,
       {"columns", "natural_language_query"}, ReplyShape::structured, SchemaId::query_filters},
  }};
  return templates[static_cast<std::size_t>(id)];
}

std::string render(const PromptTemplate& tmpl, const Bindings& bindings) {
  for (const auto& [name, value] : bindings) {
    bool declared = false;
    for (auto p : tmpl.placeholders) declared = declared || p == name;
    if (!declared) {
      throw GatewayError(GatewayError::Kind::binding, "template " + std::string(to_string(tmpl.id)) +
                                                          " has no placeholder <" + name + ">");
    }
  }
  for (auto p : tmpl.placeholders) {
    if (!bindings.count(std::string(p))) {
      throw GatewayError(GatewayError::Kind::binding, "placeholder <" + std::string(p) +
                                                          "> of " + std::string(to_string(tmpl.id)) +
                                                          " is unbound");
    }
  }

  std::string out;
  out.reserve(tmpl.text.size() + 256);
  std::size_t i = 0;
  const std::string_view text = tmpl.text;
  while (i < text.size()) {
    if (text[i] == '<') {
      const std::size_t close = text.find('>', i + 1);
      if (close != std::string_view::npos) {
        const std::string name(text.substr(i + 1, close - i - 1));
        auto it = bindings.find(name);
        if (it != bindings.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

GatewayConfig GatewayConfig::from_json(const Json& j) {
  GatewayConfig c;
  if (j.contains("endpoint")) c.endpoint = j.at("endpoint").get<std::string>();
  if (j.contains("model")) c.model = j.at("model").get<std::string>();
  if (j.contains("credential_env")) c.credential_env = j.at("credential_env").get<std::string>();
  if (j.contains("timeout_seconds")) c.timeout = std::chrono::seconds(j.at("timeout_seconds").get<int>());
  if (j.contains("max_retries")) c.max_retries = j.at("max_retries").get<int>();
  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "live") {
      c.mode = GatewayMode::live;
    } else if (mode == "disabled") {
      c.mode = GatewayMode::disabled;
    } else {
      throw ParseError("gateway mode must be 'live' or 'disabled', got '" + mode + "'");
    }
  }
  if (j.contains("log_path")) c.log_path = j.at("log_path").get<std::string>();
  return c;
}

GatewayConfig GatewayConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open gateway config '" + path.string() + "'");
  try {
    return from_json(Json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("gateway config '" + path.string() + "': " + e.what());
  }
}

void GatewayConfig::apply_env_overrides() {
  if (const char* v = std::getenv("PROVCARD_LLM_ENDPOINT")) endpoint = v;
  if (const char* v = std::getenv("PROVCARD_LLM_MODEL")) model = v;
  if (const char* v = std::getenv("PROVCARD_LLM_TIMEOUT")) timeout = std::chrono::seconds(std::atoi(v));
  if (const char* v = std::getenv("PROVCARD_LLM_MODE")) {
    const std::string mode = v;
    this->mode = mode == "live" ? GatewayMode::live : GatewayMode::disabled;
  }
}

namespace {

std::string normalize_quotes(std::string_view in) {
  // Typographic quotes to ASCII.
  std::string ascii;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in.substr(i, 3) == "\xE2\x80\x9C" || in.substr(i, 3) == "\xE2\x80\x9D") {
      ascii += '"';
      i += 2;
    } else if (in.substr(i, 3) == "\xE2\x80\x98" || in.substr(i, 3) == "\xE2\x80\x99") {
      ascii += '\'';
      i += 2;
    } else {
      ascii += in[i];
    }
  }
  // Single-quoted strings to double-quoted ones; Python literals to JSON.
  std::string out;
  bool in_double = false;
  for (std::size_t i = 0; i < ascii.size(); ++i) {
    const char c = ascii[i];
    if (in_double) {
      out += c;
      if (c == '\\' && i + 1 < ascii.size()) {
        out += ascii[++i];
      } else if (c == '"') {
        in_double = false;
      }
      continue;
    }
    if (c == '"') {
      in_double = true;
      out += c;
    } else if (c == '\'') {
      out += '"';
      for (++i; i < ascii.size() && ascii[i] != '\''; ++i) {
        if (ascii[i] == '"') {
          out += "\\\"";
        } else if (ascii[i] == '\\' && i + 1 < ascii.size()) {
          out += ascii[i];
          out += ascii[++i];
        } else {
          out += ascii[i];
        }
      }
      out += '"';
    } else if (std::isalpha(static_cast<unsigned char>(c)) &&
               (i == 0 || !std::isalnum(static_cast<unsigned char>(ascii[i - 1])))) {
      std::size_t j = i;
      while (j < ascii.size() && std::isalnum(static_cast<unsigned char>(ascii[j]))) ++j;
      const std::string word = ascii.substr(i, j - i);
      if (word == "True") {
        out += "true";
      } else if (word == "False") {
        out += "false";
      } else if (word == "None") {
        out += "null";
      } else {
        out += word;
      }
      i = j - 1;
    } else {
      out += c;
    }
  }
  return out;
}

std::optional<Json> try_parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

std::string_view structured_body(std::string_view raw) {
  const std::size_t open = raw.find_first_of("{[");
  if (open == std::string_view::npos) return {};
  const char closer = raw[open] == '{' ? '}' : ']';
  const std::size_t close = raw.rfind(closer);
  if (close == std::string_view::npos || close < open) return {};
  return raw.substr(open, close - open + 1);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

const Json* find_key_ci(const Json& obj, std::string_view key) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (lower(it.key()) == key) return &it.value();
  }
  return nullptr;
}

bool is_string_list(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& e : v) {
    if (!e.is_string()) return false;
  }
  return true;
}

bool valid_relationship_object(const Json& obj) {
  if (!obj.is_object()) return false;
  for (const auto& [k, v] : obj.items()) {
    if (!is_string_list(v)) return false;
  }
  return true;
}

}  // namespace

std::optional<Json> repair_structured(std::string_view raw) {
  if (auto j = try_parse(raw)) return j;
  std::string_view body = structured_body(raw);
  if (body.empty()) {
    const std::string normalized = normalize_quotes(raw);
    if (auto j = try_parse(normalized)) return j;
    return std::nullopt;
  }
  if (auto j = try_parse(body)) return j;
  const std::string normalized = normalize_quotes(body);
  return try_parse(normalized);
}

bool validate(SchemaId schema, const Json& value) {
  switch (schema) {
    case SchemaId::column_relationships:
      if (value.is_object()) return valid_relationship_object(value);
      if (!value.is_array()) return false;
      for (const auto& e : value) {
        if (!valid_relationship_object(e)) return false;
      }
      return true;

    case SchemaId::model_metrics: {
      if (!value.is_object()) return false;
      if (value.empty()) return true;
      const Json* name = find_key_ci(value, "model name");
      if (!name || !name->is_string() || name->get<std::string>().empty()) return false;
      for (auto key : {"train variables", "test variables"}) {
        const Json* list = find_key_ci(value, key);
        if (list && !is_string_list(*list)) return false;
      }
      if (const Json* metrics = find_key_ci(value, "metrics")) {
        if (!metrics->is_array()) return false;
        for (const auto& m : *metrics) {
          if (!m.is_object()) return false;
          const Json* metric = find_key_ci(m, "metric");
          const Json* var = find_key_ci(m, "metric variable");
          if (!metric || !metric->is_string() || metric->get<std::string>().empty()) return false;
          if (var && !var->is_string()) return false;
        }
      }
      return true;
    }

    case SchemaId::query_filters: {
      static const std::set<std::string> ops = {"==", "=", "!=", "<", "<=", ">", ">="};
      if (!value.is_array()) return false;
      for (const auto& e : value) {
        if (!e.is_object()) return false;
        if (!e.contains("column") || !e["column"].is_string()) return false;
        if (!e.contains("operator") || !e["operator"].is_string()) return false;
        if (!ops.count(e["operator"].get<std::string>())) return false;
        if (!e.contains("value")) return false;
        const auto& v = e["value"];
        if (!v.is_string() && !v.is_number() && !v.is_boolean()) return false;
      }
      return true;
    }
  }
  return false;
}

Gateway::Gateway(GatewayConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

std::shared_ptr<Gateway> Gateway::disabled() {
  GatewayConfig config;
  config.mode = GatewayMode::disabled;
  return std::make_shared<Gateway>(config, nullptr);
}

void Gateway::log(TemplateId id, std::chrono::milliseconds latency, std::string_view outcome) {
  if (!config_.log_path) return;
  Json line;
  line["time"] = static_cast<long long>(std::time(nullptr));
  line["prompt"] = to_string(id);
  line["latency_ms"] = latency.count();
  line["outcome"] = outcome;
  std::lock_guard lock(log_mutex_);
  std::ofstream out(*config_.log_path, std::ios::app);
  out << line.dump() << '\n';
}

std::string Gateway::complete(TemplateId id, const Bindings& bindings) {
  if (!enabled()) {
    throw GatewayError(GatewayError::Kind::disabled, "language model gateway is disabled");
  }
  const PromptTemplate& tmpl = prompt_template(id);
  CompletionRequest request{id, bindings, render(tmpl, bindings), config_.model, config_.timeout};
  if (!transport_) {
    throw GatewayError(GatewayError::Kind::transport, "no transport configured");
  }

  const int attempts = 1 + std::max(0, config_.max_retries);
  for (int attempt = 1;; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    try {
      std::string reply = transport_->send(request);
      log(id, std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start),
          "ok");
      return reply;
    } catch (const GatewayError& e) {
      log(id, std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start),
          to_string(e.kind()));
      if (attempt >= attempts) throw;
    }
  }
}

Json Gateway::complete_structured(TemplateId id, const Bindings& bindings, SchemaId schema) {
  const PromptTemplate& tmpl = prompt_template(id);
  if (tmpl.shape != ReplyShape::structured) {
    throw GatewayError(GatewayError::Kind::binding,
                       std::string(to_string(id)) + " expects a free-text reply");
  }
  std::string raw;
  for (int round = 0; round < 2; ++round) {
    raw = complete(id, bindings);
    if (auto parsed = try_parse(raw); parsed && validate(schema, *parsed)) return *parsed;
    if (auto repaired = repair_structured(raw); repaired && validate(schema, *repaired)) {
      return *repaired;
    }
  }
  throw GatewayError(GatewayError::Kind::malformed_reply,
                     "reply does not match the " + std::string(to_string(schema)) + " schema", raw);
}

}  // namespace provcard::llm
