#include <fstream>

#include "httplib.h"
#include "provcard/llm.hpp"

namespace provcard::llm {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw GatewayError(GatewayError::Kind::transport, "endpoint '" + url + "' has no scheme");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string reply_text(const Json& body) {
  if (body.contains("choices") && body["choices"].is_array() && !body["choices"].empty()) {
    const auto& choice = body["choices"][0];
    if (choice.contains("text") && choice["text"].is_string()) return choice["text"];
    if (choice.contains("message") && choice["message"].contains("content")) {
      return choice["message"]["content"];
    }
  }
  throw GatewayError(GatewayError::Kind::transport, "completion response has no choices");
}

}  // namespace

HttpTransport::HttpTransport(std::string endpoint, std::string api_key)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)) {}

std::string HttpTransport::send(const CompletionRequest& request) {
  const ParsedUrl url = split_url(endpoint_);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.origin.rfind("https://", 0) == 0) {
    throw GatewayError(GatewayError::Kind::transport, "built without TLS support; cannot reach " +
                                                          url.origin);
  }
#endif
  httplib::Client client(url.origin);
  client.set_connection_timeout(request.timeout);
  client.set_read_timeout(request.timeout);
  client.set_write_timeout(request.timeout);

  Json body;
  body["model"] = request.model;
  body["prompt"] = request.prompt;
  body["max_tokens"] = 512;
  body["temperature"] = 0;

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto result = client.Post(url.path, headers, body.dump(), "application/json");
  if (!result) {
    const auto err = result.error();
    const auto kind = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout
                          ? GatewayError::Kind::timeout
                          : GatewayError::Kind::transport;
    throw GatewayError(kind, "completion request failed: " + httplib::to_string(err));
  }
  if (result->status != 200) {
    throw GatewayError(GatewayError::Kind::transport,
                       "completion service returned HTTP " + std::to_string(result->status));
  }
  try {
    return reply_text(Json::parse(result->body));
  } catch (const nlohmann::json::exception& e) {
    throw GatewayError(GatewayError::Kind::transport,
                       std::string("completion response is not JSON: ") + e.what());
  }
}

RecordedTransport::RecordedTransport(Json entries) {
  if (!entries.is_array()) throw ParseError("recorded replies must be a JSON array");
  for (const auto& e : entries) {
    const auto name = e.at("template").get<std::string>();
    const auto id = parse_template_id(name);
    if (!id) throw ParseError("recorded reply names unknown template '" + name + "'");
    Entry entry{*id, {}, {}, 0};
    if (e.contains("match")) {
      for (const auto& [k, v] : e["match"].items()) entry.match[k] = v.get<std::string>();
    }
    if (e.contains("replies")) {
      for (const auto& r : e["replies"]) entry.replies.push_back(r.get<std::string>());
    } else {
      entry.replies.push_back(e.at("reply").get<std::string>());
    }
    if (entry.replies.empty()) throw ParseError("recorded reply for '" + name + "' is empty");
    entries_.push_back(std::move(entry));
  }
}

std::shared_ptr<RecordedTransport> RecordedTransport::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open recorded replies '" + path.string() + "'");
  try {
    return std::make_shared<RecordedTransport>(Json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("recorded replies '" + path.string() + "': " + e.what());
  }
}

std::string RecordedTransport::send(const CompletionRequest& request) {
  std::lock_guard lock(mutex_);
  for (auto& entry : entries_) {
    if (entry.template_id != request.template_id) continue;
    bool matches = true;
    for (const auto& [k, v] : entry.match) {
      auto it = request.bindings.find(k);
      if (it == request.bindings.end() || it->second != v) {
        matches = false;
        break;
      }
    }
    if (!matches) continue;
    const std::size_t i = std::min(entry.next, entry.replies.size() - 1);
    ++entry.next;
    return entry.replies[i];
  }
  throw GatewayError(GatewayError::Kind::transport,
                     "no recorded reply for " + std::string(to_string(request.template_id)));
}

std::string CountingTransport::send(const CompletionRequest& request) {
  {
    std::lock_guard lock(mutex_);
    ++calls_;
  }
  if (!inner_) throw GatewayError(GatewayError::Kind::transport, "counting transport has no backend");
  return inner_->send(request);
}

std::size_t CountingTransport::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

}  // namespace provcard::llm
