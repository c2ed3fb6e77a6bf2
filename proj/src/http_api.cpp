#include "provcard/http_api.hpp"

#include <atomic>
#include <cctype>
#include <charconv>

#include "httplib.h"
#include "provcard/errors.hpp"
#include "provcard/json_io.hpp"

namespace provcard {

using Json = nlohmann::ordered_json;

namespace {

HttpResponse reply(int status, const Json& body) { return {status, body.dump(), "application/json"}; }

HttpResponse error_reply(int status, std::string_view kind, const std::string& message, Json extra = Json::object()) {
  Json body = {{"error", kind}, {"message", message}};
  for (auto& [k, v] : extra.items()) body[k] = v;
  return reply(status, body);
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t slash = path.find('/', start);
    const std::string part = path.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
    if (!part.empty()) parts.push_back(percent_decode(part));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return parts;
}

std::size_t parse_index(const std::string& text, const char* what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(std::string(what) + " must be a non-negative integer, got '" + text + "'");
  }
  return value;
}

Json parse_body(const std::string& body) {
  try {
    return Json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("request body is not valid JSON: ") + e.what());
  }
}

std::atomic<httplib::Server*> g_server{nullptr};

}  // namespace

std::string percent_decode(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size() && std::isxdigit(static_cast<unsigned char>(text[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(text[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(text.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else if (text[i] == '+') {
      out += ' ';
    } else {
      out += text[i];
    }
  }
  return out;
}

Json to_json(const CardView& view) {
  Json j = json::to_json(view.card);
  j["comment_count"] = view.comment_count;
  j["has_unread"] = view.has_unread;
  j["comments"] = Json::array();
  for (const auto& c : view.comments) j["comments"].push_back(json::to_json(c));
  return j;
}

Json to_json(const SyncDelta& delta) {
  Json j;
  j["cards"] = Json::array();
  for (const auto& c : delta.cards) j["cards"].push_back(json::to_json(c));
  j["comments"] = Json::array();
  for (const auto& c : delta.comments) j["comments"].push_back(json::to_json(c));
  j["unread"] = Json::object();
  for (const auto& [variable, flag] : delta.unread) j["unread"][variable] = flag;
  j["notifications"] = delta.notifications;
  j["next_cursor"] = delta.next_cursor;
  j["resync"] = delta.resync;
  return j;
}

HttpResponse HttpApi::handle(const HttpRequest& request) {
  try {
    return dispatch(request);
  } catch (const UnknownColumn& e) {
    return error_reply(404, "unknown_column", e.what(), {{"column", e.column()}, {"nearest", e.nearest()}});
  } catch (const UnknownVariable& e) {
    return error_reply(404, "unknown_variable", e.what(), {{"variable", e.variable()}});
  } catch (const UnknownVersion& e) {
    return error_reply(404, "unknown_version", e.what());
  } catch (const ParseError& e) {
    return error_reply(400, "parse_error", e.what());
  } catch (const ValidationError& e) {
    return error_reply(400, "validation_error", e.what());
  } catch (const StorageError& e) {
    return error_reply(500, "storage_error", e.what());
  } catch (const std::exception& e) {
    return error_reply(500, "internal_error", e.what());
  }
}

HttpResponse HttpApi::dispatch(const HttpRequest& request) {
  const auto parts = split_path(request.path);
  const std::string& method = request.method;
  if (parts.empty()) return error_reply(404, "not_found", "no route for '" + request.path + "'");
  const std::string& head = parts[0];

  if (method == "POST" && head == "events" && parts.size() == 1) {
    const IngestResult r = service_.post_event(event_from_json(parse_body(request.body)));
    return reply(r.created ? 201 : 200, {{"index", r.index}, {"created", r.created}, {"seq", r.seq}});
  }
  if (method == "GET" && head == "variables" && parts.size() == 1) {
    return reply(200, {{"variables", service_.variables()}});
  }
  if (method == "GET" && head == "history" && parts.size() == 2) {
    std::optional<std::string> subscriber;
    if (auto it = request.query.find("subscriber"); it != request.query.end() && !it->second.empty()) {
      subscriber = it->second;
    }
    Json cards = Json::array();
    for (const auto& view : service_.get_history(parts[1], subscriber)) cards.push_back(to_json(view));
    return reply(200, {{"variable", parts[1]}, {"cards", cards}});
  }
  if (method == "GET" && head == "stats" && parts.size() == 4) {
    return reply(200, json::to_json(service_.column_stats(parts[1], parse_index(parts[2], "version"), parts[3])));
  }
  if (method == "POST" && head == "query" && parts.size() == 3) {
    const Json body = parse_body(request.body);
    if (!body.is_object() || !body.contains("query") || !body["query"].is_string()) {
      throw ParseError("query body needs a string field 'query'");
    }
    const std::string backend = body.value("backend", std::string("grammar"));
    if (backend != "grammar" && backend != "llm") {
      throw ValidationError("backend must be 'grammar' or 'llm'");
    }
    try {
      const QueryOutcome out =
          service_.query(parts[1], parse_index(parts[2], "version"), body["query"].get<std::string>(),
                         backend == "llm" ? QueryBackend::llm : QueryBackend::grammar);
      Json j = json::to_json(out.result);
      j["conditions"] = json::to_json(out.conditions);
      j["snapgrid"] = json::to_json(out.snapgrid);
      return reply(200, j);
    } catch (const UnknownColumn& e) {
      return error_reply(422, "unknown_column", e.what(), {{"column", e.column()}, {"nearest", e.nearest()}});
    } catch (const ParseError& e) {
      return error_reply(422, "query_error", e.what());
    } catch (const ValidationError& e) {
      return error_reply(422, "query_error", e.what());
    }
  }
  if (method == "POST" && head == "comments" && parts.size() == 1) {
    const Json body = parse_body(request.body);
    try {
      const Comment c = service_.add_comment(body.at("variable").get<std::string>(),
                                             body.at("version").get<std::size_t>(),
                                             parse_role(body.at("author").get<std::string>()),
                                             body.at("text").get<std::string>());
      return reply(201, {{"comment", json::to_json(c)}, {"notification", comment_notification(c.variable)}});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("comment body: ") + e.what());
    }
  }
  if (method == "GET" && head == "poll" && parts.size() == 1) {
    std::uint64_t cursor = 0;
    if (auto it = request.query.find("cursor"); it != request.query.end() && !it->second.empty()) {
      cursor = parse_index(it->second, "cursor");
    }
    auto it = request.query.find("subscriber");
    if (it == request.query.end()) throw ValidationError("poll needs a subscriber");
    Json j = to_json(service_.poll(it->second, cursor));
    j["poll_seconds"] = service_.poll_seconds();
    return reply(200, j);
  }
  return error_reply(404, "not_found", "no route for " + method + " " + request.path);
}

void run_server(HttpApi& api, const std::string& host, int port) {
  httplib::Server server;
  auto adapt = [&api](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r{req.method, req.path, {}, req.body};
    // httplib folds form-encoded bodies into params; only the URL counts here.
    if (const auto q = req.target.find('?'); q != std::string::npos) {
      httplib::Params params;
      httplib::detail::parse_query_text(req.target.substr(q + 1), params);
      for (const auto& [k, v] : params) r.query[k] = v;
    }
    const HttpResponse out = api.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server.Get(R"(/.*)", adapt);
  server.Post(R"(/.*)", adapt);
  g_server = &server;
  const bool ok = server.listen(host, port);
  g_server = nullptr;
  if (!ok) throw StorageError("cannot listen on " + host + ":" + std::to_string(port));
}

void stop_server() {
  if (auto* s = g_server.load()) s->stop();
}

RemoteClient::RemoteClient(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

Json RemoteClient::post_event(const IngestEvent& event) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(5);
  auto res = client.Post("/events", event_to_json(event).dump(), "application/json");
  if (!res) throw StorageError("sync service at " + base_url_ + " is unreachable: " + httplib::to_string(res.error()));
  if (res->status >= 300) throw StorageError("sync service rejected the event: " + res->body);
  return Json::parse(res->body);
}

Json RemoteClient::history(const std::string& variable) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(5);
  auto res = client.Get("/history/" + variable);
  if (!res) throw StorageError("sync service at " + base_url_ + " is unreachable: " + httplib::to_string(res.error()));
  if (res->status >= 300) throw StorageError("history request failed: " + res->body);
  return Json::parse(res->body);
}

}  // namespace provcard
