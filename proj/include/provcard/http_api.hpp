#pragma once

#include <map>
#include <string>

#include "json.hpp"
#include "provcard/sync.hpp"

namespace provcard {

struct HttpRequest {
  std::string method;
  std::string path;  // percent-encoded, without the query string
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Routes the sync endpoints to a SyncService without any socket code:
///
///   POST /events                              ingest one captured event
///   GET  /variables                           tracked variable names
///   GET  /history/{variable}?subscriber=      cards with comments
///   GET  /stats/{variable}/{version}/{column} column statistics
///   POST /query/{variable}/{version}          {"query", "backend"?}
///   POST /comments                            {"variable","version","author","text"}
///   GET  /poll?cursor=&subscriber=            cursor delta
///
/// Errors come back as {"error": kind, "message": text, ...} with 400 for bad
/// input, 404 for unknown variables, versions and columns, 422 for queries
/// that do not compile, and 500 for storage failures.
class HttpApi {
 public:
  explicit HttpApi(SyncService& service) : service_(service) {}
  HttpResponse handle(const HttpRequest& request);

 private:
  HttpResponse dispatch(const HttpRequest& request);
  SyncService& service_;
};

std::string percent_decode(std::string_view text);

nlohmann::ordered_json to_json(const CardView& view);
nlohmann::ordered_json to_json(const SyncDelta& delta);

/// Blocks serving the API on host:port until stop_server() or a signal.
void run_server(HttpApi& api, const std::string& host, int port);
void stop_server();

/// Minimal client for a remote sync service, used by `provcard replay --remote`.
class RemoteClient {
 public:
  explicit RemoteClient(std::string base_url);
  /// Throws StorageError when the service is unreachable or rejects the call.
  nlohmann::ordered_json post_event(const IngestEvent& event);
  nlohmann::ordered_json history(const std::string& variable);

 private:
  std::string base_url_;
};

}  // namespace provcard
