#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "provcard/csv.hpp"
#include "provcard/http_api.hpp"
#include "provcard/session.hpp"
#include "support.hpp"

using namespace provcard;
using namespace provcard::testing;
using Json = nlohmann::ordered_json;

namespace {

struct Api {
  TempDir dir;
  SyncService service{dir.path(), {}};
  HttpApi api{service};

  HttpResponse call(std::string method, std::string path, std::string body = {},
                    std::map<std::string, std::string> query = {}) {
    return api.handle({std::move(method), std::move(path), std::move(query), std::move(body)});
  }
  Json json_of(const HttpResponse& r) { return Json::parse(r.body); }

  void load_education(std::size_t steps) {
    const auto session = read_session(data_path("fixtures/education/session.txt"));
    for (std::size_t i = 0; i < steps; ++i) {
      const auto r = call("POST", "/events", event_to_json(load_step(session[i])).dump());
      REQUIRE(r.status == 201);
    }
  }
};

}  // namespace

TEST_SUITE("http") {
  TEST_CASE("events, variables and history") {
    Api a;
    a.load_education(2);
    CHECK(a.json_of(a.call("GET", "/variables"))["variables"] == Json::array({"df"}));
    const Json h = a.json_of(a.call("GET", "/history/df"));
    REQUIRE(h["cards"].size() == 2);
    CHECK(h["cards"][1]["operation_kind"] == "missing_value_imputation");
    CHECK(h["cards"][1]["snapgrid"]["legend_version"] == "1");
    CHECK(a.call("GET", "/history/nope").status == 404);
  }

  TEST_CASE("an event body is validated") {
    Api a;
    CHECK(a.call("POST", "/events", "{not json").status == 400);
    CHECK(a.call("POST", "/events", R"({"variable": "df"})").status == 400);
    const Json bad_csv = {{"variable", "df"}, {"cell_id", "c"}, {"execution_count", 1}, {"code", "x"},
                          {"snapshot_csv", "a,b\n1,2,3\n"}};
    const auto r = a.call("POST", "/events", bad_csv.dump());
    CHECK(r.status == 400);
    CHECK(a.json_of(r)["message"].get<std::string>().find("line 2") != std::string::npos);
  }

  TEST_CASE("stats endpoint with URL-encoded segments") {
    Api a;
    a.load_education(1);
    const auto r = a.call("GET", "/stats/df/0/WritingScore");
    REQUIRE(r.status == 200);
    CHECK(a.json_of(r)["dtype"] == "numeric");
    CHECK(a.call("GET", "/stats/df/0/Writing%20Score").status == 404);
    const Json unknown = a.json_of(a.call("GET", "/stats/df/0/WritingScor"));
    CHECK(unknown["nearest"][0] == "WritingScore");
    CHECK(a.call("GET", "/stats/df/9/WritingScore").status == 404);
    CHECK(a.call("GET", "/stats/df/x/WritingScore").status == 400);
    CHECK(percent_decode("parents%27%20education+level") == "parents' education level");
  }

  TEST_CASE("query endpoint") {
    Api a;
    a.load_education(1);
    const auto r = a.call("POST", "/query/df/0",
                          R"({"query": "WritingScore is below 75 and SportsPracticeFrequency is less than 2"})");
    REQUIRE(r.status == 200);
    const Json j = a.json_of(r);
    CHECK(j["conditions"] == Json::parse(R"([{"column": "WritingScore", "operator": "<", "value": 75},
                                             {"column": "SportsPracticeFrequency", "operator": "<", "value": 2}])"));
    CHECK(j["rows"].size() > 0);
    CHECK(j["snapgrid"]["rows"].size() <= 9);

    const auto unknown = a.call("POST", "/query/df/0", R"({"query": "WritngScore is below 75"})");
    CHECK(unknown.status == 422);
    CHECK(a.json_of(unknown)["nearest"][0] == "WritingScore");
    CHECK(a.call("POST", "/query/df/0", R"({"query": "MathScore below 3 or MathScore above 9"})").status == 422);
    CHECK(a.call("POST", "/query/df/0", R"({"q": 1})").status == 400);
    CHECK(a.call("POST", "/query/df/0", R"({"query": "MathScore below 3", "backend": "magic"})").status == 400);
    // The LLM backend with no live gateway falls back to the grammar.
    CHECK(a.call("POST", "/query/df/0", R"({"query": "MathScore below 30", "backend": "llm"})").status == 200);
  }

  TEST_CASE("comments and polling") {
    Api a;
    a.load_education(2);
    const auto c = a.call("POST", "/comments",
                          R"({"variable": "df", "version": 1, "author": "domain_expert", "text": "Why the mode?"})");
    REQUIRE(c.status == 201);
    CHECK(a.json_of(c)["notification"] == "A new comment has been added for variable 'df'!");
    CHECK(a.call("POST", "/comments", R"({"variable": "df"})").status == 400);
    CHECK(a.call("POST", "/comments", R"({"variable": "df", "version": 1, "author": "cat", "text": "x"})").status ==
          400);

    const Json p = a.json_of(a.call("GET", "/poll", {}, {{"cursor", "0"}, {"subscriber", "data_scientist"}}));
    CHECK(p["cards"].size() == 2);
    CHECK(p["comments"].size() == 1);
    CHECK(p["unread"]["df"] == true);
    CHECK(p["next_cursor"] == 3);
    CHECK(p["poll_seconds"] == 15);

    const Json h = a.json_of(a.call("GET", "/history/df", {}, {{"subscriber", "data_scientist"}}));
    CHECK(h["cards"][1]["has_unread"] == true);
    CHECK(h["cards"][1]["comment_count"] == 1);
    const Json p2 = a.json_of(a.call("GET", "/poll", {}, {{"cursor", "3"}, {"subscriber", "data_scientist"}}));
    CHECK(p2["cards"].empty());
    CHECK(p2["unread"]["df"] == false);
    CHECK(a.call("GET", "/poll", {}, {{"cursor", "0"}}).status == 400);
  }

  TEST_CASE("unknown routes") {
    Api a;
    CHECK(a.call("GET", "/").status == 404);
    CHECK(a.call("DELETE", "/events").status == 404);
    CHECK(a.call("GET", "/events").status == 404);
  }
  TEST_CASE("served over a socket") {
    Api a;
    const int port = 20000 + static_cast<int>(std::hash<std::string>{}(a.dir.path().string()) % 20000);
    std::thread server([&] { run_server(a.api, "127.0.0.1", port); });
    httplib::Client raw("127.0.0.1", port);
    for (int i = 0; i < 100 && !raw.Get("/variables"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(20));

    // A full snapshot is far above httplib's default form-body cap.
    const auto session = read_session(data_path("fixtures/education/session.txt"));
    RemoteClient client("http://127.0.0.1:" + std::to_string(port) + "/");
    CHECK(client.post_event(load_step(session[0]))["created"] == true);

    const std::string second = event_to_json(load_step(session[1])).dump();
    REQUIRE(second.size() > 8192);
    auto res = raw.Post("/events", second, "application/x-www-form-urlencoded");
    REQUIRE(res);
    CHECK(res->status == 201);

    res = raw.Get("/poll?cursor=1&subscriber=domain_expert");
    REQUIRE(res);
    const Json delta = Json::parse(res->body);
    CHECK(delta["cards"].size() == 1);
    CHECK(delta["cards"][0]["index"] == 1);
    CHECK(client.history("df")["cards"].size() == 2);

    stop_server();
    server.join();
    CHECK_THROWS_AS(client.history("df"), StorageError);
  }
}
