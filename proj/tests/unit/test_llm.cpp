#include <deque>

#include "doctest.h"
#include "provcard/llm.hpp"
#include "support.hpp"

using namespace provcard;
using namespace provcard::llm;
using namespace provcard::testing;

namespace {

// Returns queued replies in order; an empty optional queues a transport failure.
class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(std::deque<std::optional<std::string>> replies) : replies_(std::move(replies)) {}
  std::string send(const CompletionRequest& request) override {
    prompts.push_back(request.prompt);
    if (replies_.empty()) throw GatewayError(GatewayError::Kind::transport, "script exhausted");
    auto next = replies_.front();
    replies_.pop_front();
    if (!next) throw GatewayError(GatewayError::Kind::timeout, "scripted timeout");
    return *next;
  }
  std::vector<std::string> prompts;

 private:
  std::deque<std::optional<std::string>> replies_;
};

GatewayConfig live_config() {
  GatewayConfig c;
  c.mode = GatewayMode::live;
  return c;
}

const Bindings kRelationshipBindings{{"code", "df = pd.get_dummies(df, columns=[\"Gender\"])"},
                                     {"existing_columns", "[\"Gender\", \"Age\"]"},
                                     {"added_columns", "[\"Gender_Female\", \"Gender_Male\"]"}};

}  // namespace

TEST_SUITE("llm") {
  TEST_CASE("prompt fidelity: each template renders to its golden file") {
    const std::string imputer = read_file(data_path("fixtures/llm/model_metrics/simple_imputer.py"));
    const std::vector<std::pair<TemplateId, Bindings>> cases = {
        {TemplateId::code_summary, {{"dataframe_var", "df"}, {"code", "df = pd.read_csv(\"student_exam_scores.csv\")"}}},
        {TemplateId::column_relationships, kRelationshipBindings},
        {TemplateId::model_metrics, {{"input_code", imputer}}},
        {TemplateId::query_to_filters,
         {{"columns", "[Glucose, Age, Gender, Outcome]"},
          {"natural_language_query",
           "\"Show me rows/patients having glucose value > 90 and between the age of 25 to 35\""}}},
    };
    for (const auto& [id, bindings] : cases) {
      CAPTURE(to_string(id));
      const std::string golden = read_file(data_path("golden/prompts/" + std::string(to_string(id)) + ".txt"));
      CHECK(render(prompt_template(id), bindings) == golden);
    }
  }

  TEST_CASE("template metadata") {
    CHECK(prompt_template(TemplateId::code_summary).shape == ReplyShape::free_text);
    CHECK(prompt_template(TemplateId::query_to_filters).schema == SchemaId::query_filters);
    CHECK(parse_template_id("model_metrics") == TemplateId::model_metrics);
    CHECK_FALSE(parse_template_id("nope").has_value());
  }

  TEST_CASE("binding errors: missing and extra placeholders") {
    const auto& t = prompt_template(TemplateId::code_summary);
    try {
      render(t, {{"code", "x = 1"}});
      FAIL("expected a binding error");
    } catch (const GatewayError& e) {
      CHECK(e.kind() == GatewayError::Kind::binding);
    }
    CHECK_THROWS_AS(render(t, {{"code", "x"}, {"dataframe_var", "df"}, {"extra", "1"}}), GatewayError);
  }

  TEST_CASE("substituted values are not rescanned for placeholders") {
    const auto& t = prompt_template(TemplateId::code_summary);
    const std::string out = render(t, {{"dataframe_var", "<code>"}, {"code", "<dataframe_var>"}});
    CHECK(out.find("in the <code> variable") != std::string::npos);
    CHECK(out.substr(out.size() - 15) == "<dataframe_var>");
  }

  TEST_CASE("repair handles prose, smart quotes, single quotes and Python literals") {
    auto r = repair_structured("Sure! Here it is:\n[{\"Gender_Female\": [\"Gender\"]}]\nHope that helps.");
    REQUIRE(r);
    CHECK(validate(SchemaId::column_relationships, *r));
    r = repair_structured("{“a”: [“b”]}");
    REQUIRE(r);
    CHECK((*r)["a"][0] == "b");
    r = repair_structured("{'Model Name': 'SVC', 'Train Variables': ['X'], 'Test Variables': [], 'Metrics': []}");
    REQUIRE(r);
    CHECK(validate(SchemaId::model_metrics, *r));
    r = repair_structured("[{'column': 'x', 'operator': '==', 'value': True}]");
    REQUIRE(r);
    CHECK((*r)[0]["value"] == true);
    CHECK_FALSE(repair_structured("no structure here").has_value());
  }

  TEST_CASE("schema validation") {
    CHECK(validate(SchemaId::column_relationships, Json::parse(R"([{"Gender_Female": ["Gender"]}])")));
    CHECK(validate(SchemaId::column_relationships, Json::parse(R"({"BMI": ["Weight", "Height"]})")));
    CHECK(validate(SchemaId::column_relationships, Json::parse("{}")));
    CHECK_FALSE(validate(SchemaId::column_relationships, Json::parse(R"({"BMI": "Weight"})")));
    CHECK(validate(SchemaId::model_metrics, Json::parse("{}")));
    CHECK_FALSE(validate(SchemaId::model_metrics, Json::parse(R"({"Train Variables": []})")));
    CHECK(validate(SchemaId::query_filters, Json::parse(R"([{"column": "Age", "operator": "=", "value": "3"}])")));
    CHECK_FALSE(validate(SchemaId::query_filters, Json::parse(R"([{"column": "Age", "operator": "~", "value": 3}])")));
    CHECK_FALSE(validate(SchemaId::query_filters, Json::parse(R"({"column": "Age"})")));
  }

  TEST_CASE("disabled gateway fails without touching the transport") {
    auto counting = std::make_shared<CountingTransport>();
    Gateway g(GatewayConfig{}, counting);
    CHECK_FALSE(g.enabled());
    try {
      g.complete(TemplateId::code_summary, {{"dataframe_var", "df"}, {"code", "x"}});
      FAIL("expected disabled");
    } catch (const GatewayError& e) {
      CHECK(e.kind() == GatewayError::Kind::disabled);
    }
    CHECK_THROWS_AS(g.complete_structured(TemplateId::column_relationships, kRelationshipBindings,
                                          SchemaId::column_relationships),
                    GatewayError);
    CHECK(counting->calls() == 0);
    CHECK_FALSE(Gateway::disabled()->enabled());
  }

  TEST_CASE("binding errors surface before any transport call") {
    auto counting = std::make_shared<CountingTransport>();
    Gateway g(live_config(), counting);
    CHECK_THROWS_AS(g.complete(TemplateId::code_summary, {{"code", "x"}}), GatewayError);
    CHECK(counting->calls() == 0);
  }

  TEST_CASE("transport failures retry up to max_retries") {
    auto t = std::make_shared<ScriptedTransport>(std::deque<std::optional<std::string>>{std::nullopt, "ok"});
    Gateway g(live_config(), t);
    CHECK(g.complete(TemplateId::code_summary, {{"dataframe_var", "df"}, {"code", "x"}}) == "ok");
    CHECK(t->prompts.size() == 2);

    auto t2 = std::make_shared<ScriptedTransport>(
        std::deque<std::optional<std::string>>{std::nullopt, std::nullopt, "never"});
    Gateway g2(live_config(), t2);
    try {
      g2.complete(TemplateId::code_summary, {{"dataframe_var", "df"}, {"code", "x"}});
      FAIL("expected timeout");
    } catch (const GatewayError& e) {
      CHECK(e.kind() == GatewayError::Kind::timeout);
    }
    CHECK(t2->prompts.size() == 2);
  }

  TEST_CASE("structured replies: repair first, then one fresh request, then malformed") {
    auto t = std::make_shared<ScriptedTransport>(
        std::deque<std::optional<std::string>>{"Answer: {'Gender_Female': ['Gender']}"});
    Gateway g(live_config(), t);
    const Json j = g.complete_structured(TemplateId::column_relationships, kRelationshipBindings,
                                         SchemaId::column_relationships);
    CHECK(j["Gender_Female"][0] == "Gender");
    CHECK(t->prompts.size() == 1);

    auto t2 = std::make_shared<ScriptedTransport>(
        std::deque<std::optional<std::string>>{"I am not sure.", R"([{"Gender_Male": ["Gender"]}])"});
    Gateway g2(live_config(), t2);
    CHECK(g2.complete_structured(TemplateId::column_relationships, kRelationshipBindings,
                                 SchemaId::column_relationships)[0]["Gender_Male"][0] == "Gender");
    CHECK(t2->prompts.size() == 2);

    auto t3 = std::make_shared<ScriptedTransport>(
        std::deque<std::optional<std::string>>{"nothing", "still nothing", "unused"});
    Gateway g3(live_config(), t3);
    try {
      g3.complete_structured(TemplateId::column_relationships, kRelationshipBindings,
                             SchemaId::column_relationships);
      FAIL("expected malformed_reply");
    } catch (const GatewayError& e) {
      CHECK(e.kind() == GatewayError::Kind::malformed_reply);
      CHECK(e.raw_reply() == "still nothing");
    }
    CHECK(t3->prompts.size() == 2);
  }

  TEST_CASE("a parseable reply with the wrong shape is not returned") {
    auto t = std::make_shared<ScriptedTransport>(
        std::deque<std::optional<std::string>>{R"({"BMI": "Weight"})", R"({"BMI": 3})"});
    Gateway g(live_config(), t);
    CHECK_THROWS_AS(g.complete_structured(TemplateId::column_relationships, kRelationshipBindings,
                                          SchemaId::column_relationships),
                    GatewayError);
  }

  TEST_CASE("recorded transport matches on template and bindings") {
    auto rec = std::make_shared<RecordedTransport>(Json::parse(R"([
      {"template": "code_summary", "match": {"code": "a"}, "replies": ["first", "second"]},
      {"template": "code_summary", "reply": "fallback"}
    ])"));
    Gateway g(live_config(), rec);
    CHECK(g.complete(TemplateId::code_summary, {{"dataframe_var", "df"}, {"code", "a"}}) == "first");
    CHECK(g.complete(TemplateId::code_summary, {{"dataframe_var", "df"}, {"code", "a"}}) == "second");
    CHECK(g.complete(TemplateId::code_summary, {{"dataframe_var", "df"}, {"code", "b"}}) == "fallback");
    auto strict = std::make_shared<RecordedTransport>(Json::parse(R"([{"template": "model_metrics", "reply": "{}"}])"));
    Gateway g2(live_config(), strict);
    CHECK_THROWS_AS(g2.complete(TemplateId::code_summary, {{"dataframe_var", "df"}, {"code", "b"}}), GatewayError);
  }

  TEST_CASE("calls are logged as JSON lines") {
    TempDir dir;
    GatewayConfig c = live_config();
    c.log_path = dir.path() / "llm.jsonl";
    auto t = std::make_shared<ScriptedTransport>(std::deque<std::optional<std::string>>{"done"});
    Gateway g(c, t);
    g.complete(TemplateId::code_summary, {{"dataframe_var", "df"}, {"code", "x"}});
    const std::string log = read_file(*c.log_path);
    const Json line = Json::parse(log.substr(0, log.find('\n')));
    CHECK(line.contains("time"));
    CHECK(line["prompt"] == "code_summary");
    CHECK(line["outcome"] == "ok");
    CHECK(line["latency_ms"].is_number());
  }

  TEST_CASE("config loading and validation") {
    auto c = GatewayConfig::from_json(Json::parse(R"({"mode": "live", "max_retries": 3, "timeout_seconds": 5})"));
    CHECK(c.mode == GatewayMode::live);
    CHECK(c.max_retries == 3);
    CHECK(c.timeout == std::chrono::seconds(5));
    CHECK_THROWS_AS(GatewayConfig::from_json(Json::parse(R"({"mode": "maybe"})")), ParseError);
  }
}
