#include "doctest.h"
#include "provcard/insight.hpp"
#include "provcard/json_io.hpp"
#include "support.hpp"

using namespace provcard;
using namespace provcard::testing;

namespace {

std::string snippet(const std::string& name) {
  return read_file(data_path("fixtures/llm/model_metrics/" + name + ".py"));
}

std::optional<ModelMetadata> expected(const std::string& name) {
  return model_metadata_from_json(
      llm::Json::parse(read_file(data_path("fixtures/llm/model_metrics/" + name + ".json"))));
}

}  // namespace

TEST_SUITE("model_metadata") {
  TEST_CASE("reading a reply: case-insensitive keys, {} is absent") {
    const auto m = expected("linear_regression");
    REQUIRE(m);
    CHECK(m->model_name == "LinearRegression");
    CHECK(m->train_variables == std::vector<std::string>{"X_train", "Y_train"});
    CHECK(m->test_variables == std::vector<std::string>{"X_test", "y_test"});
    REQUIRE(m->metrics.size() == 2);
    CHECK(m->metrics[1] == ModelMetric{"Mean Absolute Error", "mae_test", std::nullopt});
    CHECK_FALSE(expected("simple_imputer"));
  }

  TEST_CASE("deterministic extraction reproduces each worked example") {
    for (const char* name : {"linear_regression", "linear_regression_no_test", "logistic_regression",
                             "keras_sequential"}) {
      CAPTURE(name);
      const auto want = expected(name);
      const auto got = deterministic_model_metadata(snippet(name));
      REQUIRE(got);
      CHECK(*got == *want);
    }
    CHECK_FALSE(deterministic_model_metadata(snippet("simple_imputer")));
  }

  TEST_CASE("captured values attach to metric variables") {
    const MetricValues values{{"accuracy", 0.9}, {"recall", 0.8}};
    const auto m = deterministic_model_metadata(snippet("logistic_regression"), &values);
    REQUIRE(m);
    CHECK(m->metrics[0].value == std::optional<double>(0.9));
    CHECK_FALSE(m->metrics[1].value);
    CHECK(m->metrics[2].value == std::optional<double>(0.8));
  }

  TEST_CASE("scalers and imputers alone are not models") {
    CHECK_FALSE(deterministic_model_metadata("sc = StandardScaler().fit(X)\nX2 = sc.transform(X)"));
    CHECK_FALSE(deterministic_model_metadata("print('fit(')"));
  }

  TEST_CASE("wire form uses the reply field names") {
    const auto j = json::to_json(*expected("logistic_regression"));
    CHECK(j["Model Name"] == "LogisticRegression");
    CHECK(j["Metrics"][0]["Metric Variable"] == "accuracy");
    CHECK(json::model_metadata_from_json(j) == *expected("logistic_regression"));
  }
}
