#include "doctest.h"
#include "provcard/pycode.hpp"

using namespace provcard::pycode;

TEST_SUITE("pycode") {
  TEST_CASE("tokens: strings, prefixes, triple quotes and comments") {
    const auto t = tokenize("x = f'a{b}' + \"\"\"multi\nline\"\"\"  # note\ny = 3.5e2");
    std::vector<Token::Kind> kinds;
    for (const auto& tok : t) kinds.push_back(tok.kind);
    REQUIRE(t.size() == 10);
    CHECK(t[6].text == "\n");
    CHECK(t[2].kind == Token::Kind::string);
    CHECK(t[2].text == "a{b}");
    CHECK(t[4].text == "multi\nline");
    CHECK(t[5].kind == Token::Kind::comment);
    CHECK(t[5].text == " note");
    CHECK(t[9].kind == Token::Kind::number);
    CHECK(tokenize("'unterminated").size() == 1);
  }

  TEST_CASE("statements join bracketed continuation lines") {
    const auto s = parse_statements("# load\ndf = pd.read_csv(\n  'a.csv',\n  sep=',')\nprint(df)");
    REQUIRE(s.size() == 2);
    CHECK(s[0].comments == std::vector<std::string>{"load"});
    CHECK(s[0].targets == std::vector<std::string>{"df"});
    REQUIRE(s[0].calls.size() == 1);
    const Call& c = s[0].calls[0];
    CHECK(c.callee == "pd.read_csv");
    CHECK(c.method == "read_csv");
    CHECK(c.receiver == "pd");
    REQUIRE(c.positional().size() == 1);
    CHECK(c.positional()[0]->strings == std::vector<std::string>{"a.csv"});
    REQUIRE(c.keyword("sep"));
    CHECK(c.keyword("sep")->strings == std::vector<std::string>{","});
  }

  TEST_CASE("tuple targets, subscript targets and chained calls") {
    const auto s = parse_statements(
        "X_train, X_test, y_train, y_test = train_test_split(X, y, test_size=0.2)\n"
        "df['BMI'] = df['Weight'] / df['Height'] ** 2\n"
        "reg = LinearRegression().fit(X_train, y_train)\n");
    REQUIRE(s.size() == 3);
    CHECK(s[0].targets == std::vector<std::string>{"X_train", "X_test", "y_train", "y_test"});
    CHECK(s[0].calls[0].positional()[0]->name == std::optional<std::string>("X"));
    CHECK(s[1].subscript_targets == std::vector<std::string>{"BMI"});
    CHECK(s[1].subscript_keys == std::vector<std::string>{"Weight", "Height"});
    REQUIRE(s[2].calls.size() == 2);
    CHECK(s[2].calls[0].callee == "LinearRegression");
    CHECK(s[2].calls[1].method == "fit");
    CHECK(s[2].calls[1].receiver_call == 0);
  }

  TEST_CASE("comparison operators do not create targets") {
    const auto s = parse_statements("flag = a == b\nif x >= 3: y = 1");
    CHECK(s[0].targets == std::vector<std::string>{"flag"});
  }
}
