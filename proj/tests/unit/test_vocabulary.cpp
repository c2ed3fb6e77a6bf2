#include "doctest.h"
#include "provcard/errors.hpp"
#include "provcard/vocabulary.hpp"
#include "support.hpp"

using namespace provcard;
using namespace provcard::testing;

TEST_SUITE("vocabulary") {
  TEST_CASE("builtin table matches the data file") {
    const Vocabulary from_file = Vocabulary::load(data_path("../data/vocabulary.tsv"));
    CHECK(from_file.size() == Vocabulary::builtin().size());
    CHECK(default_vocabulary_text() == read_file(data_path("../data/vocabulary.tsv")));
  }

  TEST_CASE("lookups by kind") {
    const auto& v = Vocabulary::builtin();
    CHECK(v.contains(VocabKind::estimator, "LinearRegression"));
    CHECK(v.lookup(VocabKind::estimator, "Sequential")->display == "Keras Sequential");
    CHECK(v.lookup(VocabKind::metric, "mean_squared_error")->display == "Mean Squared Error");
    CHECK(v.contains(VocabKind::preprocessor, "SimpleImputer"));
    CHECK_FALSE(v.contains(VocabKind::estimator, "SimpleImputer"));
    CHECK(v.contains(VocabKind::splitter, "train_test_split"));
    CHECK(v.contains(VocabKind::encoder, "get_dummies"));
    CHECK(v.contains(VocabKind::loader, "read_csv"));
  }

  TEST_CASE("parse errors name the line") {
    try {
      Vocabulary::parse("# header\nestimator\tOnlyTwo\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(Vocabulary::parse("wizard\tX\tY\n"), ParseError);
    CHECK(Vocabulary::parse("\n# only comments\n").size() == 0);
  }
}
