#include "doctest.h"
#include "provcard/csv.hpp"
#include "provcard/errors.hpp"
#include "provcard/stats.hpp"
#include "support.hpp"

using namespace provcard;
using namespace provcard::testing;

TEST_SUITE("stats") {
  TEST_CASE("numeric summary matches hand-computed values") {
    const auto f = TabularFrame::from_values({"v"}, {0, 1, 2, 3, 4, 5},
                                             {{num(1)}, {num(2)}, {num(3)}, {num(4)}, {num(100)}, {na()}});
    const ColumnStats s = compute_column_stats(f, "v");
    CHECK(s.row_count == 6);
    CHECK(s.missing_count == 1);
    CHECK(*s.mean == doctest::Approx(22.0));
    CHECK(*s.median == doctest::Approx(3.0));
    CHECK(*s.stddev == doctest::Approx(std::sqrt(1522.0)));  // population variance 7610 / 5
    REQUIRE(s.bins.size() == kHistogramBins);
    CHECK(s.bins.front().lower == 1.0);
    CHECK(s.bins.back().upper == 100.0);
    CHECK(s.bins.front().count == 4);
    CHECK(s.bins.back().count == 1);
  }

  TEST_CASE("constant column gets one bin") {
    const auto f = TabularFrame::from_values({"v"}, {0, 1}, {{num(7)}, {num(7)}});
    const auto s = compute_column_stats(f, "v");
    REQUIRE(s.bins.size() == 1);
    CHECK(s.bins[0].count == 2);
    CHECK(*s.stddev == 0.0);
  }

  TEST_CASE("categorical counts sort by count then value") {
    const auto f = TabularFrame::from_values({"g"}, {0, 1, 2, 3},
                                             {{txt("b")}, {txt("a")}, {txt("b")}, {na()}});
    const auto s = compute_column_stats(f, "g");
    CHECK(s.missing_count == 1);
    REQUIRE(s.categories.size() == 2);
    CHECK(s.categories[0] == std::pair<std::string, std::size_t>{"b", 2});
    CHECK(s.categories[1] == std::pair<std::string, std::size_t>{"a", 1});
  }

  TEST_CASE("education WritingScore agrees with an independent computation") {
    // Reference values computed with Python's statistics module over the CSV.
    const auto f = read_snapshot_csv(data_path("fixtures/education/snapshots/step1_df.csv"));
    const auto s = compute_column_stats(f, "WritingScore");
    CHECK(s.missing_count == 0);
    CHECK(*s.mean == doctest::Approx(68.91833333333334).epsilon(1e-12));
    CHECK(*s.median == 69.0);
    CHECK(*s.stddev == doctest::Approx(14.25008762156297).epsilon(1e-12));
    std::size_t total = 0;
    for (const auto& b : s.bins) total += b.count;
    CHECK(total == 600);

    const auto eth = compute_column_stats(f, "EthnicGroup");
    CHECK(eth.missing_count == 37);
    REQUIRE(eth.categories.size() == 5);
    CHECK(eth.categories[0] == std::pair<std::string, std::size_t>{"group C", 191});
    CHECK(eth.categories[4] == std::pair<std::string, std::size_t>{"group E", 55});
  }

  TEST_CASE("unknown column carries nearest names") {
    const auto f = TabularFrame::from_values({"MathScore", "WritingScore"}, {0}, {{num(1), num(2)}});
    try {
      compute_column_stats(f, "writingscore");
      FAIL("expected UnknownColumn");
    } catch (const UnknownColumn& e) {
      REQUIRE(!e.nearest().empty());
      CHECK(e.nearest().front() == "WritingScore");
    }
  }
}
