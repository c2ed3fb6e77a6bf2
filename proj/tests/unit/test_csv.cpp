#include "doctest.h"
#include "provcard/csv.hpp"
#include "provcard/errors.hpp"
#include "random_frames.hpp"
#include "support.hpp"

using namespace provcard;
using namespace provcard::testing;

TEST_SUITE("csv") {
  TEST_CASE("quoted empty string differs from a missing field") {
    const auto f = parse_snapshot_csv("__row_id,a,b\n0,,\"\"\n1,x,y\n");
    CHECK(f.find(0, "a")->is_missing());
    CHECK(*f.find(0, "b") == txt(""));
  }

  TEST_CASE("row ids default to positions when the id column is absent") {
    const auto f = parse_snapshot_csv("a,b\n1,2\n3,4\n");
    CHECK(f.row_ids() == std::vector<RowId>{0, 1});
    CHECK(f.column_names() == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("quoting keeps commas, quotes and newlines") {
    const auto f = parse_snapshot_csv("__row_id,note\n5,\"a, \"\"b\"\"\nc\"\n");
    CHECK(*f.find(5, "note") == txt("a, \"b\"\nc"));
    CHECK(write_snapshot_csv(f) == "__row_id,note\n5,\"a, \"\"b\"\"\nc\"\n");
  }

  TEST_CASE("malformed input names the line") {
    CHECK_THROWS_AS(parse_snapshot_csv("a,b\n1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse_snapshot_csv("a\n\"open\n"), ParseError);
    CHECK_THROWS_AS(parse_snapshot_csv("a,a\n1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_snapshot_csv("__row_id,a\nx,1\n"), ParseError);
    CHECK_THROWS_AS(parse_snapshot_csv("__row_id,a\n1,1\n1,2\n"), ParseError);
    try {
      parse_snapshot_csv("a,b\n1,2\n3\n");
      FAIL("expected a ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }

  TEST_CASE("explicit dtypes override inference") {
    const std::vector<DType> dtypes{DType::text};
    const auto f = parse_snapshot_csv("__row_id,code\n0,007\n", &dtypes);
    CHECK(*f.find(0, "code") == txt("007"));
  }

  TEST_CASE("random frames survive a write/read round trip") {
    FrameGen gen(7);
    for (int i = 0; i < 200; ++i) {
      const TabularFrame f = gen.frame(30, 8);
      std::vector<DType> dtypes;
      for (const auto& c : f.columns()) dtypes.push_back(c.dtype);
      const TabularFrame back = parse_snapshot_csv(write_snapshot_csv(f), &dtypes);
      REQUIRE(back == f);
    }
  }

  TEST_CASE("education snapshot loads with the expected shape") {
    const auto f = read_snapshot_csv(data_path("fixtures/education/snapshots/step1_df.csv"));
    CHECK(f.num_rows() == 600);
    CHECK(f.num_columns() == 12);
    CHECK(f.columns()[*f.column_index("WritingScore")].dtype == DType::numeric);
    CHECK(f.columns()[*f.column_index("EthnicGroup")].dtype == DType::categorical);
  }
}
