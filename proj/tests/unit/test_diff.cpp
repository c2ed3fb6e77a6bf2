#include <cstring>
#include <set>

#include "doctest.h"
#include "provcard/diff.hpp"
#include "provcard/errors.hpp"
#include "random_frames.hpp"
#include "support.hpp"

using namespace provcard;
using namespace provcard::testing;

namespace {

// Bit-level equality, stricter than CellValue's tolerance.
bool identical(const TabularFrame& a, const TabularFrame& b) {
  if (a.columns() != b.columns() || a.row_ids() != b.row_ids()) return false;
  for (std::size_t r = 0; r < a.num_rows(); ++r) {
    for (std::size_t c = 0; c < a.num_columns(); ++c) {
      const CellValue &x = a.at(r, c), &y = b.at(r, c);
      if (x.kind() != y.kind()) return false;
      if (x.is_number()) {
        const double dx = x.as_number(), dy = y.as_number();
        if (std::memcmp(&dx, &dy, sizeof(double)) != 0) return false;
      }
      if (x.is_text() && x.as_text() != y.as_text()) return false;
      if (x.is_bool() && x.as_bool() != y.as_bool()) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("diff") {
  TEST_CASE("first version reports everything added") {
    const auto f = TabularFrame::from_values({"a", "b"}, {0, 1}, {{num(1), txt("x")}, {num(2), txt("y")}});
    const ChangeSet c = diff(nullptr, f);
    CHECK(c.full_replacement);
    CHECK(c.added_column_names() == std::vector<std::string>{"a", "b"});
    CHECK(c.added_row_ids() == std::vector<RowId>{0, 1});
    CHECK(identical(apply(TabularFrame(), c), f));
  }

  TEST_CASE("cell, row and column changes are each reported once") {
    const auto prev = TabularFrame::from_values({"a", "b", "c"}, {0, 1, 2},
                                                {{num(1), txt("x"), num(0)},
                                                 {na(), txt("y"), num(0)},
                                                 {num(3), txt("z"), num(0)}});
    const auto next = TabularFrame::from_values({"a", "b", "d"}, {0, 1, 5},
                                                {{num(1), txt("X"), num(9)},
                                                 {num(2), txt("y"), num(9)},
                                                 {num(4), txt("w"), num(9)}});
    const ChangeSet c = diff(prev, next);
    CHECK_FALSE(c.full_replacement);
    REQUIRE(c.modified_cells.size() == 2);
    CHECK(c.modified_cells[0] == ModifiedCell{0, "b", txt("x"), txt("X")});
    CHECK(c.modified_cells[1] == ModifiedCell{1, "a", na(), num(2)});
    CHECK(c.removed_column_names() == std::vector<std::string>{"c"});
    CHECK(c.added_column_names() == std::vector<std::string>{"d"});
    CHECK(c.removed_rows == std::vector<RowId>{2});
    CHECK(c.added_row_ids() == std::vector<RowId>{5});
    CHECK(identical(apply(prev, c), next));
  }

  TEST_CASE("identical frames give an empty ChangeSet") {
    const auto f = TabularFrame::from_values({"a"}, {0}, {{num(1)}});
    CHECK(diff(f, f).empty());
  }

  TEST_CASE("disjoint frames are a full replacement") {
    const auto a = TabularFrame::from_values({"a"}, {0}, {{num(1)}});
    const auto b = TabularFrame::from_values({"b"}, {7}, {{num(1)}});
    const ChangeSet c = diff(a, b);
    CHECK(c.full_replacement);
    CHECK(identical(apply(a, c), b));
  }

  TEST_CASE("reordering is preserved through apply") {
    const auto a = TabularFrame::from_values({"a", "b"}, {0, 1}, {{num(1), num(2)}, {num(3), num(4)}});
    const auto b = TabularFrame::from_values({"b", "a"}, {1, 0}, {{num(4), num(3)}, {num(2), num(1)}});
    const ChangeSet c = diff(a, b);
    CHECK(c.modified_cells.empty());
    CHECK(identical(apply(a, c), b));
  }

  TEST_CASE("apply rejects a ChangeSet that does not fit") {
    const auto a = TabularFrame::from_values({"a"}, {0}, {{num(1)}});
    const auto b = TabularFrame::from_values({"a"}, {0, 1}, {{num(1)}, {num(2)}});
    const ChangeSet c = diff(a, b);
    CHECK_THROWS_AS(apply(b, c), InconsistentChange);
    const auto other = TabularFrame::from_values({"z"}, {0}, {{num(1)}});
    CHECK_THROWS_AS(apply(other, c), InconsistentChange);
  }

  TEST_CASE("round trip on random frame pairs") {
    FrameGen gen(20240601);
    for (int i = 0; i < 500; ++i) {
      const TabularFrame prev = gen.frame(50, 20);
      const TabularFrame next = gen.edit(prev, 50, 20);
      const ChangeSet c = diff(prev, next);
      REQUIRE(identical(apply(prev, c), next));
      // Every reported modification really differs, and nothing is reported twice.
      std::set<std::pair<RowId, std::string>> seen;
      for (const auto& m : c.modified_cells) {
        REQUIRE_FALSE(m.old_value == m.new_value);
        REQUIRE(seen.emplace(m.row_id, m.column).second);
      }
    }
  }
}
