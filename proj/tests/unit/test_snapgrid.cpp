#include <algorithm>
#include <set>

#include "doctest.h"
#include "provcard/diff.hpp"
#include "provcard/snapgrid.hpp"
#include "random_frames.hpp"
#include "support.hpp"

using namespace provcard;
using namespace provcard::testing;

namespace {

// Changed-cell test computed straight from the two frames.
bool cell_changed(const TabularFrame& prev, const TabularFrame& next, RowId row, const std::string& col) {
  const CellValue* a = prev.find(row, col);
  const CellValue* b = next.find(row, col);
  if (!a && !b) return false;
  if (!a || !b) return true;
  return !(*a == *b);
}

std::size_t oracle_coverage(const TabularFrame& prev, const TabularFrame& next, const std::vector<RowId>& rows,
                            const std::vector<std::string>& cols) {
  std::size_t n = 0;
  for (RowId r : rows)
    for (const auto& c : cols) n += cell_changed(prev, next, r, c) ? 1 : 0;
  return n;
}

// Best coverage over every subset of min(9, |rows|) rows.
std::size_t exhaustive_best(const TabularFrame& prev, const TabularFrame& next, const std::vector<RowId>& all,
                            const std::vector<std::string>& cols) {
  const std::size_t k = std::min(kGridRows, all.size());
  std::vector<bool> pick(all.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  std::size_t best = 0;
  do {
    std::vector<RowId> rows;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (pick[i]) rows.push_back(all[i]);
    best = std::max(best, oracle_coverage(prev, next, rows, cols));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST_SUITE("snapgrid") {
  TEST_CASE("one-hot window keeps the source and both indicators with a box") {
    const auto prev = TabularFrame::from_values({"Gender", "Age"}, {0, 1, 2},
                                                {{txt("Female"), num(20)}, {txt("Male"), num(30)},
                                                 {txt("Female"), num(40)}});
    const auto next = TabularFrame::from_values({"Age", "Gender_Female", "Gender_Male"}, {0, 1, 2},
                                                {{num(20), num(1), num(0)}, {num(30), num(0), num(1)},
                                                 {num(40), num(1), num(0)}});
    const ChangeSet c = diff(prev, next);
    const ColumnRelationships rel{{"Gender_Female", {"Gender"}}, {"Gender_Male", {"Gender"}}};
    const auto spec = select_subset(c, &prev, next, rel);
    CHECK(spec.columns == std::vector<std::string>{"Gender", "Age", "Gender_Female", "Gender_Male"});
    REQUIRE(spec.boxes.size() == 1);
    CHECK(spec.boxes[0] == RelationshipBox{"Gender", {"Gender_Female", "Gender_Male"}});

    const SnapGrid g = render_snapgrid(spec, c, &prev, next);
    CHECK(g.columns[0].header_state == CellState::removed);
    CHECK(g.columns[1].header_state == CellState::unchanged);
    CHECK(g.columns[2].header_state == CellState::added);
    CHECK(g.cells[0][0].state == CellState::removed);
    CHECK(g.cells[0][0].in_relationship_box);
    CHECK(g.cells[0][2].state == CellState::added);
    CHECK(g.cells[0][1].state == CellState::unchanged);
  }

  TEST_CASE("row selection prefers changed rows and pads by row id") {
    std::vector<std::vector<CellValue>> a, b;
    std::vector<RowId> ids;
    for (int i = 0; i < 20; ++i) {
      ids.push_back(i);
      a.push_back({num(i)});
      b.push_back({num(i == 15 || i == 3 ? i + 100 : i)});
    }
    const auto prev = TabularFrame::from_values({"v"}, ids, a);
    const auto next = TabularFrame::from_values({"v"}, ids, b);
    const auto spec = select_subset(diff(prev, next), &prev, next, {});
    CHECK(spec.rows == std::vector<RowId>{0, 1, 2, 3, 4, 5, 6, 7, 15});
  }

  TEST_CASE("modified cells show old and new values; overflow counts cover the dataset") {
    std::vector<std::vector<CellValue>> a, b;
    std::vector<RowId> ids;
    for (int i = 0; i < 30; ++i) {
      ids.push_back(i);
      a.push_back({na()});
      b.push_back({txt("unknown")});
    }
    const auto prev = TabularFrame::from_values({"EthnicGroup"}, ids, a);
    const auto next = TabularFrame::from_values({"EthnicGroup"}, ids, b);
    const ChangeSet c = diff(prev, next);
    const auto g = render_snapgrid(select_subset(c, &prev, next, {}), c, &prev, next);
    REQUIRE(g.columns.size() == 1);
    CHECK(g.columns[0].overflow_count == std::optional<std::size_t>(30));
    CHECK(g.cells[0][0].state == CellState::modified);
    CHECK(g.cells[0][0].display == "NaN → unknown");
  }

  TEST_CASE("state precedence and the query overlay") {
    const auto prev = TabularFrame::from_values({"a", "gone"}, {0, 1}, {{num(1), num(5)}, {num(2), num(6)}});
    const auto next = TabularFrame::from_values({"a", "new"}, {0, 2}, {{num(1), num(7)}, {num(3), num(8)}});
    const ChangeSet c = diff(prev, next);
    SnapGridSpec spec{{0, 1, 2}, {"a", "gone", "new"}, {}};
    const std::vector<CellRef> hits{{0, "a"}, {2, "a"}, {99, "a"}};
    const SnapGrid g = render_snapgrid(spec, c, &prev, next, &hits);
    CHECK(g.cells[0][0].state == CellState::query_match);  // unchanged and matched
    CHECK(g.cells[2][0].state == CellState::added);        // added wins over the match
    CHECK(g.cells[2][0].query_hit);
    CHECK(g.cells[1][0].state == CellState::removed);      // row 1 was dropped
    CHECK(g.cells[2][1].state == CellState::not_present);  // removed column, added row
    CHECK(g.cells[1][2].state == CellState::not_present);  // added column, removed row
    CHECK(g.warnings.size() == 1);
  }

  TEST_CASE("query focus keeps the first nine matching rows and its columns first") {
    std::vector<std::vector<CellValue>> rows;
    std::vector<RowId> ids;
    for (int i = 0; i < 30; ++i) {
      ids.push_back(i);
      rows.push_back({num(i), num(i % 3)});
    }
    const auto f = TabularFrame::from_values({"x", "y"}, ids, rows);
    QueryFocus q;
    for (int i = 29; i >= 0; i -= 2) q.rows.push_back(i);
    q.columns = {"y"};
    const auto spec = select_subset(ChangeSet{}, &f, f, {}, &q);
    CHECK(spec.rows == std::vector<RowId>{1, 3, 5, 7, 9, 11, 13, 15, 17});
    CHECK(spec.columns == std::vector<std::string>{"x", "y"});
  }

  TEST_CASE("ellipsize counts code points") {
    CHECK(ellipsize("short") == "short");
    CHECK(ellipsize("exactly12chr") == "exactly12chr");
    CHECK(ellipsize("thirteen char") == "thirteen ch…");
    CHECK(ellipsize("ééééééééééééé") == "ééééééééééé…");
  }

  TEST_CASE("greedy coverage equals exhaustive search") {
    FrameGen gen(99);
    for (int i = 0; i < 200; ++i) {
      const TabularFrame prev = gen.frame(12, 12);
      const TabularFrame next = gen.edit(prev, 12, 12);
      const ChangeSet c = diff(prev, next);
      const auto spec = select_subset(c, &prev, next, {});
      ChangeIndex index(c, &prev, next);
      REQUIRE(index.rows().size() <= 15);
      REQUIRE(spec.rows.size() == std::min(kGridRows, index.rows().size()));
      REQUIRE(spec.columns.size() <= kGridColumns);
      const std::size_t got = oracle_coverage(prev, next, spec.rows, spec.columns);
      CHECK(coverage(spec, index) == got);
      CHECK(got == exhaustive_best(prev, next, index.rows(), spec.columns));

      std::vector<std::string> affected;
      for (const auto& col : index.columns()) {
        for (RowId r : index.rows()) {
          if (cell_changed(prev, next, r, col)) {
            affected.push_back(col);
            break;
          }
        }
      }
      if (affected.size() <= kGridColumns) {
        for (const auto& col : affected) CHECK(std::count(spec.columns.begin(), spec.columns.end(), col) == 1);
      }
    }
  }
}
