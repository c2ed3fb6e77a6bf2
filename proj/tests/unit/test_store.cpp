#include "doctest.h"
#include "provcard/csv.hpp"
#include "provcard/errors.hpp"
#include "provcard/json_io.hpp"
#include "provcard/version_store.hpp"
#include "support.hpp"

using namespace provcard;
using namespace provcard::testing;

namespace {

DatasetVersion version_of(const std::string& var, std::size_t index, TabularFrame f) {
  return {var, index, std::make_shared<const TabularFrame>(std::move(f)), {"c" + std::to_string(index), "x = 1", 1},
          1000 + static_cast<Timestamp>(index)};
}

DataVersionCard card_of(const std::string& var, std::size_t index, std::uint64_t seq) {
  DataVersionCard c;
  c.variable = var;
  c.index = index;
  c.seq = seq;
  c.summary = "v" + std::to_string(index);
  return c;
}

}  // namespace

TEST_SUITE("store") {
  TEST_CASE("append, read back and reload from disk") {
    TempDir dir;
    const auto f0 = TabularFrame::from_values({"a", "b"}, {0, 1}, {{num(1), txt("x")}, {na(), txt("")}});
    const auto f1 = TabularFrame::from_values({"a"}, {0, 1}, {{num(1)}, {num(2)}});
    {
      VersionStore store(dir.path());
      CHECK(store.version_count("df") == 0);
      store.append(version_of("df", 0, f0), diff(nullptr, f0), card_of("df", 0, 1));
      store.append(version_of("df", 1, f1), diff(f0, f1), card_of("df", 1, 2));
      store.append(version_of("X_train", 0, f1), diff(nullptr, f1), card_of("X_train", 0, 3));
      CHECK(store.version_count("df") == 2);
      CHECK(*store.latest("df")->frame == f1);
    }
    CHECK(std::filesystem::exists(dir.path() / "variables/df/v0.csv"));
    CHECK(std::filesystem::exists(dir.path() / "variables/df/v1.meta"));

    VersionStore reloaded(dir.path());
    CHECK(reloaded.variables() == std::vector<std::string>{"df", "X_train"});
    CHECK(*reloaded.version("df", 0).frame == f0);
    CHECK(reloaded.version("df", 0).frame->columns()[1].dtype == f0.columns()[1].dtype);
    CHECK(reloaded.changes("df", 1) == diff(f0, f1));
    CHECK(reloaded.card("df", 1).summary == "v1");
    CHECK(reloaded.version("df", 1).provenance.cell_id == "c1");
    CHECK(reloaded.max_seq() == 3);
  }

  TEST_CASE("index gaps and bad names are rejected") {
    TempDir dir;
    VersionStore store(dir.path());
    const auto f = TabularFrame::from_values({"a"}, {0}, {{num(1)}});
    CHECK_THROWS_AS(store.append(version_of("df", 1, f), diff(nullptr, f), card_of("df", 1, 1)), StorageError);
    CHECK_THROWS_AS(VersionStore::validate_variable_name("../etc"), ValidationError);
    CHECK_THROWS_AS(VersionStore::validate_variable_name("1abc"), ValidationError);
    VersionStore::validate_variable_name("_X_train2");
  }

  TEST_CASE("lookups of unknown things") {
    TempDir dir;
    VersionStore store(dir.path());
    const auto f = TabularFrame::from_values({"Score"}, {0}, {{num(1)}});
    store.append(version_of("df", 0, f), diff(nullptr, f), card_of("df", 0, 1));
    CHECK_THROWS_AS(store.version("nope", 0), UnknownVariable);
    CHECK_THROWS_AS(store.version("df", 5), UnknownVersion);
    CHECK_THROWS_AS(store.column_stats("df", 0, "score"), UnknownColumn);
    CHECK(store.column_stats("df", 0, "Score").row_count == 1);
  }

  TEST_CASE("a half-written version is not loaded") {
    TempDir dir;
    {
      VersionStore store(dir.path());
      const auto f = TabularFrame::from_values({"a"}, {0}, {{num(1)}});
      store.append(version_of("df", 0, f), diff(nullptr, f), card_of("df", 0, 1));
    }
    // A snapshot without its metadata file is what a crash between the two renames leaves.
    write_file_atomic(dir.path() / "variables/df/v1.csv", "__row_id,a\n0,2\n");
    VersionStore store(dir.path());
    CHECK(store.version_count("df") == 1);
  }

  TEST_CASE("corrupt metadata is a storage error") {
    TempDir dir;
    {
      VersionStore store(dir.path());
      const auto f = TabularFrame::from_values({"a"}, {0}, {{num(1)}});
      store.append(version_of("df", 0, f), diff(nullptr, f), card_of("df", 0, 1));
    }
    write_file_atomic(dir.path() / "variables/df/v0.meta", "{not json");
    CHECK_THROWS_AS(VersionStore{dir.path()}, StorageError);
  }
}
