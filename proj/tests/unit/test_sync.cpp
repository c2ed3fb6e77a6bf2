#include <map>
#include <random>
#include <set>
#include <thread>

#include "doctest.h"
#include "provcard/errors.hpp"
#include "provcard/json_io.hpp"
#include "provcard/sync.hpp"
#include "support.hpp"

using namespace provcard;
using namespace provcard::testing;

namespace {

IngestEvent event(const std::string& var, int step, int rows) {
  std::vector<RowId> ids;
  std::vector<std::vector<CellValue>> values;
  for (int r = 0; r < rows; ++r) {
    ids.push_back(r);
    values.push_back({num(r), num(step)});
  }
  IngestEvent e;
  e.variable = var;
  e.frame = TabularFrame::from_values({"id", "step"}, ids, values);
  e.provenance = {"cell-" + std::to_string(step), "df['step'] = " + std::to_string(step), step};
  return e;
}

SyncService::Options options() {
  SyncService::Options o;
  o.clock = std::make_shared<LogicalClock>();
  return o;
}

std::string state_of(SyncService& s) {
  // Everything a fresh subscriber would see, without marking anything read.
  nlohmann::ordered_json j;
  for (const auto& role : {"domain_expert", "data_scientist"}) {
    const SyncDelta d = s.poll(role, 0);
    for (const auto& c : d.cards) j[role]["cards"].push_back(json::to_json(c));
    for (const auto& c : d.comments) j[role]["comments"].push_back(json::to_json(c));
    for (const auto& [v, u] : d.unread) j[role]["unread"][v] = u;
    j[role]["head"] = d.next_cursor;
  }
  return j.dump();
}

}  // namespace

TEST_SUITE("sync") {
  TEST_CASE("ingest creates versions; duplicates are ignored; a new run of the same frame is kept") {
    TempDir dir;
    SyncService s(dir.path(), options());
    auto e0 = event("df", 1, 3);
    e0.provenance.code = "df = pd.read_csv('a.csv')";
    CHECK(s.post_event(e0).index == 0);
    const IngestResult dup = s.post_event(e0);
    CHECK_FALSE(dup.created);
    CHECK(dup.index == 0);
    auto again = e0;
    again.provenance.execution_count = 7;
    const IngestResult r = s.post_event(again);
    CHECK(r.created);
    CHECK(r.index == 1);
    CHECK(s.head() == 2);

    auto empty_code = event("df", 3, 3);
    empty_code.provenance.code = "  \n";
    CHECK_THROWS_AS(s.post_event(empty_code), ValidationError);
    auto bad_name = event("not-a-name", 1, 1);
    CHECK_THROWS_AS(s.post_event(bad_name), ValidationError);
  }

  TEST_CASE("first fetch shows unread comments, later fetches do not") {
    TempDir dir;
    SyncService s(dir.path(), options());
    s.post_event(event("df", 1, 2));
    s.add_comment("df", 0, Role::domain_expert, "Why was this loaded twice?");

    auto h = s.get_history("df", std::string("data_scientist"));
    REQUIRE(h.size() == 1);
    CHECK(h[0].comment_count == 1);
    CHECK(h[0].has_unread);
    CHECK_FALSE(s.get_history("df", std::string("data_scientist"))[0].has_unread);
    // The author has read their own comment.
    CHECK_FALSE(s.get_history("df", std::string("domain_expert"))[0].has_unread);

    CHECK_THROWS_AS(s.add_comment("df", 4, Role::domain_expert, "x"), UnknownVersion);
    CHECK_THROWS_AS(s.add_comment("zz", 0, Role::domain_expert, "x"), UnknownVariable);
    CHECK_THROWS_AS(s.add_comment("df", 0, Role::domain_expert, "   "), ValidationError);
    CHECK_THROWS_AS(s.poll("someone", 0), ValidationError);
  }

  TEST_CASE("notifications go to the other role") {
    TempDir dir;
    SyncService s(dir.path(), options());
    s.post_event(event("df", 1, 2));
    s.add_comment("df", 0, Role::domain_expert, "Looks odd");
    const SyncDelta ds = s.poll("data_scientist", 0);
    REQUIRE(ds.notifications.size() == 1);
    CHECK(ds.notifications[0] == "A new comment has been added for variable 'df'!");
    CHECK(s.poll("domain_expert", 0).notifications.empty());
  }

  TEST_CASE("a cursor past the head triggers a resync") {
    TempDir dir;
    SyncService s(dir.path(), options());
    s.post_event(event("df", 1, 2));
    const SyncDelta d = s.poll("domain_expert", 99);
    CHECK(d.resync);
    CHECK(d.cards.size() == 1);
    CHECK(d.next_cursor == 1);
  }

  TEST_CASE("100 interleaved events and comments with two subscribers") {
    TempDir dir;
    auto s = std::make_unique<SyncService>(dir.path(), options());
    std::mt19937 rng(31337);
    const std::vector<std::string> vars{"df", "X_train", "X_test"};
    const std::vector<std::string> subs{"domain_expert", "data_scientist"};
    std::map<std::string, int> versions;
    std::map<std::string, std::uint64_t> cursor{{"domain_expert", 0}, {"data_scientist", 0}};
    std::map<std::string, std::multiset<std::uint64_t>> seen;  // seqs delivered per subscriber
    // Comment ids each subscriber has not yet read, per variable.
    std::map<std::string, std::map<std::string, std::set<std::uint64_t>>> unread;
    std::uint64_t expected_head = 0;
    int step = 0;

    auto poll = [&](const std::string& sub) {
      const SyncDelta d = s->poll(sub, cursor[sub]);
      CHECK_FALSE(d.resync);
      for (const auto& c : d.cards) seen[sub].insert(c.seq);
      for (const auto& c : d.comments) seen[sub].insert(c.seq);
      for (const auto& v : vars) {
        if (!versions.count(v)) continue;
        CHECK(d.unread.at(v) == !unread[sub][v].empty());
      }
      CHECK(d.next_cursor == expected_head);
      cursor[sub] = d.next_cursor;
    };

    for (int op = 0; op < 100; ++op) {
      const int kind = std::uniform_int_distribution<int>(0, 9)(rng);
      const std::string& var = vars[std::uniform_int_distribution<std::size_t>(0, vars.size() - 1)(rng)];
      if (kind < 5 || !versions.count(var)) {
        ++step;
        s->post_event(event(var, step, 3 + step % 4));
        ++versions[var];
        ++expected_head;
      } else if (kind < 8) {
        const Role author = kind == 5 ? Role::domain_expert : Role::data_scientist;
        const int version = std::uniform_int_distribution<int>(0, versions[var] - 1)(rng);
        const Comment c = s->add_comment(var, static_cast<std::size_t>(version), author, "note " + std::to_string(op));
        ++expected_head;
        CHECK(c.seq == expected_head);
        for (const auto& sub : subs) {
          if (sub != to_string(author)) unread[sub][var].insert(c.seq);
        }
      } else {
        const std::string& sub = subs[static_cast<std::size_t>(kind - 8)];
        s->get_history(var, sub);
        unread[sub][var].clear();
      }
      if (op % 7 == 3) poll("domain_expert");
      if (op % 11 == 5) poll("data_scientist");
    }
    poll("domain_expert");
    poll("data_scientist");

    for (const auto& sub : subs) {
      // Exactly once: every seq 1..head delivered a single time along the cursor chain.
      CHECK(seen[sub].size() == expected_head);
      std::uint64_t want = 1;
      for (std::uint64_t seq : seen[sub]) CHECK(seq == want++);
    }

    // Reopening the store yields the same state a live subscriber sees.
    const std::string live = state_of(*s);
    s.reset();
    SyncService reopened(dir.path(), options());
    CHECK(reopened.head() == expected_head);
    CHECK(state_of(reopened) == live);
  }

  TEST_CASE("concurrent writers keep seqs gap-free and per-variable order intact") {
    TempDir dir;
    SyncService s(dir.path(), options());
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&s, t] {
        const std::string var = t % 2 == 0 ? "df" : "X_train";
        for (int i = 0; i < 10; ++i) {
          s.post_event(event(var, t * 100 + i + 1, 3));
          if (i % 3 == 0 && s.store().version_count(var) > 0) {
            s.add_comment(var, 0, t < 2 ? Role::domain_expert : Role::data_scientist, "c");
          }
          s.poll("domain_expert", 0);
        }
      });
    }
    for (auto& th : threads) th.join();
    const SyncDelta d = s.poll("data_scientist", 0);
    std::vector<std::uint64_t> seqs;
    for (const auto& c : d.cards) seqs.push_back(c.seq);
    for (const auto& c : d.comments) seqs.push_back(c.seq);
    std::sort(seqs.begin(), seqs.end());
    REQUIRE(seqs.size() == s.head());
    for (std::size_t i = 0; i < seqs.size(); ++i) CHECK(seqs[i] == i + 1);
    CHECK(s.store().version_count("df") == 20);
    CHECK(s.store().version_count("X_train") == 20);
    for (const auto& v : {"df", "X_train"}) {
      const auto cards = s.store().cards(v);
      for (std::size_t i = 1; i < cards.size(); ++i) CHECK(cards[i - 1].seq < cards[i].seq);
    }
  }

  TEST_CASE("poll interval comes from SYNC_POLL_SECONDS") {
    ::setenv("SYNC_POLL_SECONDS", "3", 1);
    CHECK(poll_seconds_from_env() == 3);
    ::setenv("SYNC_POLL_SECONDS", "zero", 1);
    CHECK(poll_seconds_from_env() == 15);
    ::unsetenv("SYNC_POLL_SECONDS");
    CHECK(poll_seconds_from_env() == 15);
  }
}
