#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "provcard/card.hpp"
#include "provcard/clock.hpp"
#include "provcard/insight.hpp"
#include "provcard/llm.hpp"
#include "provcard/pipeline.hpp"
#include "provcard/query.hpp"
#include "provcard/stats.hpp"
#include "provcard/version_store.hpp"

namespace provcard {

inline constexpr int kDefaultPollSeconds = 15;

/// SYNC_POLL_SECONDS when set to a positive integer, else 15.
int poll_seconds_from_env();

struct CardView {
  DataVersionCard card;
  std::size_t comment_count = 0;
  bool has_unread = false;  // for the requesting subscriber
  std::vector<Comment> comments;
};

struct IngestResult {
  std::size_t index = 0;
  bool created = false;  // false for an ignored duplicate
  std::uint64_t seq = 0;
};

/// Everything created after a cursor. Following next_cursor from 0 visits each
/// card and comment exactly once.
struct SyncDelta {
  std::vector<DataVersionCard> cards;
  std::vector<Comment> comments;
  std::map<std::string, bool> unread;  // per variable, for the subscriber
  std::vector<std::string> notifications;
  std::uint64_t next_cursor = 0;
  bool resync = false;  // the cursor was unknown and the delta starts from 0
};

struct QueryOutcome {
  std::vector<FilterCondition> conditions;
  QueryResult result;
  SnapGrid snapgrid;
};

std::string comment_notification(const std::string& variable);

/// The shared rendezvous between capture client and dashboard.
///
/// Ingestion of one variable is serialized by that variable's ingest mutex,
/// which is held while the card is assembled. Publication (seq assignment plus
/// the store append or comment write) happens under one short log lock, so a
/// poll never sees seq n+1 before seq n.
class SyncService {
 public:
  struct Options {
    Backend backend = Backend::deterministic;
    std::shared_ptr<llm::Gateway> gateway;  // null means disabled
    std::shared_ptr<Clock> clock;           // null means a LogicalClock
    int poll_seconds = kDefaultPollSeconds;
  };

  SyncService(std::filesystem::path root, Options options);

  IngestResult post_event(const IngestEvent& event);

  std::vector<std::string> variables() const;

  /// Cards in version order. With a subscriber, has_unread reflects the state
  /// before the call and the variable's comments are then marked read.
  std::vector<CardView> get_history(const std::string& variable,
                                    const std::optional<std::string>& subscriber = std::nullopt);

  ColumnStats column_stats(const std::string& variable, std::size_t version, const std::string& column) const;

  QueryOutcome query(const std::string& variable, std::size_t version, std::string_view text,
                     QueryBackend backend = QueryBackend::grammar) const;

  Comment add_comment(const std::string& variable, std::size_t version, Role author, std::string text);

  SyncDelta poll(const std::string& subscriber, std::uint64_t cursor) const;

  std::uint64_t head() const;
  int poll_seconds() const { return options_.poll_seconds; }
  const VersionStore& store() const { return store_; }

 private:
  void load_comments();
  void append_comment_log(const nlohmann::ordered_json& line);
  bool unread_for(const std::string& variable, const std::string& subscriber) const;

  Options options_;
  VersionStore store_;
  CodeInsight insight_;
  mutable std::shared_mutex log_mutex_;
  std::uint64_t head_ = 0;
  std::uint64_t next_comment_id_ = 1;
  std::vector<Comment> comments_;  // seq order
};

}  // namespace provcard
