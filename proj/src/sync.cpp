#include "provcard/sync.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>

#include "provcard/errors.hpp"
#include "provcard/json_io.hpp"
#include "provcard/snapgrid.hpp"

namespace provcard {

namespace {

constexpr const char* kCommentLog = "comments.jsonl";

void check_subscriber(const std::string& subscriber) { parse_role(subscriber); }

}  // namespace

int poll_seconds_from_env() {
  if (const char* v = std::getenv("SYNC_POLL_SECONDS")) {
    const int seconds = std::atoi(v);
    if (seconds > 0) return seconds;
  }
  return kDefaultPollSeconds;
}

std::string comment_notification(const std::string& variable) {
  return "A new comment has been added for variable '" + variable + "'!";
}

SyncService::SyncService(std::filesystem::path root, Options options)
    : options_(std::move(options)),
      store_(std::move(root)),
      insight_(options_.backend, options_.gateway) {
  if (!options_.clock) options_.clock = std::make_shared<LogicalClock>();
  head_ = store_.max_seq();
  load_comments();
}

void SyncService::load_comments() {
  std::ifstream in(store_.root() / kCommentLog);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = json::Json::parse(line);
      if (j.contains("read")) {
        const auto id = j.at("read").get<std::uint64_t>();
        for (auto& c : comments_) {
          if (c.id == id) c.read_by.insert(j.at("by").get<std::string>());
        }
        continue;
      }
      Comment c = json::comment_from_json(j);
      head_ = std::max(head_, c.seq);
      next_comment_id_ = std::max(next_comment_id_, c.id + 1);
      comments_.push_back(std::move(c));
    } catch (const std::exception& e) {
      throw StorageError("comment log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::sort(comments_.begin(), comments_.end(), [](const Comment& a, const Comment& b) { return a.seq < b.seq; });
}

void SyncService::append_comment_log(const nlohmann::ordered_json& line) {
  std::ofstream out(store_.root() / kCommentLog, std::ios::app | std::ios::binary);
  if (!out) throw StorageError("cannot append to the comment log");
  out << line.dump() << '\n';
  out.flush();
  if (!out) throw StorageError("write to the comment log failed");
}

IngestResult SyncService::post_event(const IngestEvent& event) {
  VersionStore::validate_variable_name(event.variable);
  std::lock_guard ingest(store_.ingest_mutex(event.variable));

  const auto latest = store_.latest(event.variable);
  if (latest && latest->provenance.cell_id == event.provenance.cell_id &&
      latest->provenance.execution_count == event.provenance.execution_count && *latest->frame == event.frame) {
    return {latest->index, false, store_.card(event.variable, latest->index).seq};
  }
  if (latest && event.provenance.code.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ValidationError("a non-initial version needs the cell code");
  }

  const TabularFrame* prev = latest ? latest->frame.get() : nullptr;
  const std::size_t index = latest ? latest->index + 1 : 0;
  const ChangeSet changes = diff(prev, event.frame);
  DataVersionCard card = assemble_card(event, prev, changes, index, insight_);

  std::unique_lock log(log_mutex_);
  card.seq = head_ + 1;
  card.created_at = options_.clock->now();
  DatasetVersion version{event.variable, index, std::make_shared<const TabularFrame>(event.frame),
                         event.provenance, card.created_at};
  store_.append(version, changes, card);
  head_ = card.seq;
  return {index, true, card.seq};
}

std::vector<std::string> SyncService::variables() const { return store_.variables(); }

bool SyncService::unread_for(const std::string& variable, const std::string& subscriber) const {
  return std::any_of(comments_.begin(), comments_.end(), [&](const Comment& c) {
    return c.variable == variable && !c.read_by.count(subscriber);
  });
}

std::vector<CardView> SyncService::get_history(const std::string& variable,
                                               const std::optional<std::string>& subscriber) {
  if (subscriber) check_subscriber(*subscriber);
  std::vector<CardView> views;
  for (auto& card : store_.cards(variable)) views.push_back({std::move(card), 0, false, {}});

  std::unique_lock log(log_mutex_);
  for (auto& c : comments_) {
    if (c.variable != variable || c.version >= views.size()) continue;
    auto& view = views[c.version];
    ++view.comment_count;
    if (subscriber && !c.read_by.count(*subscriber)) view.has_unread = true;
    view.comments.push_back(c);
  }
  if (subscriber) {
    for (auto& c : comments_) {
      if (c.variable == variable && c.read_by.insert(*subscriber).second) {
        append_comment_log({{"read", c.id}, {"by", *subscriber}});
      }
    }
  }
  return views;
}

ColumnStats SyncService::column_stats(const std::string& variable, std::size_t version,
                                      const std::string& column) const {
  return store_.column_stats(variable, version, column);
}

QueryOutcome SyncService::query(const std::string& variable, std::size_t version, std::string_view text,
                                QueryBackend backend) const {
  const DatasetVersion v = store_.version(variable, version);
  const QuerySchema schema = QuerySchema::from_frame(*v.frame);
  QueryOutcome out;
  out.conditions = parse_query(text, schema, backend, options_.gateway.get());
  out.result = apply_filters(*v.frame, out.conditions);

  QueryFocus focus;
  focus.rows = out.result.rows;
  for (const auto& c : out.conditions) {
    if (std::find(focus.columns.begin(), focus.columns.end(), c.column) == focus.columns.end()) {
      focus.columns.push_back(c.column);
    }
  }
  focus.cells = out.result.cells;

  std::optional<DatasetVersion> prev;
  if (version > 0) prev = store_.version(variable, version - 1);
  const TabularFrame* prev_frame = prev ? prev->frame.get() : nullptr;
  const ChangeSet changes = store_.changes(variable, version);
  const SnapGridSpec spec =
      select_subset(changes, prev_frame, *v.frame, store_.card(variable, version).relationships, &focus);
  out.snapgrid = render_snapgrid(spec, changes, prev_frame, *v.frame, &focus.cells);
  return out;
}

Comment SyncService::add_comment(const std::string& variable, std::size_t version, Role author,
                                 std::string text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ValidationError("comment text must not be empty");
  }
  if (version >= store_.version_count(variable)) {
    if (!store_.has_variable(variable)) throw UnknownVariable(variable);
    throw UnknownVersion("variable '" + variable + "' has no card " + std::to_string(version));
  }
  std::unique_lock log(log_mutex_);
  Comment c;
  c.id = next_comment_id_;
  c.seq = head_ + 1;
  c.variable = variable;
  c.version = version;
  c.author = author;
  c.text = std::move(text);
  c.created_at = options_.clock->now();
  c.read_by.insert(std::string(to_string(author)));
  append_comment_log(json::to_json(c));
  ++next_comment_id_;
  head_ = c.seq;
  comments_.push_back(c);
  return c;
}

SyncDelta SyncService::poll(const std::string& subscriber, std::uint64_t cursor) const {
  check_subscriber(subscriber);
  std::shared_lock log(log_mutex_);
  SyncDelta delta;
  if (cursor > head_) {
    delta.resync = true;
    cursor = 0;
  }
  for (const auto& variable : store_.variables()) {
    for (auto& card : store_.cards(variable)) {
      if (card.seq > cursor && card.seq <= head_) delta.cards.push_back(std::move(card));
    }
    delta.unread[variable] = unread_for(variable, subscriber);
  }
  std::sort(delta.cards.begin(), delta.cards.end(),
            [](const DataVersionCard& a, const DataVersionCard& b) { return a.seq < b.seq; });
  for (const auto& c : comments_) {
    if (c.seq <= cursor) continue;
    delta.comments.push_back(c);
    if (to_string(c.author) != subscriber) delta.notifications.push_back(comment_notification(c.variable));
  }
  delta.next_cursor = head_;
  return delta;
}

std::uint64_t SyncService::head() const {
  std::shared_lock log(log_mutex_);
  return head_;
}

}  // namespace provcard
