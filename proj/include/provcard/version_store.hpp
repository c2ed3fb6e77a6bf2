#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "provcard/card.hpp"
#include "provcard/diff.hpp"
#include "provcard/frame.hpp"
#include "provcard/stats.hpp"

namespace provcard {

struct DatasetVersion {
  std::string variable;
  std::size_t index = 0;
  std::shared_ptr<const TabularFrame> frame;
  CellExecution provenance;
  Timestamp created_at = 0;
};

/// File-backed store of immutable versions. Layout under the root:
///
///   variables/<name>/v<i>.csv    snapshot with a leading __row_id column
///   variables/<name>/v<i>.meta   JSON: provenance, dtypes, ChangeSet, card
///
/// Files are written to a temporary name and renamed into place. Readers take
/// a shared lock; writes to one variable are serialized by its ingest mutex,
/// which callers hold across a whole read-latest/append cycle.
class VersionStore {
 public:
  /// Loads every version already on disk. Throws StorageError on unreadable
  /// or gapped version files.
  explicit VersionStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Serializes writers of one variable; readers never take it.
  std::mutex& ingest_mutex(const std::string& variable);

  std::vector<std::string> variables() const;  // in order of first version
  bool has_variable(const std::string& variable) const;
  std::size_t version_count(const std::string& variable) const;  // 0 for unknown

  std::optional<DatasetVersion> latest(const std::string& variable) const;
  DatasetVersion version(const std::string& variable, std::size_t index) const;
  std::vector<DataVersionCard> cards(const std::string& variable) const;
  DataVersionCard card(const std::string& variable, std::size_t index) const;
  ChangeSet changes(const std::string& variable, std::size_t index) const;

  /// Appends version `card.index`, which must equal version_count(). The
  /// in-memory view changes only after both files are on disk.
  void append(const DatasetVersion& version, const ChangeSet& changes, const DataVersionCard& card);

  /// Stats for one column; throws UnknownVariable, UnknownVersion or UnknownColumn.
  ColumnStats column_stats(const std::string& variable, std::size_t index, const std::string& column) const;

  /// Largest card seq on disk, 0 when empty.
  std::uint64_t max_seq() const;

  static void validate_variable_name(const std::string& variable);

 private:
  struct Entry {
    DatasetVersion version;
    std::shared_ptr<const ChangeSet> changes;
    DataVersionCard card;
  };
  struct Stream {
    std::vector<Entry> entries;
  };

  void load();
  const Stream& stream(const std::string& variable) const;  // throws UnknownVariable
  std::filesystem::path variable_dir(const std::string& variable) const;

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Stream> streams_;
  std::vector<std::string> order_;
  std::mutex ingest_map_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> ingest_;
};

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace provcard
