#include "provcard/version_store.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "provcard/csv.hpp"
#include "provcard/errors.hpp"
#include "provcard/json_io.hpp"

namespace provcard {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw StorageError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StorageError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

void VersionStore::validate_variable_name(const std::string& variable) {
  if (variable.empty()) throw ValidationError("variable name must not be empty");
  const bool ok_start = std::isalpha(static_cast<unsigned char>(variable[0])) || variable[0] == '_';
  const bool ok_rest = std::all_of(variable.begin(), variable.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
  if (!ok_start || !ok_rest) {
    throw ValidationError("variable name '" + variable + "' is not a Python identifier");
  }
}

VersionStore::VersionStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "variables", ec);
  if (ec) throw StorageError("cannot create store at '" + root_.string() + "': " + ec.message());
  load();
}

fs::path VersionStore::variable_dir(const std::string& variable) const {
  return root_ / "variables" / variable;
}

void VersionStore::load() {
  std::vector<std::pair<std::uint64_t, std::string>> firsts;
  for (const auto& dir : fs::directory_iterator(root_ / "variables")) {
    if (!dir.is_directory()) continue;
    const std::string variable = dir.path().filename().string();
    Stream stream;
    for (std::size_t i = 0;; ++i) {
      const fs::path meta_path = dir.path() / ("v" + std::to_string(i) + ".meta");
      const fs::path csv_path = dir.path() / ("v" + std::to_string(i) + ".csv");
      if (!fs::exists(meta_path)) break;
      try {
        const auto meta = json::Json::parse(read_file(meta_path));
        std::vector<DType> dtypes;
        for (const auto& d : meta.at("dtypes")) dtypes.push_back(parse_dtype(d.get<std::string>()));
        auto frame = std::make_shared<const TabularFrame>(parse_snapshot_csv(read_file(csv_path), &dtypes));
        Entry entry;
        entry.version = {variable, i, frame, json::cell_execution_from_json(meta.at("provenance")),
                         meta.at("created_at").get<Timestamp>()};
        entry.changes = std::make_shared<const ChangeSet>(json::changeset_from_json(meta.at("changes")));
        entry.card = json::card_from_json(meta.at("card"));
        stream.entries.push_back(std::move(entry));
      } catch (const Error& e) {
        throw StorageError("version " + std::to_string(i) + " of '" + variable + "': " + e.what());
      } catch (const nlohmann::json::exception& e) {
        throw StorageError("version " + std::to_string(i) + " of '" + variable + "': " + e.what());
      }
    }
    if (stream.entries.empty()) continue;
    firsts.emplace_back(stream.entries.front().card.seq, variable);
    streams_.emplace(variable, std::move(stream));
  }
  std::sort(firsts.begin(), firsts.end());
  for (const auto& [seq, name] : firsts) order_.push_back(name);
}

std::mutex& VersionStore::ingest_mutex(const std::string& variable) {
  std::lock_guard lock(ingest_map_mutex_);
  auto& slot = ingest_[variable];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::vector<std::string> VersionStore::variables() const {
  std::shared_lock lock(mutex_);
  return order_;
}

bool VersionStore::has_variable(const std::string& variable) const {
  std::shared_lock lock(mutex_);
  return streams_.count(variable) > 0;
}

std::size_t VersionStore::version_count(const std::string& variable) const {
  std::shared_lock lock(mutex_);
  auto it = streams_.find(variable);
  return it == streams_.end() ? 0 : it->second.entries.size();
}

const VersionStore::Stream& VersionStore::stream(const std::string& variable) const {
  auto it = streams_.find(variable);
  if (it == streams_.end()) throw UnknownVariable(variable);
  return it->second;
}

std::optional<DatasetVersion> VersionStore::latest(const std::string& variable) const {
  std::shared_lock lock(mutex_);
  auto it = streams_.find(variable);
  if (it == streams_.end() || it->second.entries.empty()) return std::nullopt;
  return it->second.entries.back().version;
}

DatasetVersion VersionStore::version(const std::string& variable, std::size_t index) const {
  std::shared_lock lock(mutex_);
  const auto& s = stream(variable);
  if (index >= s.entries.size()) {
    throw UnknownVersion("variable '" + variable + "' has no version " + std::to_string(index));
  }
  return s.entries[index].version;
}

std::vector<DataVersionCard> VersionStore::cards(const std::string& variable) const {
  std::shared_lock lock(mutex_);
  std::vector<DataVersionCard> out;
  for (const auto& e : stream(variable).entries) out.push_back(e.card);
  return out;
}

DataVersionCard VersionStore::card(const std::string& variable, std::size_t index) const {
  std::shared_lock lock(mutex_);
  const auto& s = stream(variable);
  if (index >= s.entries.size()) {
    throw UnknownVersion("variable '" + variable + "' has no version " + std::to_string(index));
  }
  return s.entries[index].card;
}

ChangeSet VersionStore::changes(const std::string& variable, std::size_t index) const {
  std::shared_lock lock(mutex_);
  const auto& s = stream(variable);
  if (index >= s.entries.size()) {
    throw UnknownVersion("variable '" + variable + "' has no version " + std::to_string(index));
  }
  return *s.entries[index].changes;
}

void VersionStore::append(const DatasetVersion& version, const ChangeSet& changes,
                          const DataVersionCard& card) {
  validate_variable_name(version.variable);
  if (version.index != version_count(version.variable) || card.index != version.index) {
    throw StorageError("version " + std::to_string(version.index) + " of '" + version.variable +
                       "' is out of sequence");
  }
  const fs::path dir = variable_dir(version.variable);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StorageError("cannot create '" + dir.string() + "': " + ec.message());

  json::Json meta;
  meta["variable"] = version.variable;
  meta["index"] = version.index;
  meta["created_at"] = version.created_at;
  meta["provenance"] = json::to_json(version.provenance);
  meta["dtypes"] = json::Json::array();
  for (const auto& c : version.frame->columns()) meta["dtypes"].push_back(to_string(c.dtype));
  meta["changes"] = json::to_json(changes);
  meta["card"] = json::to_json(card);

  const std::string stem = "v" + std::to_string(version.index);
  write_file_atomic(dir / (stem + ".csv"), write_snapshot_csv(*version.frame));
  // The .meta file marks the version as complete, so it goes last.
  write_file_atomic(dir / (stem + ".meta"), meta.dump(1));

  std::unique_lock lock(mutex_);
  auto& s = streams_[version.variable];
  if (s.entries.empty()) order_.push_back(version.variable);
  s.entries.push_back({version, std::make_shared<const ChangeSet>(changes), card});
}

ColumnStats VersionStore::column_stats(const std::string& variable, std::size_t index,
                                       const std::string& column) const {
  const auto v = version(variable, index);
  return compute_column_stats(*v.frame, column);
}

std::uint64_t VersionStore::max_seq() const {
  std::shared_lock lock(mutex_);
  std::uint64_t seq = 0;
  for (const auto& [name, s] : streams_) {
    for (const auto& e : s.entries) seq = std::max(seq, e.card.seq);
  }
  return seq;
}

}  // namespace provcard
