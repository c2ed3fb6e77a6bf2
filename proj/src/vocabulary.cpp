#include "provcard/vocabulary.hpp"

#include <fstream>
#include <sstream>

#include "provcard/errors.hpp"

namespace provcard {

namespace {

constexpr VocabKind kAllKinds[] = {VocabKind::estimator, VocabKind::metric,
                                   VocabKind::keras_metric, VocabKind::preprocessor,
                                   VocabKind::loader, VocabKind::splitter, VocabKind::encoder};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(VocabKind kind) {
  switch (kind) {
    case VocabKind::estimator: return "estimator";
    case VocabKind::metric: return "metric";
    case VocabKind::keras_metric: return "keras_metric";
    case VocabKind::preprocessor: return "preprocessor";
    case VocabKind::loader: return "loader";
    case VocabKind::splitter: return "splitter";
    case VocabKind::encoder: return "encoder";
  }
  return "estimator";
}

Vocabulary Vocabulary::parse(std::string_view text) {
  Vocabulary vocab;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string_view::npos; start = tab + 1) {
      fields.push_back(trim(line.substr(start, tab - start)));
    }
    fields.push_back(trim(line.substr(start)));
    if (fields.size() != 3 || fields[1].empty() || fields[2].empty()) {
      throw ParseError("vocabulary line " + std::to_string(line_no) +
                       ": expected kind<TAB>token<TAB>display");
    }
    bool known = false;
    for (auto kind : kAllKinds) {
      if (to_string(kind) == fields[0]) {
        vocab.entries_.push_back({kind, std::string(fields[1]), std::string(fields[2])});
        known = true;
      }
    }
    if (!known) {
      throw ParseError("vocabulary line " + std::to_string(line_no) + ": unknown kind '" +
                       std::string(fields[0]) + "'");
    }
  }
  return vocab;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open vocabulary '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const Vocabulary& Vocabulary::builtin() {
  static const Vocabulary vocab = parse(default_vocabulary_text());
  return vocab;
}

const VocabularyEntry* Vocabulary::lookup(VocabKind kind, std::string_view token) const {
  for (const auto& e : entries_) {
    if (e.kind == kind && e.token == token) return &e;
  }
  return nullptr;
}

std::vector<const VocabularyEntry*> Vocabulary::entries(VocabKind kind) const {
  std::vector<const VocabularyEntry*> out;
  for (const auto& e : entries_) {
    if (e.kind == kind) out.push_back(&e);
  }
  return out;
}

}  // namespace provcard
