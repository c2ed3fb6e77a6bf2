#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace provcard {

enum class VocabKind { estimator, metric, keras_metric, preprocessor, loader, splitter, encoder };

std::string_view to_string(VocabKind kind);

struct VocabularyEntry {
  VocabKind kind;
  std::string token;    // matched against the last dotted segment of a call
  std::string display;  // human-readable name used in cards
};

/// Table of recognized library names. The text form is one entry per line,
/// `kind<TAB>token<TAB>display`; '#' starts a comment line.
class Vocabulary {
 public:
  /// Throws ParseError naming the offending line.
  static Vocabulary parse(std::string_view text);
  static Vocabulary load(const std::filesystem::path& path);
  /// The table compiled into the library from data/vocabulary.tsv.
  static const Vocabulary& builtin();

  const VocabularyEntry* lookup(VocabKind kind, std::string_view token) const;
  bool contains(VocabKind kind, std::string_view token) const { return lookup(kind, token) != nullptr; }
  std::vector<const VocabularyEntry*> entries(VocabKind kind) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<VocabularyEntry> entries_;
};

std::string_view default_vocabulary_text();

}  // namespace provcard
