#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Surface-level reading of Python cell source: tokens, logical statements,
// assignment targets and call sites. No evaluation and no real grammar; the
// analyzers only need names, literals and call shapes.
namespace provcard::pycode {

struct Token {
  enum class Kind { name, number, string, op, comment };
  Kind kind;
  std::string text;   // decoded value for strings, text after '#' for comments
  std::size_t begin;  // byte offsets into the source
  std::size_t end;
};

/// Never throws; unterminated strings run to the end of input.
std::vector<Token> tokenize(std::string_view source);

struct Argument {
  std::string keyword;                // empty for positional arguments
  std::string text;                   // source text of the value
  std::optional<std::string> name;    // set when the value is a single (dotted) name
  std::vector<std::string> strings;   // string literals inside the value
};

struct Call {
  std::string callee;     // dotted name before '(' e.g. "pd.read_csv", "fit"
  std::string method;     // last segment of callee
  std::string receiver;   // dotted name before the method, when it is a plain name
  int receiver_call = -1; // index of the call a chained method is invoked on
  std::vector<Argument> args;

  std::vector<const Argument*> positional() const;
  const Argument* keyword(std::string_view name) const;
};

struct Statement {
  std::string text;
  std::vector<std::string> comments;          // comment lines just before it
  std::vector<std::string> targets;           // plain names assigned, in order
  std::vector<std::string> subscript_targets; // string keys of x["key"] = ...
  std::vector<Call> calls;                    // every call site, by '(' position
  std::vector<std::string> strings;           // string literals on the value side
  std::vector<std::string> subscript_keys;    // string keys of x["key"] on the value side
  std::vector<std::string> names;             // name tokens on the value side
};

std::vector<Statement> parse_statements(std::string_view source);

}  // namespace provcard::pycode
