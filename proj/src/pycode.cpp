#include "provcard/pycode.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace provcard::pycode {

namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) { return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

// Longest operators first so that "**=" wins over "**" and "*".
constexpr std::array<std::string_view, 22> kMultiOps = {
    "**=", "//=", ">>=", "<<=", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=",  "%=",  "&=",  "|=",  "^=", "->", ":=", "**", "//", "<<", ">>"};

std::string decode_string(std::string_view body, bool raw) {
  if (raw) return std::string(body);
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '\\' || i + 1 == body.size()) {
      out += body[i];
      continue;
    }
    const char e = body[++i];
    switch (e) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case '\\': out += '\\'; break;
      case '\'': out += '\''; break;
      case '"': out += '"'; break;
      case '\n': break;
      default:
        out += '\\';
        out += e;
    }
  }
  return out;
}

bool is_op(const Token& t, std::string_view text) {
  return t.kind == Token::Kind::op && t.text == text;
}

bool opens(const Token& t) { return is_op(t, "(") || is_op(t, "[") || is_op(t, "{"); }
bool closes(const Token& t) { return is_op(t, ")") || is_op(t, "]") || is_op(t, "}"); }

bool is_assignment_op(const Token& t) {
  static constexpr std::array<std::string_view, 13> ops = {
      "=", "+=", "-=", "*=", "/=", "//=", "%=", "**=", "&=", "|=", "^=", ">>=", "<<="};
  if (t.kind != Token::Kind::op) return false;
  return std::find(ops.begin(), ops.end(), t.text) != ops.end();
}

// Index of the bracket matching the opener at `open`, or tokens.size().
std::size_t matching(const std::vector<Token>& toks, std::size_t open, std::size_t limit) {
  int depth = 0;
  for (std::size_t i = open; i < limit; ++i) {
    if (opens(toks[i])) ++depth;
    if (closes(toks[i]) && --depth == 0) return i;
  }
  return limit;
}

class StatementBuilder {
 public:
  StatementBuilder(std::string_view source, const std::vector<Token>& toks, std::size_t begin,
                   std::size_t end)
      : src_(source), toks_(toks), begin_(begin), end_(end) {}

  Statement build(std::vector<std::string> comments) {
    Statement st;
    st.comments = std::move(comments);
    st.text = std::string(src_.substr(toks_[begin_].begin, toks_[end_ - 1].end - toks_[begin_].begin));

    // The value side starts after the last top-level assignment operator.
    std::size_t value_begin = begin_;
    int depth = 0;
    std::vector<std::size_t> splits;
    for (std::size_t i = begin_; i < end_; ++i) {
      if (opens(toks_[i])) ++depth;
      if (closes(toks_[i])) --depth;
      if (depth == 0 && is_assignment_op(toks_[i])) splits.push_back(i);
    }
    if (!splits.empty()) {
      std::size_t lhs_begin = begin_;
      for (auto split : splits) {
        scan_targets(lhs_begin, split, st);
        lhs_begin = split + 1;
      }
      value_begin = splits.back() + 1;
    }

    for (std::size_t i = value_begin; i < end_; ++i) {
      const Token& t = toks_[i];
      if (t.kind == Token::Kind::string) st.strings.push_back(t.text);
      if (t.kind == Token::Kind::name && !(i > value_begin && is_op(toks_[i - 1], "."))) {
        st.names.push_back(t.text);
      }
      if (is_op(t, "[") && i > value_begin && !is_op(toks_[i - 1], "(") &&
          (toks_[i - 1].kind == Token::Kind::name || closes(toks_[i - 1]))) {
        const std::size_t close = matching(toks_, i, end_);
        for (std::size_t j = i + 1; j < close; ++j) {
          if (toks_[j].kind == Token::Kind::string) st.subscript_keys.push_back(toks_[j].text);
        }
      }
    }
    collect_calls(begin_, end_, st);
    return st;
  }

 private:
  void scan_targets(std::size_t b, std::size_t e, Statement& st) {
    for (std::size_t i = b; i < e; ++i) {
      const Token& t = toks_[i];
      if (t.kind != Token::Kind::name) continue;
      if (i > b && is_op(toks_[i - 1], ".")) continue;
      if (i + 1 < e && is_op(toks_[i + 1], "[")) {
        const std::size_t close = matching(toks_, i + 1, e);
        for (std::size_t j = i + 2; j < close; ++j) {
          if (toks_[j].kind == Token::Kind::string) st.subscript_targets.push_back(toks_[j].text);
        }
        i = close;
        continue;
      }
      if (i + 1 < e && (is_op(toks_[i + 1], ".") || is_op(toks_[i + 1], "("))) continue;
      st.targets.push_back(t.text);
    }
  }

  // Dotted name ending at token `last` (inclusive); returns its first index.
  std::size_t dotted_start(std::size_t last) const {
    std::size_t first = last;
    while (first >= begin_ + 2 && is_op(toks_[first - 1], ".") &&
           toks_[first - 2].kind == Token::Kind::name) {
      first -= 2;
    }
    return first;
  }

  std::string join_names(std::size_t first, std::size_t last) const {
    std::string out;
    for (std::size_t i = first; i <= last; ++i) out += toks_[i].text;
    return out;
  }

  Argument make_argument(std::size_t b, std::size_t e) const {
    Argument arg;
    if (e - b >= 2 && toks_[b].kind == Token::Kind::name && is_op(toks_[b + 1], "=")) {
      arg.keyword = toks_[b].text;
      b += 2;
    }
    if (b >= e) return arg;
    arg.text = std::string(src_.substr(toks_[b].begin, toks_[e - 1].end - toks_[b].begin));
    bool dotted = toks_[b].kind == Token::Kind::name;
    for (std::size_t i = b; i < e && dotted; ++i) {
      const bool even = (i - b) % 2 == 0;
      dotted = even ? toks_[i].kind == Token::Kind::name : is_op(toks_[i], ".");
    }
    if (dotted && (e - b) % 2 == 1) arg.name = join_names(b, e - 1);
    for (std::size_t i = b; i < e; ++i) {
      if (toks_[i].kind == Token::Kind::string) arg.strings.push_back(toks_[i].text);
    }
    return arg;
  }

  void collect_calls(std::size_t b, std::size_t e, Statement& st) {
    // close-paren token index -> call index, for chained method calls
    std::vector<std::pair<std::size_t, int>> closers;
    for (std::size_t i = b; i < e; ++i) {
      if (!is_op(toks_[i], "(") || i == b || toks_[i - 1].kind != Token::Kind::name) continue;
      const std::size_t last = i - 1;
      const std::size_t first = dotted_start(last);
      Call call;
      call.callee = join_names(first, last);
      call.method = toks_[last].text;
      if (first < last) call.receiver = join_names(first, last - 2);
      if (first == last && first >= b + 2 && is_op(toks_[first - 1], ".") && closes(toks_[first - 2])) {
        for (const auto& [close, index] : closers) {
          if (close == first - 2) call.receiver_call = index;
        }
      }
      const std::size_t close = matching(toks_, i, e);
      std::size_t arg_begin = i + 1;
      int depth = 0;
      for (std::size_t j = i + 1; j < close; ++j) {
        if (opens(toks_[j])) ++depth;
        if (closes(toks_[j])) --depth;
        if (depth == 0 && is_op(toks_[j], ",")) {
          if (j > arg_begin) call.args.push_back(make_argument(arg_begin, j));
          arg_begin = j + 1;
        }
      }
      if (close > arg_begin) call.args.push_back(make_argument(arg_begin, close));
      closers.emplace_back(close, static_cast<int>(st.calls.size()));
      st.calls.push_back(std::move(call));
    }
  }

  std::string_view src_;
  const std::vector<Token>& toks_;
  std::size_t begin_;
  std::size_t end_;
};

}  // namespace

std::vector<const Argument*> Call::positional() const {
  std::vector<const Argument*> out;
  for (const auto& a : args) {
    if (a.keyword.empty()) out.push_back(&a);
  }
  return out;
}

const Argument* Call::keyword(std::string_view name) const {
  for (const auto& a : args) {
    if (a.keyword == name) return &a;
  }
  return nullptr;
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      out.push_back({Token::Kind::op, "\n", i, i + 1});
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
      ++i;
      continue;
    }
    if (c == '\\' && i + 1 < src.size() && src[i + 1] == '\n') {
      i += 2;
      continue;
    }
    if (c == '#') {
      std::size_t e = src.find('\n', i);
      if (e == std::string_view::npos) e = src.size();
      out.push_back({Token::Kind::comment, std::string(src.substr(i + 1, e - i - 1)), i, e});
      i = e;
      continue;
    }

    // String literal, possibly with a prefix such as r, b, f or rb.
    std::size_t q = i;
    while (q < src.size() && q - i < 2 && std::string_view("rRbBuUfF").find(src[q]) != std::string_view::npos) ++q;
    if (q < src.size() && (src[q] == '\'' || src[q] == '"') &&
        (q == i || !is_name_char(i > 0 ? src[i - 1] : ' '))) {
      const bool raw = src.substr(i, q - i).find_first_of("rR") != std::string_view::npos;
      const char quote = src[q];
      const bool triple = src.substr(q, 3) == std::string(3, quote);
      const std::size_t open_len = triple ? 3 : 1;
      std::size_t j = q + open_len;
      while (j < src.size()) {
        if (src[j] == '\\') {
          j += 2;
          continue;
        }
        if (triple ? src.substr(j, 3) == std::string(3, quote) : src[j] == quote) break;
        if (!triple && src[j] == '\n') break;
        ++j;
      }
      const std::size_t body_end = std::min(j, src.size());
      const std::size_t close_end = std::min(src.size(), body_end + (body_end < src.size() && src[body_end] != '\n' ? open_len : 0));
      out.push_back({Token::Kind::string,
                     decode_string(src.substr(q + open_len, body_end - q - open_len), raw), i,
                     close_end});
      i = close_end;
      continue;
    }

    if (is_name_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_name_char(src[j])) ++j;
      out.push_back({Token::Kind::name, std::string(src.substr(i, j - i)), i, j});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '.' ||
                                src[j] == '_' ||
                                ((src[j] == '+' || src[j] == '-') && (src[j - 1] == 'e' || src[j - 1] == 'E')))) {
        ++j;
      }
      out.push_back({Token::Kind::number, std::string(src.substr(i, j - i)), i, j});
      i = j;
      continue;
    }
    std::size_t len = 1;
    for (auto op : kMultiOps) {
      if (src.substr(i, op.size()) == op) {
        len = op.size();
        break;
      }
    }
    out.push_back({Token::Kind::op, std::string(src.substr(i, len)), i, i + len});
    i += len;
  }
  return out;
}

std::vector<Statement> parse_statements(std::string_view source) {
  const std::vector<Token> toks = tokenize(source);
  // Drop comments and line breaks into side channels: comments feed the next
  // statement, and line breaks only end a statement outside brackets.
  std::vector<Token> code;
  std::vector<std::size_t> ends;  // exclusive end index in `code` of each statement
  std::vector<std::vector<std::string>> comment_groups;
  std::vector<std::string> pending;
  int depth = 0;
  std::size_t stmt_begin = 0;
  auto finish = [&] {
    if (code.size() > stmt_begin) {
      ends.push_back(code.size());
      comment_groups.push_back(std::move(pending));
      pending.clear();
      stmt_begin = code.size();
    }
  };
  for (const auto& t : toks) {
    if (t.kind == Token::Kind::comment) {
      std::string text = t.text;
      const auto first = text.find_first_not_of(' ');
      pending.push_back(first == std::string::npos ? std::string() : text.substr(first));
      continue;
    }
    if (is_op(t, "\n") || is_op(t, ";")) {
      if (depth <= 0) finish();
      continue;
    }
    if (opens(t)) ++depth;
    if (closes(t)) --depth;
    code.push_back(t);
  }
  finish();

  std::vector<Statement> out;
  std::size_t begin = 0;
  for (std::size_t s = 0; s < ends.size(); ++s) {
    StatementBuilder builder(source, code, begin, ends[s]);
    out.push_back(builder.build(std::move(comment_groups[s])));
    begin = ends[s];
  }
  return out;
}

}  // namespace provcard::pycode
