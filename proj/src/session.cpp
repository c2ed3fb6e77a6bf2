#include "provcard/session.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "provcard/csv.hpp"
#include "provcard/errors.hpp"

namespace provcard {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(std::size_t line, std::size_t step, const std::string& message) {
  std::string where = "session line " + std::to_string(line);
  if (step > 0) where += " (step " + std::to_string(step) + ")";
  throw ParseError(where + ": " + message);
}

void finish(const std::vector<SessionStep>& steps) {
  if (steps.empty()) return;
  const SessionStep& s = steps.back();
  if (s.variable.empty()) fail(s.line, s.number, "missing 'variable'");
  if (s.snapshot.empty()) fail(s.line, s.number, "missing 'snapshot'");
}

}  // namespace

std::vector<SessionStep> parse_session(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<SessionStep> steps;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (line == "[step]") {
      finish(steps);
      SessionStep step;
      step.number = steps.size() + 1;
      step.line = line_no;
      steps.push_back(std::move(step));
      continue;
    }
    if (steps.empty()) fail(line_no, 0, "expected [step] before '" + line + "'");
    SessionStep& step = steps.back();

    if (line == "code <<<") {
      std::string code;
      bool closed = false;
      const std::size_t start = line_no;
      while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (trim(raw) == ">>>") {
          closed = true;
          break;
        }
        code += raw;
        code += '\n';
      }
      if (!closed) fail(start, step.number, "code block is not closed with '>>>'");
      if (!code.empty()) code.pop_back();
      step.provenance.code = std::move(code);
      continue;
    }

    if (line.rfind("metric ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, step.number, "metric line needs 'name = value'");
      const std::string name = trim(std::string_view(line).substr(7, eq - 7));
      const std::string value = trim(std::string_view(line).substr(eq + 1));
      double v = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (name.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
        fail(line_no, step.number, "bad metric line '" + line + "'");
      }
      step.metric_values[name] = v;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, step.number, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "variable") {
      step.variable = value;
    } else if (key == "cell_id") {
      step.provenance.cell_id = value;
    } else if (key == "execution_count") {
      long long n = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
      if (ec != std::errc() || ptr != value.data() + value.size() || n < 0) {
        fail(line_no, step.number, "execution_count must be a non-negative integer");
      }
      step.provenance.execution_count = n;
    } else if (key == "snapshot") {
      step.snapshot = base_dir / value;
    } else {
      fail(line_no, step.number, "unknown key '" + key + "'");
    }
  }
  finish(steps);
  return steps;
}

std::vector<SessionStep> read_session(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open session file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_session(buf.str(), path.parent_path());
}

IngestEvent load_step(const SessionStep& step) {
  IngestEvent event;
  event.variable = step.variable;
  event.provenance = step.provenance;
  event.metric_values = step.metric_values;
  if (!std::filesystem::exists(step.snapshot)) {
    throw ParseError("step " + std::to_string(step.number) + ": snapshot " + step.snapshot.string() +
                     " does not exist");
  }
  try {
    event.frame = read_snapshot_csv(step.snapshot);
  } catch (const ParseError& e) {
    throw ParseError("step " + std::to_string(step.number) + ": " + e.what());
  }
  return event;
}

}  // namespace provcard
