#include "oowm/parser.hpp"

#include <optional>
#include <sstream>

#include "text_util.hpp"

namespace oowm {

using detail::ltrim;
using detail::rtrim;
using detail::split_lines;
using detail::starts_with_word;
using detail::to_lower;
using detail::trim;

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::missing_start_marker: return "missing_start_marker";
    case ParseErrorKind::missing_end_marker: return "missing_end_marker";
    case ParseErrorKind::unbalanced_block: return "unbalanced_block";
    case ParseErrorKind::unknown_statement: return "unknown_statement";
    case ParseErrorKind::empty_document: return "empty_document";
  }
  return "unknown_statement";
}

namespace {

bool is_start_marker(std::string_view line) { return ltrim(line).starts_with("@startuml"); }
bool is_end_marker(std::string_view line) { return ltrim(line).starts_with("@enduml"); }

// Index range [first, last) of the lines between the markers.
struct Body {
  std::size_t first = 0;
  std::size_t last = 0;
};

std::optional<ParseError> locate_body(const std::vector<std::string_view>& lines, Body& body) {
  std::size_t start = 0;
  while (start < lines.size() && !is_start_marker(lines[start])) ++start;
  if (start == lines.size())
    return ParseError{ParseErrorKind::missing_start_marker, 1, "no @startuml line"};
  std::size_t end = start + 1;
  while (end < lines.size() && !is_end_marker(lines[end])) ++end;
  if (end == lines.size())
    return ParseError{ParseErrorKind::missing_end_marker, static_cast<int>(lines.size()),
                      "@startuml at line " + std::to_string(start + 1) + " is never closed"};
  body = {start + 1, end};
  return std::nullopt;
}

// Text inside the first balanced parentheses, or nullopt when there are none.
std::optional<std::string> paren_content(std::string_view s) {
  const auto open = s.find('(');
  if (open == std::string_view::npos) return std::nullopt;
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')' && --depth == 0) return std::string(trim(s.substr(open + 1, i - open - 1)));
  }
  return std::string(trim(s.substr(open + 1)));
}

bool is_ignored_directive(std::string_view lower) {
  static constexpr std::string_view words[] = {"skinparam", "title",  "header", "footer",
                                               "caption",   "scale",  "hide",   "show",
                                               "left",      "top",    "!theme", "allowmixing",
                                               "detach",    "kill",   "set"};
  for (auto w : words)
    if (starts_with_word(lower, w)) return true;
  return false;
}

// Skips multi-line constructs that carry no diagram content (block comments,
// notes, legends, skinparam blocks). Returns true when line `i` began such a
// construct; `i` then points at its last line. Sets `error` if unterminated.
bool skip_block_construct(const std::vector<std::string_view>& lines, std::size_t& i,
                          std::size_t last, std::optional<ParseError>& error) {
  const std::string_view line = trim(lines[i]);
  const std::string lower = to_lower(line);

  auto skip_until = [&](auto&& is_terminator, std::string_view what) {
    const std::size_t open = i;
    for (++i; i < last; ++i)
      if (is_terminator(to_lower(trim(lines[i])))) return true;
    error = ParseError{ParseErrorKind::unbalanced_block, static_cast<int>(open + 1),
                       std::string(what) + " is never closed"};
    i = last;
    return true;
  };

  if (line.starts_with("/'")) {
    if (line.find("'/", 2) != std::string_view::npos) return true;
    const std::size_t open = i;
    for (++i; i < last; ++i)
      if (lines[i].find("'/") != std::string_view::npos) return true;
    error = ParseError{ParseErrorKind::unbalanced_block, static_cast<int>(open + 1),
                       "block comment is never closed"};
    i = last;
    return true;
  }
  if (starts_with_word(lower, "note") || starts_with_word(lower, "floating")) {
    // Single-line forms: `note right: text`, `note "text" as N`.
    if (line.find(':') != std::string_view::npos || line.find('"') != std::string_view::npos)
      return true;
    return skip_until([](const std::string& l) { return l == "end note" || l == "endnote"; },
                      "note");
  }
  if (starts_with_word(lower, "legend"))
    return skip_until(
        [](const std::string& l) { return l == "endlegend" || l == "end legend"; }, "legend");
  if (starts_with_word(lower, "skinparam") && line.ends_with("{"))
    return skip_until([](const std::string& l) { return l == "}"; }, "skinparam block");
  return false;
}

// Opening brace either ends the line or stands alone on the next non-blank line.
bool take_open_brace(std::string_view& rest, const std::vector<std::string_view>& lines,
                     std::size_t& i, std::size_t last) {
  rest = rtrim(rest);
  if (rest.ends_with("{")) {
    rest.remove_suffix(1);
    rest = rtrim(rest);
    return true;
  }
  std::size_t j = i + 1;
  while (j < last && trim(lines[j]).empty()) ++j;
  if (j < last && trim(lines[j]) == "{") {
    i = j;
    return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Activity diagrams
// ---------------------------------------------------------------------------

enum class FrameType { partition, group, branch, while_loop, repeat_loop };

struct Frame {
  FrameType type;
  int line;
  std::string raw_name;
  std::string condition;
  std::vector<FlowElement> body;       // partition, group and loop bodies; branch then-arm
  std::vector<FlowElement> else_body;  // branch only
  bool in_else = false;
  bool chained = false;  // opened by `elseif`, closed by the same `endif`

  std::vector<FlowElement>& current() { return in_else ? else_body : body; }
};

void flatten_actions(const std::vector<FlowElement>& body, std::vector<ActionNode>& out) {
  for (const auto& e : body) {
    if (const auto* a = std::get_if<ActionNode>(&e.node)) out.push_back(*a);
    else if (const auto* b = std::get_if<Branch>(&e.node)) {
      flatten_actions(b->then_body, out);
      flatten_actions(b->else_body, out);
    } else if (const auto* l = std::get_if<Loop>(&e.node)) {
      flatten_actions(l->body, out);
    }
  }
}

class ActivityBuilder {
 public:
  ActivityBuilder(const std::vector<std::string_view>& lines, Body body, ParseMode mode)
      : lines_(lines), body_(body), mode_(mode) {}

  ParseResult<ActivityDiagram> run() {
    for (i_ = body_.first; i_ < body_.last && !error_; ++i_) statement();
    if (!error_ && !stack_.empty()) {
      const Frame& open = stack_.back();
      fail(ParseErrorKind::unbalanced_block, open.line,
           "block opened at line " + std::to_string(open.line) + " is never closed");
    }
    if (!error_ && statements_ == 0)
      fail(ParseErrorKind::empty_document, static_cast<int>(body_.last + 1),
           "no statements between @startuml and @enduml");
    ParseResult<ActivityDiagram> result = error_ ? ParseResult<ActivityDiagram>(*error_)
                                                 : ParseResult<ActivityDiagram>(std::move(diagram_));
    result.warnings = std::move(warnings_);
    result.scope_pushes = pushes_;
    result.scope_pops = pops_;
    return result;
  }

 private:
  int line_no() const { return static_cast<int>(i_ + 1); }

  void fail(ParseErrorKind kind, int line, std::string message) {
    if (!error_) error_ = ParseError{kind, line, std::move(message)};
  }

  void warn(std::string message) { warnings_.push_back({line_no(), std::move(message)}); }

  void unknown(std::string_view line) {
    if (mode_ == ParseMode::strict)
      fail(ParseErrorKind::unknown_statement, line_no(),
           "unrecognized statement: " + std::string(line));
    else
      warn("skipped unrecognized statement: " + std::string(line));
  }

  void push(Frame frame) {
    ++pushes_;
    stack_.push_back(std::move(frame));
  }

  Frame pop() {
    ++pops_;
    Frame f = std::move(stack_.back());
    stack_.pop_back();
    return f;
  }

  void append(FlowElement element) {
    if (stack_.empty()) {
      // Control flow outside any partition only contributes its actions.
      flatten_actions({element}, diagram_.preamble_actions);
      return;
    }
    stack_.back().current().push_back(std::move(element));
  }

  bool top_is(FrameType t) const { return !stack_.empty() && stack_.back().type == t; }

  void statement() {
    const std::string_view line = trim(lines_[i_]);
    if (line.empty() || line.starts_with("'")) return;
    if (skip_block_construct(lines_, i_, body_.last, error_)) return;
    if (line.starts_with(":")) return action(line);

    const std::string lower = to_lower(line);
    if (lower == "start") {
      ++statements_;
      diagram_.has_start = true;
      return;
    }
    if (lower == "stop" || lower == "end") {
      ++statements_;
      diagram_.has_stop = true;
      return;
    }
    if (starts_with_word(lower, "partition")) return open_partition(line);
    if (line == "}") return close_partition();
    if (starts_with_word(lower, "if")) return open_branch(line, false);
    if (starts_with_word(lower, "elseif") ||
        (starts_with_word(lower, "else") && starts_with_word(ltrim(lower.substr(4)), "if")))
      return open_elseif(line);
    if (starts_with_word(lower, "else")) return open_else();
    if (starts_with_word(lower, "endif") || lower.starts_with("end if")) return close_branch();
    if (starts_with_word(lower, "endwhile") || lower.starts_with("end while"))
      return close_loop(FrameType::while_loop, "");
    if (starts_with_word(lower, "while")) return open_loop(FrameType::while_loop, line);
    if (starts_with_word(lower, "repeat") &&
        starts_with_word(ltrim(std::string_view(lower).substr(6)), "while"))
      return close_loop(FrameType::repeat_loop, line);
    if (lower == "repeat") return open_loop(FrameType::repeat_loop, line);
    if (starts_with_word(lower, "repeat") && ltrim(line.substr(6)).starts_with(":")) {
      open_loop(FrameType::repeat_loop, line);
      return action(ltrim(line.substr(6)));
    }
    if (is_ignored_directive(lower)) return;
    // Explicit arrows between actions carry no structure.
    if (line.starts_with("-") && line.find('>') != std::string_view::npos) return;
    unknown(line);
  }

  void action(std::string_view first) {
    const int start_line = line_no();
    std::string text;
    std::string_view part = first.substr(1);
    bool closed = false;
    while (true) {
      part = trim(part);
      if (part.ends_with(";")) {
        part.remove_suffix(1);
        closed = true;
      }
      part = trim(part);
      if (!part.empty()) {
        if (!text.empty()) text.push_back(' ');
        text.append(part);
      }
      if (closed) break;
      if (i_ + 1 >= body_.last) break;
      part = lines_[++i_];
    }
    if (!closed) {
      fail(ParseErrorKind::unbalanced_block, start_line, "action is never terminated by ';'");
      return;
    }
    if (text.empty()) {
      unknown(":;");
      return;
    }
    ++statements_;
    append(FlowElement{ActionNode{std::move(text), start_line}});
  }

  void open_partition(std::string_view line) {
    std::string_view rest = ltrim(line.substr(9));
    if (!take_open_brace(rest, lines_, i_, body_.last)) {
      unknown(line);
      return;
    }
    std::string name;
    if (rest.starts_with("\"")) {
      const auto close = rest.find('"', 1);
      name = std::string(rest.substr(1, close == std::string_view::npos ? std::string_view::npos
                                                                        : close - 1));
    } else {
      const auto color = rest.find(" #");
      name = std::string(trim(rest.substr(0, color)));
    }
    ++statements_;
    if (!stack_.empty()) {
      warn("nested partition \"" + name + "\" is flattened into its enclosing block");
      push(Frame{FrameType::group, line_no(), name, {}, {}, {}});
      return;
    }
    push(Frame{FrameType::partition, line_no(), std::move(name), {}, {}, {}});
  }

  void close_partition() {
    if (!top_is(FrameType::partition) && !top_is(FrameType::group)) {
      fail(ParseErrorKind::unbalanced_block, line_no(), "'}' without an open partition");
      return;
    }
    Frame f = pop();
    if (f.type == FrameType::group) {
      for (auto& e : f.body) append(std::move(e));
      return;
    }
    PartitionKey key = canonical_partition_key(f.raw_name);
    for (auto& existing : diagram_.partitions) {
      if (existing.canonical_key == key) {
        warn("partition \"" + f.raw_name + "\" merged into \"" + existing.raw_name + "\"");
        for (auto& e : f.body) existing.body.push_back(std::move(e));
        return;
      }
    }
    diagram_.partitions.push_back(Partition{std::move(f.raw_name), std::move(key), std::move(f.body)});
  }

  static std::string condition_of(std::string_view line, std::size_t keyword_len) {
    std::string_view rest = line.substr(keyword_len);
    if (auto c = paren_content(rest)) return *c;
    const std::string lower = to_lower(rest);
    const auto then = lower.find(" then");
    return std::string(trim(rest.substr(0, then)));
  }

  void open_branch(std::string_view line, bool chained) {
    ++statements_;
    Frame f{FrameType::branch, line_no(), {}, condition_of(line, 2), {}, {}};
    f.chained = chained;
    push(std::move(f));
  }

  void open_elseif(std::string_view line) {
    if (!top_is(FrameType::branch) || stack_.back().in_else) {
      fail(ParseErrorKind::unbalanced_block, line_no(), "elseif without an open if");
      return;
    }
    stack_.back().in_else = true;
    const std::string lower = to_lower(line);
    const std::size_t kw = lower.starts_with("elseif") ? 6 : lower.find("if") + 2;
    open_branch(line.substr(kw - 2), true);
  }

  void open_else() {
    if (!top_is(FrameType::branch) || stack_.back().in_else) {
      fail(ParseErrorKind::unbalanced_block, line_no(), "else without an open if");
      return;
    }
    stack_.back().in_else = true;
  }

  void close_branch() {
    while (true) {
      if (!top_is(FrameType::branch)) {
        fail(ParseErrorKind::unbalanced_block, line_no(), "endif without an open if");
        return;
      }
      Frame f = pop();
      append(FlowElement{Branch{std::move(f.condition), std::move(f.body),
                                std::move(f.else_body), f.line}});
      if (!f.chained) return;
    }
  }

  void open_loop(FrameType type, std::string_view line) {
    ++statements_;
    std::string condition = type == FrameType::while_loop ? condition_of(line, 5) : std::string();
    push(Frame{type, line_no(), {}, std::move(condition), {}, {}});
  }

  void close_loop(FrameType type, std::string_view line) {
    if (!top_is(type)) {
      fail(ParseErrorKind::unbalanced_block, line_no(),
           type == FrameType::while_loop ? "endwhile without an open while"
                                         : "repeat while without an open repeat");
      return;
    }
    Frame f = pop();
    Loop loop;
    loop.source_line = f.line;
    loop.body = std::move(f.body);
    if (type == FrameType::while_loop) {
      loop.kind = LoopKind::while_loop;
      loop.condition = std::move(f.condition);
    } else {
      loop.kind = LoopKind::repeat_loop;
      const std::string lower = to_lower(line);
      loop.condition = condition_of(line, lower.find("while") + 5);
    }
    append(FlowElement{std::move(loop)});
  }

  const std::vector<std::string_view>& lines_;
  Body body_;
  ParseMode mode_;
  std::size_t i_ = 0;
  ActivityDiagram diagram_;
  std::vector<Frame> stack_;
  std::vector<ParseWarning> warnings_;
  std::optional<ParseError> error_;
  int statements_ = 0;
  int pushes_ = 0;
  int pops_ = 0;
};

// ---------------------------------------------------------------------------
// Class diagrams
// ---------------------------------------------------------------------------

bool is_identifier_char(char c) { return detail::is_word_char(c) || c == '.' || c == '$'; }

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!is_identifier_char(c)) return false;
  return true;
}

// Reads a quoted or bare name starting at `pos`.
std::optional<std::string> read_name(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && detail::is_space(s[pos])) ++pos;
  if (pos >= s.size()) return std::nullopt;
  if (s[pos] == '"') {
    const auto close = s.find('"', pos + 1);
    if (close == std::string_view::npos) return std::nullopt;
    std::string name(trim(s.substr(pos + 1, close - pos - 1)));
    pos = close + 1;
    if (name.empty()) return std::nullopt;
    return name;
  }
  const std::size_t begin = pos;
  while (pos < s.size() && is_identifier_char(s[pos])) ++pos;
  if (pos == begin) return std::nullopt;
  return std::string(s.substr(begin, pos - begin));
}

void skip_quoted(std::string_view s, std::size_t& pos) {
  std::size_t p = pos;
  while (p < s.size() && detail::is_space(s[p])) ++p;
  if (p < s.size() && s[p] == '"') {
    const auto close = s.find('"', p + 1);
    if (close != std::string_view::npos) pos = close + 1;
  }
}

struct Arrow {
  std::string left_head;
  std::string right_head;
};

std::optional<Arrow> read_arrow(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && detail::is_space(s[pos])) ++pos;
  std::size_t p = pos;
  Arrow arrow;
  auto is_line = [](char c) { return c == '-' || c == '.'; };
  if (s.substr(p).starts_with("<|")) {
    arrow.left_head = "<|";
    p += 2;
  } else if (p + 1 < s.size() && (s[p] == '<' || s[p] == '*' || s[p] == 'o' || s[p] == '+' ||
                                  s[p] == '#' || s[p] == 'x') &&
             is_line(s[p + 1])) {
    arrow.left_head = std::string(1, s[p]);
    ++p;
  }
  int strokes = 0;
  while (p < s.size()) {
    if (is_line(s[p])) {
      ++strokes;
      ++p;
    } else if (s[p] == '[' && strokes > 0) {
      const auto close = s.find(']', p);
      if (close == std::string_view::npos) return std::nullopt;
      p = close + 1;
    } else if (std::isalpha(static_cast<unsigned char>(s[p])) && strokes > 0 &&
               is_line(s[p - 1])) {
      // Direction hints such as -up-> or -left-|>.
      std::size_t q = p;
      while (q < s.size() && std::isalpha(static_cast<unsigned char>(s[q]))) ++q;
      if (q >= s.size() || !is_line(s[q])) break;
      p = q;
    } else {
      break;
    }
  }
  if (strokes == 0) return std::nullopt;
  if (s.substr(p).starts_with("|>")) {
    arrow.right_head = "|>";
    p += 2;
  } else if (p < s.size() && s[p] == '>') {
    arrow.right_head = ">";
    ++p;
  } else if (p < s.size() && (s[p] == '*' || s[p] == 'o' || s[p] == '+' || s[p] == '#' ||
                              s[p] == 'x') &&
             (p + 1 == s.size() || !is_identifier_char(s[p + 1]))) {
    arrow.right_head = std::string(1, s[p]);
    ++p;
  }
  if (strokes < 2 && arrow.left_head.empty() && arrow.right_head.empty()) return std::nullopt;
  pos = p;
  return arrow;
}

std::optional<Relation> parse_relation(std::string_view line) {
  std::size_t pos = 0;
  auto left = read_name(line, pos);
  if (!left) return std::nullopt;
  skip_quoted(line, pos);
  auto arrow = read_arrow(line, pos);
  if (!arrow) return std::nullopt;
  skip_quoted(line, pos);
  auto right = read_name(line, pos);
  if (!right) return std::nullopt;
  std::string_view rest = trim(line.substr(pos));
  Relation r;
  if (!rest.empty()) {
    if (rest.front() != ':') return std::nullopt;
    std::string label(trim(rest.substr(1)));
    if (!label.empty()) r.label = std::move(label);
  }
  const auto& lh = arrow->left_head;
  const auto& rh = arrow->right_head;
  auto orient = [&](RelationKind kind, bool left_is_from) {
    r.kind = kind;
    r.from = left_is_from ? *left : *right;
    r.to = left_is_from ? *right : *left;
  };
  if (lh == "<|") orient(RelationKind::inheritance, false);
  else if (rh == "|>") orient(RelationKind::inheritance, true);
  else if (lh == "*") orient(RelationKind::composition, true);
  else if (rh == "*") orient(RelationKind::composition, false);
  else if (lh == "o") orient(RelationKind::aggregation, true);
  else if (rh == "o") orient(RelationKind::aggregation, false);
  else if (lh == "<" && rh != ">") orient(RelationKind::association, false);
  else orient(RelationKind::association, true);
  return r;
}

bool is_member_separator(std::string_view line) {
  return line.starts_with("--") || line.starts_with("..") || line.starts_with("==") ||
         line.starts_with("__");
}

std::string_view strip_member_modifiers(std::string_view s) {
  while (true) {
    s = ltrim(s);
    if (!s.empty() && (s.front() == '+' || s.front() == '-' || s.front() == '#' || s.front() == '~')) {
      s.remove_prefix(1);
      continue;
    }
    if (s.starts_with("{")) {
      const auto close = s.find('}');
      if (close == std::string_view::npos) return s;
      s.remove_prefix(close + 1);
      continue;
    }
    return s;
  }
}

enum class ClassFrameType { class_body, package };

struct ClassFrame {
  ClassFrameType type;
  int line;
  std::size_t class_index = 0;
};

class ClassBuilder {
 public:
  ClassBuilder(const std::vector<std::string_view>& lines, Body body, ParseMode mode)
      : lines_(lines), body_(body), mode_(mode) {}

  ParseResult<ClassDiagram> run() {
    for (i_ = body_.first; i_ < body_.last && !error_; ++i_) statement();
    if (!error_ && !stack_.empty())
      fail(ParseErrorKind::unbalanced_block, stack_.back().line,
           "block opened at line " + std::to_string(stack_.back().line) + " is never closed");
    if (!error_ && statements_ == 0)
      fail(ParseErrorKind::empty_document, static_cast<int>(body_.last + 1),
           "no statements between @startuml and @enduml");
    flag_dangling_relations(diagram_);
    ParseResult<ClassDiagram> result = error_ ? ParseResult<ClassDiagram>(*error_)
                                              : ParseResult<ClassDiagram>(std::move(diagram_));
    result.warnings = std::move(warnings_);
    result.scope_pushes = pushes_;
    result.scope_pops = pops_;
    return result;
  }

 private:
  int line_no() const { return static_cast<int>(i_ + 1); }

  void fail(ParseErrorKind kind, int line, std::string message) {
    if (!error_) error_ = ParseError{kind, line, std::move(message)};
  }

  void warn(std::string message) { warnings_.push_back({line_no(), std::move(message)}); }

  void unknown(std::string_view line) {
    if (mode_ == ParseMode::strict)
      fail(ParseErrorKind::unknown_statement, line_no(),
           "unrecognized statement: " + std::string(line));
    else
      warn("skipped unrecognized statement: " + std::string(line));
  }

  void statement() {
    const std::string_view line = trim(lines_[i_]);
    if (line.empty() || line.starts_with("'")) return;
    if (!stack_.empty() && stack_.back().type == ClassFrameType::class_body &&
        !line.starts_with("/'"))
      return member(line);
    if (skip_block_construct(lines_, i_, body_.last, error_)) return;

    const std::string lower = to_lower(line);
    if (line == "}") {
      if (stack_.empty()) {
        fail(ParseErrorKind::unbalanced_block, line_no(), "'}' without an open block");
        return;
      }
      ++pops_;
      stack_.pop_back();
      return;
    }
    for (std::string_view kw : {"abstract class", "class", "abstract", "interface", "enum"}) {
      if (starts_with_word(lower, kw)) return declare(line, kw.size());
    }
    if (starts_with_word(lower, "package") || starts_with_word(lower, "namespace")) {
      std::string_view rest = line;
      if (!take_open_brace(rest, lines_, i_, body_.last)) {
        unknown(line);
        return;
      }
      ++statements_;
      ++pushes_;
      stack_.push_back({ClassFrameType::package, line_no()});
      return;
    }
    if (auto relation = parse_relation(line)) {
      ++statements_;
      diagram_.relations.push_back(std::move(*relation));
      return;
    }
    if (is_ignored_directive(lower)) return;
    unknown(line);
  }

  std::size_t class_index(const std::string& name) {
    for (std::size_t k = 0; k < diagram_.classes.size(); ++k)
      if (diagram_.classes[k].name == name) {
        warn("class " + name + " declared more than once; members merged");
        return k;
      }
    diagram_.classes.push_back(ClassDecl{name, {}, {}, std::nullopt});
    return diagram_.classes.size() - 1;
  }

  void declare(std::string_view line, std::size_t keyword_len) {
    std::size_t pos = keyword_len;
    auto name = read_name(line, pos);
    if (!name) {
      unknown(line);
      return;
    }
    std::optional<std::string> alias;
    {
      std::size_t p = pos;
      while (p < line.size() && detail::is_space(line[p])) ++p;
      if (starts_with_word(line.substr(p), "as")) {
        p += 2;
        alias = read_name(line, p);
        if (alias) pos = p;
      }
    }
    std::string_view rest = line.substr(pos);
    // Single-line bodies: `class A {}` or `class A { x }`.
    std::optional<std::string_view> inline_body;
    if (const auto open = rest.find('{'); open != std::string_view::npos) {
      const auto close = rest.rfind('}');
      if (close != std::string_view::npos && close > open) {
        inline_body = trim(rest.substr(open + 1, close - open - 1));
        rest = rest.substr(0, open);
      }
    }
    bool has_body = false;
    if (!inline_body) has_body = take_open_brace(rest, lines_, i_, body_.last);

    ++statements_;
    const std::size_t index = class_index(*name);
    if (alias) diagram_.classes[index].alias = alias;
    declare_supertypes(*name, rest);
    if (inline_body && !inline_body->empty()) add_member(index, *inline_body);
    if (has_body) {
      ++pushes_;
      stack_.push_back({ClassFrameType::class_body, line_no(), index});
    }
  }

  // `class A extends B implements C, D` records inheritance relations.
  void declare_supertypes(const std::string& name, std::string_view rest) {
    const std::string lower = to_lower(rest);
    for (std::string_view kw : {"extends", "implements"}) {
      std::size_t at = lower.find(kw);
      if (at == std::string::npos) continue;
      std::size_t pos = at + kw.size();
      while (true) {
        auto super = read_name(rest, pos);
        if (!super || *super == "implements" || *super == "extends") break;
        diagram_.relations.push_back(
            Relation{RelationKind::inheritance, name, *super, std::nullopt, false, false});
        while (pos < rest.size() && detail::is_space(rest[pos])) ++pos;
        if (pos < rest.size() && rest[pos] == ',') ++pos;
        else break;
      }
    }
  }

  void member(std::string_view line) {
    if (line == "}") {
      ++pops_;
      stack_.pop_back();
      return;
    }
    if (is_member_separator(line)) return;
    add_member(stack_.back().class_index, line);
  }

  void add_member(std::size_t index, std::string_view raw) {
    std::string_view text = trim(strip_member_modifiers(raw));
    if (text.empty()) return;
    ClassDecl& decl = diagram_.classes[index];
    if (text.find('(') != std::string_view::npos) {
      decl.methods.emplace_back(text);
      return;
    }
    Attribute attr;
    if (const auto colon = text.find(':'); colon != std::string_view::npos) {
      attr.name = std::string(trim(text.substr(0, colon)));
      std::string type(trim(text.substr(colon + 1)));
      if (!type.empty()) attr.type = std::move(type);
    } else {
      attr.name = std::string(text);
    }
    if (attr.name.empty()) {
      warn("attribute without a name in class " + decl.name);
      return;
    }
    for (const auto& existing : decl.attributes) {
      if (existing.name == attr.name) {
        warn("duplicate attribute " + attr.name + " in class " + decl.name + " ignored");
        return;
      }
    }
    decl.attributes.push_back(std::move(attr));
  }

  const std::vector<std::string_view>& lines_;
  Body body_;
  ParseMode mode_;
  std::size_t i_ = 0;
  ClassDiagram diagram_;
  std::vector<ClassFrame> stack_;
  std::vector<ParseWarning> warnings_;
  std::optional<ParseError> error_;
  int statements_ = 0;
  int pushes_ = 0;
  int pops_ = 0;
};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void indent(std::ostringstream& os, int depth) {
  for (int k = 0; k < depth; ++k) os << "  ";
}

void write_body(std::ostringstream& os, const std::vector<FlowElement>& body, int depth);

void write_element(std::ostringstream& os, const FlowElement& e, int depth) {
  if (const auto* a = std::get_if<ActionNode>(&e.node)) {
    indent(os, depth);
    os << ':' << a->text << ";\n";
  } else if (const auto* b = std::get_if<Branch>(&e.node)) {
    indent(os, depth);
    os << "if (" << b->condition << ") then (yes)\n";
    write_body(os, b->then_body, depth + 1);
    if (!b->else_body.empty()) {
      indent(os, depth);
      os << "else (no)\n";
      write_body(os, b->else_body, depth + 1);
    }
    indent(os, depth);
    os << "endif\n";
  } else if (const auto* l = std::get_if<Loop>(&e.node)) {
    indent(os, depth);
    if (l->kind == LoopKind::while_loop) {
      os << "while (" << l->condition << ")\n";
      write_body(os, l->body, depth + 1);
      indent(os, depth);
      os << "endwhile\n";
    } else {
      os << "repeat\n";
      write_body(os, l->body, depth + 1);
      indent(os, depth);
      os << "repeat while (" << l->condition << ")\n";
    }
  }
}

void write_body(std::ostringstream& os, const std::vector<FlowElement>& body, int depth) {
  for (const auto& e : body) write_element(os, e, depth);
}

std::string quote_if_needed(const std::string& name) {
  return is_identifier(name) ? name : "\"" + name + "\"";
}

}  // namespace

bool check_markers(std::string_view src) {
  bool started = false;
  for (auto line : split_lines(src)) {
    if (!started) started = is_start_marker(line);
    else if (is_end_marker(line)) return true;
  }
  return false;
}

ParseResult<ActivityDiagram> parse_activity(std::string_view src, ParseMode mode) {
  const auto lines = split_lines(src);
  Body body;
  if (auto err = locate_body(lines, body)) return *err;
  return ActivityBuilder(lines, body, mode).run();
}

ParseResult<ClassDiagram> parse_class(std::string_view src, ParseMode mode) {
  const auto lines = split_lines(src);
  Body body;
  if (auto err = locate_body(lines, body)) return *err;
  return ClassBuilder(lines, body, mode).run();
}

std::string serialize(const ActivityDiagram& diagram) {
  std::ostringstream os;
  os << "@startuml\n";
  if (diagram.has_start) os << "start\n";
  for (const auto& a : diagram.preamble_actions) os << ':' << a.text << ";\n";
  for (const auto& p : diagram.partitions) {
    if (p.raw_name.find('"') == std::string::npos) os << "partition \"" << p.raw_name << "\" {\n";
    else os << "partition " << p.raw_name << " {\n";
    write_body(os, p.body, 1);
    os << "}\n";
  }
  if (diagram.has_stop) os << "stop\n";
  os << "@enduml\n";
  return os.str();
}

std::string serialize(const ClassDiagram& diagram) {
  std::ostringstream os;
  os << "@startuml\n";
  for (const auto& c : diagram.classes) {
    os << "class " << quote_if_needed(c.name);
    if (c.alias) os << " as " << quote_if_needed(*c.alias);
    if (c.attributes.empty() && c.methods.empty()) {
      os << '\n';
      continue;
    }
    os << " {\n";
    for (const auto& a : c.attributes) {
      os << "  " << a.name;
      if (a.type) os << " : " << *a.type;
      os << '\n';
    }
    for (const auto& m : c.methods) os << "  " << m << '\n';
    os << "}\n";
  }
  for (const auto& r : diagram.relations) {
    const std::string from = quote_if_needed(r.from);
    const std::string to = quote_if_needed(r.to);
    switch (r.kind) {
      case RelationKind::inheritance: os << to << " <|-- " << from; break;
      case RelationKind::aggregation: os << from << " o-- " << to; break;
      case RelationKind::composition: os << from << " *-- " << to; break;
      case RelationKind::association: os << from << " --> " << to; break;
    }
    if (r.label) os << " : " << *r.label;
    os << '\n';
  }
  os << "@enduml\n";
  return os.str();
}

}  // namespace oowm
