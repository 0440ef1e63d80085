#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "oowm/diagram.hpp"

namespace oowm {

enum class ParseErrorKind {
  missing_start_marker,
  missing_end_marker,
  unbalanced_block,
  unknown_statement,
  empty_document,
};

std::string_view to_string(ParseErrorKind kind);

struct ParseError {
  ParseErrorKind kind = ParseErrorKind::empty_document;
  int line = 1;
  std::string message;
};

struct ParseWarning {
  int line = 1;
  std::string message;
};

enum class ParseMode {
  strict,   // unknown statements are errors
  lenient,  // unknown statements are skipped and reported as warnings
};

/// Outcome of a parse: either a diagram or the first error encountered.
/// Warnings and scope counters are kept in both cases.
template <typename Diagram>
class ParseResult {
 public:
  ParseResult(Diagram d) : value_(std::move(d)) {}
  ParseResult(ParseError e) : value_(std::move(e)) {}

  bool ok() const { return std::holds_alternative<Diagram>(value_); }
  explicit operator bool() const { return ok(); }

  const Diagram& value() const { return std::get<Diagram>(value_); }
  Diagram& value() { return std::get<Diagram>(value_); }
  const ParseError& error() const { return std::get<ParseError>(value_); }

  std::vector<ParseWarning> warnings;
  int scope_pushes = 0;
  int scope_pops = 0;

 private:
  std::variant<Diagram, ParseError> value_;
};

/// True iff a line starting with @startuml (leading whitespace allowed)
/// precedes a line starting with @enduml.
bool check_markers(std::string_view src);

ParseResult<ActivityDiagram> parse_activity(std::string_view src,
                                            ParseMode mode = ParseMode::lenient);

ParseResult<ClassDiagram> parse_class(std::string_view src,
                                      ParseMode mode = ParseMode::lenient);

/// Canonical PlantUML text. Reparses to a structurally equal diagram.
std::string serialize(const ActivityDiagram& diagram);
std::string serialize(const ClassDiagram& diagram);

}  // namespace oowm
