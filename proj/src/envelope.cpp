#include "oowm/envelope.hpp"

#include <algorithm>

#include "text_util.hpp"

namespace oowm {

std::string_view to_string(EnvelopeDefect defect) {
  switch (defect) {
    case EnvelopeDefect::missing_think: return "missing_think";
    case EnvelopeDefect::missing_answer: return "missing_answer";
    case EnvelopeDefect::unclosed_tag: return "unclosed_tag";
    case EnvelopeDefect::interleaved_tags: return "interleaved_tags";
    case EnvelopeDefect::duplicate_tag: return "duplicate_tag";
  }
  return "unclosed_tag";
}

namespace {

constexpr auto npos = std::string_view::npos;

struct Span {
  std::size_t open = npos;   // offset of the opening tag
  std::size_t close = npos;  // offset of the closing tag, npos if unclosed
  std::size_t payload_begin = npos;
  bool duplicated = false;

  bool found() const { return open != npos; }
  bool closed() const { return close != npos; }
  std::size_t end() const { return close; }
};

Span locate(std::string_view raw, std::string_view open_tag, std::string_view close_tag) {
  Span span;
  span.open = raw.find(open_tag);
  if (span.open == npos) return span;
  span.payload_begin = span.open + open_tag.size();
  span.close = raw.find(close_tag, span.payload_begin);
  span.duplicated = raw.find(open_tag, span.payload_begin) != npos;
  return span;
}

}  // namespace

Envelope split_envelope(std::string_view raw, const EnvelopeOptions& options) {
  Envelope env;
  const Span think = locate(raw, "<think>", "</think>");
  const Span answer = locate(raw, "<answer>", "</answer>");

  auto add = [&](EnvelopeDefect d) {
    if (std::find(env.defects.begin(), env.defects.end(), d) == env.defects.end())
      env.defects.push_back(d);
  };

  if (!think.found()) add(EnvelopeDefect::missing_think);
  if (!answer.found()) add(EnvelopeDefect::missing_answer);
  if ((think.found() && !think.closed()) || (answer.found() && !answer.closed()))
    add(EnvelopeDefect::unclosed_tag);

  if (think.found() && think.closed())
    env.think = std::string(detail::trim(raw.substr(think.payload_begin, think.close - think.payload_begin)));
  if (answer.found() && answer.closed())
    env.answer = std::string(detail::trim(raw.substr(answer.payload_begin, answer.close - answer.payload_begin)));

  if (env.think && env.answer) {
    const bool think_first = think.end() < answer.open;
    const bool answer_first = answer.end() < think.open;
    if (!think_first && !(answer_first && !options.require_think_first))
      add(EnvelopeDefect::interleaved_tags);
  }
  if (think.duplicated || answer.duplicated) add(EnvelopeDefect::duplicate_tag);

  env.well_formed = env.defects.empty();
  return env;
}

}  // namespace oowm
