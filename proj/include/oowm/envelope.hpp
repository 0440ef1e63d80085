#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oowm {

enum class EnvelopeDefect {
  missing_think,
  missing_answer,
  unclosed_tag,
  interleaved_tags,
  duplicate_tag,
};

std::string_view to_string(EnvelopeDefect defect);

/// The `<think>` / `<answer>` split of a raw model output.
struct Envelope {
  std::optional<std::string> think;
  std::optional<std::string> answer;
  bool well_formed = false;
  std::vector<EnvelopeDefect> defects;
};

struct EnvelopeOptions {
  // Reversed `<answer>` before `<think>` is reported as interleaved_tags.
  bool require_think_first = true;
};

/// Extracts the first think and answer spans. Defects are recorded, never thrown.
Envelope split_envelope(std::string_view raw, const EnvelopeOptions& options = {});

/// 1.0 iff the envelope is well formed, else 0.0.
inline double structural_reward(const Envelope& env) { return env.well_formed ? 1.0 : 0.0; }

}  // namespace oowm
