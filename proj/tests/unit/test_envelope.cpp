#include "doctest.h"
#include "oowm/envelope.hpp"

using namespace oowm;

TEST_CASE("well-formed envelope splits into payloads") {
  const auto env = split_envelope("<think>S</think><answer>P</answer>");
  CHECK(env.well_formed);
  CHECK(env.defects.empty());
  REQUIRE(env.think);
  REQUIRE(env.answer);
  CHECK(*env.think == "S");
  CHECK(*env.answer == "P");
  CHECK(structural_reward(env) == 1.0);
}

TEST_CASE("payload whitespace is trimmed, inner text kept") {
  const auto env = split_envelope("  <think>\n a b \n</think>\n<answer>\n@startuml\nstop\n@enduml\n</answer> ");
  CHECK(env.well_formed);
  CHECK(*env.think == "a b");
  CHECK(*env.answer == "@startuml\nstop\n@enduml");
}

TEST_CASE("missing answer") {
  const auto env = split_envelope("<think>S</think>");
  CHECK_FALSE(env.well_formed);
  REQUIRE(env.defects.size() == 1);
  CHECK(env.defects[0] == EnvelopeDefect::missing_answer);
  CHECK(structural_reward(env) == 0.0);
}

TEST_CASE("missing think keeps the answer payload") {
  const auto env = split_envelope("<answer>P</answer>");
  CHECK_FALSE(env.well_formed);
  CHECK(env.defects == std::vector{EnvelopeDefect::missing_think});
  REQUIRE(env.answer);
  CHECK(*env.answer == "P");
}

TEST_CASE("answer before think is interleaved") {
  const auto env = split_envelope("<answer>P</answer><think>S</think>");
  CHECK(env.defects == std::vector{EnvelopeDefect::interleaved_tags});
  CHECK(structural_reward(env) == 0.0);
}

TEST_CASE("answer-first accepted when ordering is relaxed") {
  EnvelopeOptions opts;
  opts.require_think_first = false;
  const auto env = split_envelope("<answer>P</answer><think>S</think>", opts);
  CHECK(env.well_formed);
}

TEST_CASE("overlapping tags are interleaved") {
  const auto env = split_envelope("<think>S<answer>P</think></answer>");
  CHECK_FALSE(env.well_formed);
  CHECK(std::find(env.defects.begin(), env.defects.end(), EnvelopeDefect::interleaved_tags) !=
        env.defects.end());
}

TEST_CASE("unclosed tag") {
  const auto env = split_envelope("<think>S</think><answer>P");
  CHECK(env.defects == std::vector{EnvelopeDefect::unclosed_tag});
}

TEST_CASE("duplicate tags") {
  const auto env = split_envelope("<think>a</think><think>b</think><answer>P</answer>");
  CHECK(env.defects == std::vector{EnvelopeDefect::duplicate_tag});
}

TEST_CASE("empty input scores zero") {
  const auto env = split_envelope("");
  CHECK_FALSE(env.well_formed);
  CHECK(structural_reward(env) == 0.0);
  CHECK_FALSE(env.answer);
}

TEST_CASE("well_formed iff no defects") {
  for (const char* s : {"", "<think></think><answer></answer>", "<think>x</think>", "<answer>y",
                        "<think>x</think><answer>y</answer><answer>z</answer>", "text only"}) {
    const auto env = split_envelope(s);
    CHECK(env.well_formed == env.defects.empty());
  }
}
