#include "doctest.h"
#include "fixtures.hpp"
#include "oowm/diagram.hpp"
#include "oowm/parser.hpp"

using namespace oowm;

namespace {
std::vector<std::string> texts(const std::vector<ActionNode>& nodes) {
  std::vector<std::string> out;
  for (const auto& n : nodes) out.push_back(n.text);
  return out;
}
}  // namespace

TEST_CASE("partition names canonicalize by keyword") {
  CHECK(canonical_partition_key("Messy Areas") == PartitionKey::messy_areas());
  CHECK(canonical_partition_key("MESSY-AREAS:") == PartitionKey::messy_areas());
  CHECK(canonical_partition_key("Priority Order") == PartitionKey::priority_order());
  CHECK(canonical_partition_key("1. Priorities") == PartitionKey::priority_order());
  CHECK(canonical_partition_key("Specific Steps") == PartitionKey::specific_steps());
  CHECK(canonical_partition_key("step by step") == PartitionKey::specific_steps());
  const auto other = canonical_partition_key("Tools Needed!");
  CHECK(other.kind == PartitionKind::other);
  CHECK(other.text == "toolsneeded");
  CHECK(to_string(other) == "other:toolsneeded");
  CHECK(partition_key_from_string("other:toolsneeded") == other);
  CHECK(partition_key_from_string("priority_order") == PartitionKey::priority_order());
}

TEST_CASE("collect flattens loops in order") {
  const auto r = parse_activity(
      "@startuml\npartition \"Specific Steps\" {\nwhile (more?)\n:A;\n:B;\nendwhile\n}\n@enduml");
  REQUIRE(r.ok());
  CHECK(texts(collect_action_nodes(r.value(), PartitionKey::specific_steps())) ==
        std::vector<std::string>{"A", "B"});
}

TEST_CASE("absent partition collects nothing") {
  const auto r = parse_activity(fixtures::diagram("act_other_partition.puml"));
  REQUIRE(r.ok());
  CHECK(collect_action_nodes(r.value(), PartitionKey::priority_order()).empty());
}

TEST_CASE("conditions are collected only on request") {
  const auto r = parse_activity(fixtures::diagram("act_branch_in_loop.puml"));
  REQUIRE(r.ok());
  CHECK(collect_action_nodes(r.value(), PartitionKey::specific_steps()).size() == 5);
  CollectOptions opts;
  opts.include_conditions = true;
  const auto all = texts(collect_action_nodes(r.value(), PartitionKey::specific_steps(), opts));
  REQUIRE(all.size() == 7);
  CHECK(all[0] == "Dishes in the sink?");
  CHECK(all[2] == "Dish is greasy?");
}

TEST_CASE("messy-area actions come back in source order") {
  const auto r = parse_activity(fixtures::diagram("act_study_desk.puml"));
  REQUIRE(r.ok());
  CHECK(texts(collect_action_nodes(r.value(), PartitionKey::messy_areas())) ==
        std::vector<std::string>{"Desk covered with papers", "Chair draped with clothes"});
}

TEST_CASE("stats") {
  SUBCASE("empty diagram") {
    const auto st = diagram_stats(ActivityDiagram{});
    CHECK(st.action_count == 0);
    CHECK(st.branch_count == 0);
    CHECK(st.loop_count == 0);
    CHECK(st.partition_keys.empty());
  }
  SUBCASE("one action in one branch arm") {
    const auto r = parse_activity(
        "@startuml\npartition \"Steps\" {\nif (c) then (yes)\n:a;\nendif\n}\n@enduml");
    REQUIRE(r.ok());
    const auto st = diagram_stats(r.value());
    CHECK(st.action_count == 1);
    CHECK(st.branch_count == 1);
    CHECK(st.loop_count == 0);
    CHECK(st.partition_keys == std::vector{PartitionKey::specific_steps()});
  }
  SUBCASE("three partitions, seven actions, one loop") {
    // Hand count of act_study_desk.puml: 2 + 2 + 3 actions, a single while.
    const auto r = parse_activity(fixtures::diagram("act_study_desk.puml"));
    REQUIRE(r.ok());
    const auto st = diagram_stats(r.value());
    CHECK(st.action_count == 7);
    CHECK(st.branch_count == 0);
    CHECK(st.loop_count == 1);
    CHECK(st.partition_keys == std::vector{PartitionKey::messy_areas(), PartitionKey::priority_order(),
                                           PartitionKey::specific_steps()});
  }
}

TEST_CASE("structural equality ignores line numbers only") {
  const auto a = parse_activity("@startuml\nstart\n:x;\nstop\n@enduml");
  const auto b = parse_activity("@startuml\n\n\nstart\n:x;\nstop\n@enduml");
  const auto c = parse_activity("@startuml\nstart\n:y;\nstop\n@enduml");
  REQUIRE((a.ok() && b.ok() && c.ok()));
  CHECK(structurally_equal(a.value(), b.value()));
  CHECK_FALSE(structurally_equal(a.value(), c.value()));
}
