#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oowm {

// ---------------------------------------------------------------------------
// Partition keys
// ---------------------------------------------------------------------------

enum class PartitionKind { messy_areas, priority_order, specific_steps, other };

/// Canonical identity of a partition. For `other`, `text` holds the
/// canonicalized name so that distinct unknown partitions stay distinct.
struct PartitionKey {
  PartitionKind kind = PartitionKind::other;
  std::string text;

  static PartitionKey messy_areas() { return {PartitionKind::messy_areas, {}}; }
  static PartitionKey priority_order() { return {PartitionKind::priority_order, {}}; }
  static PartitionKey specific_steps() { return {PartitionKind::specific_steps, {}}; }

  bool operator==(const PartitionKey&) const = default;
};

/// Lowercase, drop non-alphanumerics, then classify by contained keyword.
PartitionKey canonical_partition_key(std::string_view raw_name);

/// "messy_areas", "priority_order", "specific_steps" or "other:<text>".
std::string to_string(const PartitionKey& key);
std::optional<PartitionKey> partition_key_from_string(std::string_view s);

/// The three partitions every plan is scored on, in scoring order.
inline const std::vector<PartitionKey>& scored_partitions() {
  static const std::vector<PartitionKey> keys{PartitionKey::messy_areas(),
                                              PartitionKey::priority_order(),
                                              PartitionKey::specific_steps()};
  return keys;
}

// ---------------------------------------------------------------------------
// Activity diagrams (control policy)
// ---------------------------------------------------------------------------

struct ActionNode {
  std::string text;
  int source_line = 1;

  bool operator==(const ActionNode&) const = default;
};

struct FlowElement;

struct Branch {
  std::string condition;
  std::vector<FlowElement> then_body;
  std::vector<FlowElement> else_body;
  int source_line = 1;
};

enum class LoopKind { while_loop, repeat_loop };

struct Loop {
  LoopKind kind = LoopKind::while_loop;
  std::string condition;
  std::vector<FlowElement> body;
  int source_line = 1;
};

struct FlowElement {
  std::variant<ActionNode, Branch, Loop> node;
};

struct Partition {
  std::string raw_name;
  PartitionKey canonical_key;
  std::vector<FlowElement> body;
};

struct ActivityDiagram {
  std::vector<Partition> partitions;
  std::vector<ActionNode> preamble_actions;
  bool has_start = false;
  bool has_stop = false;

  const Partition* find_partition(const PartitionKey& key) const;
};

struct CollectOptions {
  // Branch and loop conditions are control metadata, not actions. Setting
  // this emits each condition as a node at its position in document order.
  bool include_conditions = false;
};

/// Actions of one partition in document order, flattening branch and loop
/// bodies depth-first. Empty when the partition is absent.
std::vector<ActionNode> collect_action_nodes(const ActivityDiagram& diagram,
                                             const PartitionKey& key,
                                             const CollectOptions& options = {});

struct DiagramStats {
  int action_count = 0;
  int branch_count = 0;
  int loop_count = 0;
  int max_depth = 0;  // partitions are depth 1; each branch/loop adds one
  std::vector<PartitionKey> partition_keys;

  bool operator==(const DiagramStats&) const = default;
};

DiagramStats diagram_stats(const ActivityDiagram& diagram);

/// Equality ignoring source line numbers.
bool structurally_equal(const ActivityDiagram& a, const ActivityDiagram& b);

// ---------------------------------------------------------------------------
// Class diagrams (state abstraction)
// ---------------------------------------------------------------------------

struct Attribute {
  std::string name;
  std::optional<std::string> type;

  bool operator==(const Attribute&) const = default;
};

struct ClassDecl {
  std::string name;
  std::vector<Attribute> attributes;
  std::vector<std::string> methods;
  std::optional<std::string> alias;  // `class "Long Name" as Short`

  bool operator==(const ClassDecl&) const = default;
};

enum class RelationKind { inheritance, aggregation, composition, association };

std::string_view to_string(RelationKind kind);
std::optional<RelationKind> relation_kind_from_string(std::string_view s);

/// `from` is the child for inheritance and the whole for aggregation and
/// composition.
struct Relation {
  RelationKind kind = RelationKind::association;
  std::string from;
  std::string to;
  std::optional<std::string> label;
  bool from_dangling = false;
  bool to_dangling = false;

  bool operator==(const Relation&) const = default;
};

struct ClassDiagram {
  std::vector<ClassDecl> classes;
  std::vector<Relation> relations;

  const ClassDecl* find_class(std::string_view name) const;

  bool operator==(const ClassDiagram&) const = default;
};

/// Recomputes the dangling flags of every relation against the declared classes.
void flag_dangling_relations(ClassDiagram& diagram);

inline bool structurally_equal(const ClassDiagram& a, const ClassDiagram& b) { return a == b; }

}  // namespace oowm
