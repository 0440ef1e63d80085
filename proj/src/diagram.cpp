#include "oowm/diagram.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace oowm {

PartitionKey canonical_partition_key(std::string_view raw_name) {
  std::string folded;
  folded.reserve(raw_name.size());
  for (unsigned char c : raw_name) {
    if (std::isalnum(c)) folded.push_back(static_cast<char>(std::tolower(c)));
  }
  if (folded.find("messy") != std::string::npos) return PartitionKey::messy_areas();
  if (folded.find("priorit") != std::string::npos) return PartitionKey::priority_order();
  if (folded.find("step") != std::string::npos) return PartitionKey::specific_steps();
  return {PartitionKind::other, std::move(folded)};
}

std::string to_string(const PartitionKey& key) {
  switch (key.kind) {
    case PartitionKind::messy_areas: return "messy_areas";
    case PartitionKind::priority_order: return "priority_order";
    case PartitionKind::specific_steps: return "specific_steps";
    case PartitionKind::other: break;
  }
  return "other:" + key.text;
}

std::optional<PartitionKey> partition_key_from_string(std::string_view s) {
  if (s == "messy_areas") return PartitionKey::messy_areas();
  if (s == "priority_order") return PartitionKey::priority_order();
  if (s == "specific_steps") return PartitionKey::specific_steps();
  if (s.starts_with("other:")) return PartitionKey{PartitionKind::other, std::string(s.substr(6))};
  return std::nullopt;
}

const Partition* ActivityDiagram::find_partition(const PartitionKey& key) const {
  auto it = std::find_if(partitions.begin(), partitions.end(),
                         [&](const Partition& p) { return p.canonical_key == key; });
  return it == partitions.end() ? nullptr : &*it;
}

namespace {

void flatten(const std::vector<FlowElement>& body, const CollectOptions& options,
             std::vector<ActionNode>& out) {
  for (const auto& element : body) {
    if (const auto* action = std::get_if<ActionNode>(&element.node)) {
      out.push_back(*action);
    } else if (const auto* branch = std::get_if<Branch>(&element.node)) {
      if (options.include_conditions && !branch->condition.empty())
        out.push_back({branch->condition, branch->source_line});
      flatten(branch->then_body, options, out);
      flatten(branch->else_body, options, out);
    } else if (const auto* loop = std::get_if<Loop>(&element.node)) {
      // A while condition is written before its body, a repeat condition after.
      const bool emit = options.include_conditions && !loop->condition.empty();
      if (emit && loop->kind == LoopKind::while_loop)
        out.push_back({loop->condition, loop->source_line});
      flatten(loop->body, options, out);
      if (emit && loop->kind == LoopKind::repeat_loop)
        out.push_back({loop->condition, loop->source_line});
    }
  }
}

void tally(const std::vector<FlowElement>& body, int depth, DiagramStats& stats) {
  stats.max_depth = std::max(stats.max_depth, depth);
  for (const auto& element : body) {
    if (std::holds_alternative<ActionNode>(element.node)) {
      ++stats.action_count;
    } else if (const auto* branch = std::get_if<Branch>(&element.node)) {
      ++stats.branch_count;
      stats.max_depth = std::max(stats.max_depth, depth + 1);
      tally(branch->then_body, depth + 1, stats);
      tally(branch->else_body, depth + 1, stats);
    } else if (const auto* loop = std::get_if<Loop>(&element.node)) {
      ++stats.loop_count;
      stats.max_depth = std::max(stats.max_depth, depth + 1);
      tally(loop->body, depth + 1, stats);
    }
  }
}

bool bodies_equal(const std::vector<FlowElement>& a, const std::vector<FlowElement>& b);

bool elements_equal(const FlowElement& a, const FlowElement& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* x = std::get_if<ActionNode>(&a.node))
    return x->text == std::get<ActionNode>(b.node).text;
  if (const auto* x = std::get_if<Branch>(&a.node)) {
    const auto& y = std::get<Branch>(b.node);
    return x->condition == y.condition && bodies_equal(x->then_body, y.then_body) &&
           bodies_equal(x->else_body, y.else_body);
  }
  const auto& x = std::get<Loop>(a.node);
  const auto& y = std::get<Loop>(b.node);
  return x.kind == y.kind && x.condition == y.condition && bodies_equal(x.body, y.body);
}

bool bodies_equal(const std::vector<FlowElement>& a, const std::vector<FlowElement>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), elements_equal);
}

}  // namespace

std::vector<ActionNode> collect_action_nodes(const ActivityDiagram& diagram,
                                             const PartitionKey& key,
                                             const CollectOptions& options) {
  std::vector<ActionNode> out;
  if (const Partition* p = diagram.find_partition(key)) flatten(p->body, options, out);
  return out;
}

DiagramStats diagram_stats(const ActivityDiagram& diagram) {
  DiagramStats stats;
  stats.action_count = static_cast<int>(diagram.preamble_actions.size());
  for (const auto& p : diagram.partitions) {
    stats.partition_keys.push_back(p.canonical_key);
    tally(p.body, 1, stats);
  }
  return stats;
}

bool structurally_equal(const ActivityDiagram& a, const ActivityDiagram& b) {
  if (a.has_start != b.has_start || a.has_stop != b.has_stop) return false;
  if (!std::equal(a.preamble_actions.begin(), a.preamble_actions.end(),
                  b.preamble_actions.begin(), b.preamble_actions.end(),
                  [](const ActionNode& x, const ActionNode& y) { return x.text == y.text; }))
    return false;
  return std::equal(a.partitions.begin(), a.partitions.end(), b.partitions.begin(),
                    b.partitions.end(), [](const Partition& x, const Partition& y) {
                      return x.raw_name == y.raw_name && x.canonical_key == y.canonical_key &&
                             bodies_equal(x.body, y.body);
                    });
}

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::inheritance: return "inheritance";
    case RelationKind::aggregation: return "aggregation";
    case RelationKind::composition: return "composition";
    case RelationKind::association: return "association";
  }
  return "association";
}

std::optional<RelationKind> relation_kind_from_string(std::string_view s) {
  if (s == "inheritance") return RelationKind::inheritance;
  if (s == "aggregation") return RelationKind::aggregation;
  if (s == "composition") return RelationKind::composition;
  if (s == "association") return RelationKind::association;
  return std::nullopt;
}

const ClassDecl* ClassDiagram::find_class(std::string_view name) const {
  auto it = std::find_if(classes.begin(), classes.end(),
                         [&](const ClassDecl& c) { return c.name == name || c.alias == name; });
  return it == classes.end() ? nullptr : &*it;
}

void flag_dangling_relations(ClassDiagram& diagram) {
  std::unordered_set<std::string> declared;
  for (const auto& c : diagram.classes) {
    declared.insert(c.name);
    if (c.alias) declared.insert(*c.alias);
  }
  for (auto& r : diagram.relations) {
    r.from_dangling = !declared.contains(r.from);
    r.to_dangling = !declared.contains(r.to);
  }
}

}  // namespace oowm
