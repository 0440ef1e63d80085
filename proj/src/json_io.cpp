#include "oowm/json_io.hpp"

namespace oowm {

namespace {

using ojson = nlohmann::ordered_json;

ojson body_to_json(const std::vector<FlowElement>& body);

ojson element_to_json(const FlowElement& e) {
  ojson j;
  if (const auto* a = std::get_if<ActionNode>(&e.node)) {
    j["type"] = "action";
    j["text"] = a->text;
    j["line"] = a->source_line;
  } else if (const auto* b = std::get_if<Branch>(&e.node)) {
    j["type"] = "branch";
    j["condition"] = b->condition;
    j["line"] = b->source_line;
    j["then"] = body_to_json(b->then_body);
    j["else"] = body_to_json(b->else_body);
  } else if (const auto* l = std::get_if<Loop>(&e.node)) {
    j["type"] = "loop";
    j["loop"] = l->kind == LoopKind::while_loop ? "while" : "repeat";
    j["condition"] = l->condition;
    j["line"] = l->source_line;
    j["body"] = body_to_json(l->body);
  }
  return j;
}

ojson body_to_json(const std::vector<FlowElement>& body) {
  ojson arr = ojson::array();
  for (const auto& e : body) arr.push_back(element_to_json(e));
  return arr;
}

}  // namespace

ojson to_json(const ActivityDiagram& d) {
  ojson j;
  j["kind"] = "activity";
  j["has_start"] = d.has_start;
  j["has_stop"] = d.has_stop;
  ojson pre = ojson::array();
  for (const auto& a : d.preamble_actions) pre.push_back({{"text", a.text}, {"line", a.source_line}});
  j["preamble_actions"] = std::move(pre);
  ojson parts = ojson::array();
  for (const auto& p : d.partitions) {
    ojson pj;
    pj["name"] = p.raw_name;
    pj["key"] = to_string(p.canonical_key);
    pj["body"] = body_to_json(p.body);
    parts.push_back(std::move(pj));
  }
  j["partitions"] = std::move(parts);
  j["stats"] = to_json(diagram_stats(d));
  return j;
}

ojson to_json(const ClassDiagram& d) {
  ojson j;
  j["kind"] = "class";
  ojson classes = ojson::array();
  for (const auto& c : d.classes) {
    ojson cj;
    cj["name"] = c.name;
    ojson attrs = ojson::array();
    for (const auto& a : c.attributes) {
      ojson aj;
      aj["name"] = a.name;
      aj["type"] = a.type ? ojson(*a.type) : ojson(nullptr);
      attrs.push_back(std::move(aj));
    }
    cj["attributes"] = std::move(attrs);
    cj["methods"] = c.methods;
    cj["alias"] = c.alias ? ojson(*c.alias) : ojson(nullptr);
    classes.push_back(std::move(cj));
  }
  j["classes"] = std::move(classes);
  ojson rels = ojson::array();
  for (const auto& r : d.relations) {
    ojson rj;
    rj["kind"] = to_string(r.kind);
    rj["from"] = r.from;
    rj["to"] = r.to;
    rj["label"] = r.label ? ojson(*r.label) : ojson(nullptr);
    rj["from_dangling"] = r.from_dangling;
    rj["to_dangling"] = r.to_dangling;
    rels.push_back(std::move(rj));
  }
  j["relations"] = std::move(rels);
  return j;
}

ojson to_json(const DiagramStats& s) {
  ojson j;
  j["action_count"] = s.action_count;
  j["branch_count"] = s.branch_count;
  j["loop_count"] = s.loop_count;
  j["max_depth"] = s.max_depth;
  ojson keys = ojson::array();
  for (const auto& k : s.partition_keys) keys.push_back(to_string(k));
  j["partition_keys"] = std::move(keys);
  return j;
}

ojson to_json(const ParseError& e) {
  return {{"kind", std::string(to_string(e.kind))}, {"line", e.line}, {"message", e.message}};
}

ojson to_json(const Envelope& env) {
  ojson j;
  j["well_formed"] = env.well_formed;
  ojson defects = ojson::array();
  for (auto d : env.defects) defects.push_back(std::string(to_string(d)));
  j["defects"] = std::move(defects);
  j["has_think"] = env.think.has_value();
  j["has_answer"] = env.answer.has_value();
  return j;
}

ojson to_json(const MatchSet& m) {
  ojson j;
  ojson pairs = ojson::array();
  for (const auto& p : m.pairs)
    pairs.push_back({{"pred", p.pred_index}, {"ref", p.ref_index}, {"similarity", p.similarity}});
  j["pairs"] = std::move(pairs);
  j["unmatched_pred"] = m.unmatched_pred;
  j["unmatched_ref"] = m.unmatched_ref;
  return j;
}

ojson to_json(const RewardBreakdown& r, bool explain) {
  ojson j;
  j["paradigm"] = std::string(to_string(r.paradigm));
  j["r_struct"] = r.r_struct;
  j["r_semantic"] = r.r_semantic;
  j["r_total"] = r.r_total;
  ojson scores = ojson::object();
  for (const auto& s : r.partition_scores) scores[to_string(s.key)] = s.score;
  j["partition_scores"] = std::move(scores);
  j["failure_cause"] = r.failure_cause ? ojson(to_string(*r.failure_cause)) : ojson(nullptr);
  ojson defects = ojson::array();
  for (auto d : r.envelope_defects) defects.push_back(std::string(to_string(d)));
  j["envelope_defects"] = std::move(defects);
  j["reference_defects"] = r.reference_defects;
  if (explain) {
    ojson matches = ojson::object();
    for (const auto& s : r.partition_scores) matches[to_string(s.key)] = to_json(s.match);
    j["matches"] = std::move(matches);
  }
  return j;
}

}  // namespace oowm
