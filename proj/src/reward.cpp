#include "oowm/reward.hpp"

#include <algorithm>

#include "oowm/error.hpp"
#include "oowm/parser.hpp"
#include "text_util.hpp"

namespace oowm {

std::string_view to_string(Paradigm p) { return p == Paradigm::oowm ? "oowm" : "text"; }

Paradigm paradigm_from_string(std::string_view s) {
  if (s == "oowm") return Paradigm::oowm;
  if (s == "text") return Paradigm::text;
  throw Error(ErrorKind::invalid_paradigm, "unknown paradigm \"" + std::string(s) + "\"");
}

std::string to_string(const FailureCause& cause) {
  switch (cause.kind) {
    case FailureCause::Kind::no_envelope: return "no_envelope";
    case FailureCause::Kind::uml_syntax: return "uml_syntax";
    case FailureCause::Kind::service_error: return "service_error";
    case FailureCause::Kind::missing_partition:
      return "missing_partition(" + (cause.partition ? to_string(*cause.partition) : "") + ")";
  }
  return "uml_syntax";
}

namespace {

// References may be stored bare or wrapped like a model output.
std::string reference_payload(std::string_view reference) {
  if (reference.find("<answer>") != std::string_view::npos) {
    Envelope env = split_envelope(reference, {.require_think_first = false});
    if (env.answer) return *env.answer;
  }
  return std::string(detail::trim(reference));
}

void score_structured(const std::string& answer, const std::string& reference,
                      const EmbeddingProvider& provider, const RewardOptions& options,
                      RewardBreakdown& out) {
  auto ref = parse_activity(reference, ParseMode::lenient);
  if (!ref)
    throw Error(ErrorKind::reference_parse_error,
                "reference diagram does not parse: " + std::string(to_string(ref.error().kind)) +
                    " at line " + std::to_string(ref.error().line) + ": " + ref.error().message);

  const auto& keys = scored_partitions();
  for (const auto& key : keys) {
    PartitionScore s;
    s.key = key;
    s.in_reference = ref.value().find_partition(key) != nullptr;
    if (!s.in_reference) out.reference_defects.push_back("reference lacks partition " + to_string(key));
    out.partition_scores.push_back(std::move(s));
  }

  if (!check_markers(answer)) {
    out.failure_cause = FailureCause{FailureCause::Kind::uml_syntax, std::nullopt};
    return;
  }
  auto pred = parse_activity(answer, ParseMode::lenient);
  if (!pred) {
    out.failure_cause = FailureCause{FailureCause::Kind::uml_syntax, std::nullopt};
    return;
  }

  // One embedding batch for every node on both sides, split back per partition.
  std::vector<std::string> texts;
  struct Slice {
    std::size_t pred_begin, pred_count, ref_begin, ref_count;
  };
  std::vector<Slice> slices;
  for (auto& s : out.partition_scores) {
    s.in_prediction = pred.value().find_partition(s.key) != nullptr;
    Slice slice{texts.size(), 0, 0, 0};
    if (s.in_prediction && s.in_reference) {
      for (auto& n : collect_action_nodes(pred.value(), s.key, options.collect)) texts.push_back(std::move(n.text));
      slice.pred_count = texts.size() - slice.pred_begin;
      slice.ref_begin = texts.size();
      for (auto& n : collect_action_nodes(ref.value(), s.key, options.collect)) texts.push_back(std::move(n.text));
      slice.ref_count = texts.size() - slice.ref_begin;
    }
    slices.push_back(slice);
    if (!s.in_prediction && !out.failure_cause)
      out.failure_cause = FailureCause{FailureCause::Kind::missing_partition, s.key};
  }

  std::vector<EmbeddingVector> vectors;
  if (!texts.empty()) vectors = embed_batch(provider, texts);

  double sum = 0.0;
  for (std::size_t k = 0; k < out.partition_scores.size(); ++k) {
    auto& s = out.partition_scores[k];
    const Slice& slice = slices[k];
    if (s.in_prediction && s.in_reference) {
      std::vector<EmbeddingVector> p(vectors.begin() + static_cast<std::ptrdiff_t>(slice.pred_begin),
                                     vectors.begin() + static_cast<std::ptrdiff_t>(slice.pred_begin + slice.pred_count));
      std::vector<EmbeddingVector> r(vectors.begin() + static_cast<std::ptrdiff_t>(slice.ref_begin),
                                     vectors.begin() + static_cast<std::ptrdiff_t>(slice.ref_begin + slice.ref_count));
      s.match = greedy_match(p, r);
      s.score = partition_reward(s.match);
    }
    sum += s.score;
  }
  out.r_semantic = sum / static_cast<double>(out.partition_scores.size());
}

void score_text(const std::string& answer, const std::string& reference,
                const EmbeddingProvider& provider, RewardBreakdown& out) {
  const std::vector<std::string> texts{answer, reference};
  const auto v = embed_batch(provider, texts);
  out.r_semantic = std::clamp(cosine(v[0], v[1]), 0.0, 1.0);
}

}  // namespace

RewardBreakdown compute_reward(const RewardRequest& request, const EmbeddingProvider& provider,
                               const RewardOptions& options) {
  const std::string reference = reference_payload(request.reference_control);
  if (reference.empty()) throw Error(ErrorKind::reference_parse_error, "reference is empty");

  RewardBreakdown out;
  out.paradigm = request.paradigm;

  const Envelope env = split_envelope(request.prediction_raw, options.envelope);
  out.r_struct = structural_reward(env);
  out.envelope_defects = env.defects;

  if (!env.answer) {
    // Nothing to score; the reference is still validated for the structured paradigm.
    if (request.paradigm == Paradigm::oowm) {
      score_structured("", reference, provider, options, out);
    }
    out.failure_cause = FailureCause{FailureCause::Kind::no_envelope, std::nullopt};
  } else if (request.paradigm == Paradigm::oowm) {
    score_structured(*env.answer, reference, provider, options, out);
  } else {
    score_text(*env.answer, reference, provider, out);
  }

  out.r_total = out.r_struct + out.r_semantic;
  return out;
}

}  // namespace oowm
