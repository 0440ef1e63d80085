#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oowm/alignment.hpp"
#include "oowm/diagram.hpp"
#include "oowm/embedding.hpp"
#include "oowm/envelope.hpp"

namespace oowm {

enum class Paradigm { oowm, text };

std::string_view to_string(Paradigm p);
/// Throws Error(invalid_paradigm) for anything but "oowm" or "text".
Paradigm paradigm_from_string(std::string_view s);

struct FailureCause {
  enum class Kind { no_envelope, uml_syntax, missing_partition, service_error };
  Kind kind = Kind::uml_syntax;
  std::optional<PartitionKey> partition;  // set for missing_partition

  bool operator==(const FailureCause&) const = default;
};

/// "no_envelope", "uml_syntax", "missing_partition(<key>)" or "service_error".
std::string to_string(const FailureCause& cause);

struct PartitionScore {
  PartitionKey key;
  double score = 0.0;
  bool in_prediction = false;
  bool in_reference = false;
  MatchSet match;
};

struct RewardBreakdown {
  double r_struct = 0.0;
  double r_semantic = 0.0;
  double r_total = 0.0;
  Paradigm paradigm = Paradigm::oowm;
  std::vector<PartitionScore> partition_scores;  // the three scored partitions, oowm only
  std::optional<FailureCause> failure_cause;
  std::vector<EnvelopeDefect> envelope_defects;
  std::vector<std::string> reference_defects;  // dataset lint findings, never model penalties
};

struct RewardRequest {
  std::string prediction_raw;
  std::string reference_control;
  Paradigm paradigm = Paradigm::oowm;
};

struct RewardOptions {
  EnvelopeOptions envelope;
  CollectOptions collect;
};

/// Total reward r_struct + r_semantic for one model output.
///
/// r_struct is the envelope check. For the structured paradigm r_semantic
/// cascades: the answer payload must carry @startuml/@enduml markers and
/// parse, then each of the three scored partitions is greedily aligned
/// against the reference and the partition rewards are averaged. A partition
/// absent from the prediction scores 0. For the text paradigm r_semantic is
/// the clamped cosine between the answer payload and the reference.
///
/// Throws Error(reference_parse_error) when the reference itself is
/// unusable, and lets Error(service_unavailable) from the provider escape so
/// infrastructure failures are never mistaken for a zero reward.
RewardBreakdown compute_reward(const RewardRequest& request, const EmbeddingProvider& provider,
                               const RewardOptions& options = {});

}  // namespace oowm
