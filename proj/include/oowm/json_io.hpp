#pragma once

// JSON views of the library types, shared by the CLI and any host bindings.
// Field names and order are part of the external interface; see docs/json-schema.md.

#include "json.hpp"
#include "oowm/alignment.hpp"
#include "oowm/diagram.hpp"
#include "oowm/envelope.hpp"
#include "oowm/parser.hpp"
#include "oowm/reward.hpp"

namespace oowm {

nlohmann::ordered_json to_json(const ActivityDiagram& diagram);
nlohmann::ordered_json to_json(const ClassDiagram& diagram);
nlohmann::ordered_json to_json(const DiagramStats& stats);
nlohmann::ordered_json to_json(const ParseError& error);
nlohmann::ordered_json to_json(const Envelope& envelope);
nlohmann::ordered_json to_json(const MatchSet& match);

/// With `explain`, adds the per-partition MatchSets under "matches".
nlohmann::ordered_json to_json(const RewardBreakdown& reward, bool explain = false);

}  // namespace oowm
