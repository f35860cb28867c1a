#pragma once

#include "sparsefact/hierarchy.hpp"

#include <json.hpp>

namespace sparsefact {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// Constraint sets serialize as {"type": "sp"|"spcol"|"sprow"|"none",
// "p"/"k": budget, "shape": [rows, cols]}.  Parsers throw
// std::runtime_error with a readable message on malformed input.
Json to_json(const ConstraintSet& set);
ConstraintSet constraint_from_json(const Json& j);

Json to_json(const PalmConfig& cfg);  // block_observer is not serialized
PalmConfig palm_config_from_json(const Json& j);

Json to_json(const SplitSchedule& schedule);
SplitSchedule schedule_from_json(const Json& j);

Json to_json(const CooMatrix& m);
CooMatrix coo_from_json(const Json& j);

Json to_json(const FactorizationReport& rep);

// Schedule file wrapper used by the command line: the schedule plus an
// optional "palm" config block and an optional "rc_dict_factors" count.
struct ScheduleFile {
  SplitSchedule schedule;
  PalmConfig palm;
  Index rc_dict_factors = -1;
};
ScheduleFile schedule_file_from_json(const Json& j);

}  // namespace sparsefact
