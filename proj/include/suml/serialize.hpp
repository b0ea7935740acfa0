#pragma once

#include <json.hpp>

#include "suml/cue_stats.hpp"
#include "suml/data.hpp"
#include "suml/eval.hpp"
#include "suml/synthetic.hpp"
#include "suml/trainer.hpp"

namespace suml {

// All record files use insertion-ordered JSON so that serialization is
// deterministic byte-for-byte.
using Json = nlohmann::ordered_json;

Json instance_to_json(const Instance& instance);
Instance instance_from_json(const Json& j);

Json gen_config_to_json(const GenConfig& cfg);
// strict=true rejects unknown keys (config-file surface).
GenConfig gen_config_from_json(const Json& j, bool strict = true);

Json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j, bool strict = true);

Json checkpoint_to_json(const Checkpoint& cp);
Checkpoint checkpoint_from_json(const Json& j);

Json history_to_json(const TrainHistory& history);
TrainHistory history_from_json(const Json& j);

Json cue_report_to_json(const CueReport& report);
CueReport cue_report_from_json(const Json& j);

Json split_report_to_json(const SplitReport& report);
SplitReport split_report_from_json(const Json& j);

Json eval_report_to_json(const EvalReport& report);
EvalReport eval_report_from_json(const Json& j);

void write_json_file(const Json& j, const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);

}  // namespace suml
