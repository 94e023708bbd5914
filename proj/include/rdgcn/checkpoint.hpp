#pragma once

#include <string>

#include <json.hpp>

#include "rdgcn/training.hpp"

namespace rdgcn {

// JSON forms. Doubles rely on the shortest round-trip printing of the JSON
// library, so a save/load cycle restores bit-identical values.
nlohmann::json to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EvalReport& report);

nlohmann::json to_json(const Trainer::Snapshot& snap);
Trainer::Snapshot snapshot_from_json(const nlohmann::json& j);

void save_checkpoint(const Trainer::Snapshot& snap, const std::string& path);
Trainer::Snapshot load_checkpoint(const std::string& path);

// Run reporting. The metrics document carries no timestamps: identical runs
// serialize byte-identically.
nlohmann::json metrics_json(const TrainConfig& cfg, const std::vector<EpochStats>& epochs,
                            const EvalReport& final_report, const std::string& trace_path);
std::string bandit_trace_csv(const std::vector<BanditTraceRow>& trace);

// build-graph dump: one JSON object for one sentence's views.
nlohmann::json views_json(const SyntacticViews& views, const TypeVocab& vocab);
SyntacticViews views_from_json(const nlohmann::json& j);

}  // namespace rdgcn
