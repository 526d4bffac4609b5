#pragma once

#include <string>

#include <json.hpp>

#include "glai/glai_model.hpp"
#include "glai/mlp.hpp"
#include "glai/report.hpp"

namespace glai {

using Json = nlohmann::json;

// All documents carry a format_version field; reals round-trip exactly.

Json model_to_json(const MlpModel& m, const Json& training_meta = Json());
MlpModel model_from_json(const Json& j);

Json path_table_to_json(const PathTable& table);
PathTable path_table_from_json(const Json& j);

Json parity_to_json(const ParityLedger& p);
ParityLedger parity_from_json(const Json& j);

Json prune_report_to_json(const PruneReport& r);
PruneReport prune_report_from_json(const Json& j);

Json glai_to_json(const GlaiModel& g);
GlaiModel glai_from_json(const Json& j);

Json run_report_to_json(const RunReport& r);
RunReport run_report_from_json(const Json& j);

Json comparison_to_json(const ComparisonReport& r);
ComparisonReport comparison_from_json(const Json& j);

// phase,epoch,train_loss,val_loss,val_acc,m_t,seconds with empty cells for
// absent values.
std::string metrics_csv(const std::vector<EpochRecord>& records);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace glai
