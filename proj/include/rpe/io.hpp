#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rpe/entropy.hpp"
#include "rpe/halfspace.hpp"
#include "rpe/oracle.hpp"
#include "rpe/point_set.hpp"
#include "rpe/restructure.hpp"

namespace rpe {

// shortest exact decimal: every double round-trips through %.17g
std::string format_g17(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// header x,y / x,y,z (c0,..,c{d-1} above 3-d); label column only when labels given
std::string points_to_csv(const PointSet& S, const std::vector<uint32_t>* labels = nullptr);
PointSet points_from_csv(const std::string& text, std::vector<uint32_t>* labels_out = nullptr);

nlohmann::json points_to_json(const PointSet& S);
PointSet points_from_json(const nlohmann::json& j);

nlohmann::json anchors_to_json(const AnchorSet& A);
AnchorSet anchors_from_json(const nlohmann::json& j);

nlohmann::json halfspaces_to_json(const HalfspaceSet& H);
HalfspaceSet halfspaces_from_json(const nlohmann::json& j);

nlohmann::json oracle_result_to_json(const OraclePartitionResult& r,
                                     const std::vector<ArrangementLine>* lines = nullptr);

std::string trace_to_csv(const std::vector<TraceRow>& trace);

nlohmann::json parse_json(const std::string& text); // parse errors -> validation_error

} // namespace rpe
