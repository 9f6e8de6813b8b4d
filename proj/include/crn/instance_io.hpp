#pragma once

#include <filesystem>
#include <string>

#include "crn/model.hpp"

namespace crn {

// JSON document layout:
//   { "n_su": N, "n_free": m, "n_active": k,
//     "access": [[i, a], ...], "interference": [[i, b, g], ...],
//     "priority": [...], "theta": [...], "metadata": {...} }
// Doubles are written in shortest round-trip form, so load(save(x)) == x.

nlohmann::json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const nlohmann::json& doc);

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path);
ProblemInstance load_instance(const std::filesystem::path& path);

nlohmann::json assignment_to_json(const Assignment& assign);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace crn
