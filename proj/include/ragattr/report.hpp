#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ragattr/experiments.hpp"

namespace ragattr {

// Writes to a temporary sibling and renames over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Header: case_id,scenario,method,budget,seed,metric,k,value. Undefined
// values are written as "nan", k is empty where it does not apply.
std::string experiment_csv(const ExperimentResult& result);

nlohmann::ordered_json experiment_summary_json(const ExperimentResult& result);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace ragattr
