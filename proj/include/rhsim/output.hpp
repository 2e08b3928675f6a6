#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rhsim/experiments.hpp"

namespace rhsim {

inline constexpr const char* kToolVersion = "0.1.0";

/// %.6g; integers print without exponent up to six digits.
std::string format_number(double v);

/// The probability a scheme samples with: 1 for the baseline, sampling_p,
/// or mitigate_p for PARA. Empty for schemes without one.
std::string sampled_p_text(const PolicySpec& p);

const std::vector<std::string>& sweep_csv_columns();

/// One row per (axis value, pattern) followed by one summary row per axis
/// value (pattern_id "suite", kind "summary", headline statistics).
std::string sweep_csv(const std::vector<SweepRow>& rows);

nlohmann::json config_json(const SimConfig& config);
/// Deterministic summary of a sweep; `manifest_name` points at the manifest.
nlohmann::json sweep_summary_json(const std::vector<SweepRow>& rows, const std::string& manifest_name);
/// Resolved configuration plus output paths and wall-clock metadata.
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& resolved,
                             const std::vector<std::string>& outputs, double wall_seconds);

/// Writes `path` through a temporary sibling and a rename, so readers never see
/// a partial file.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace rhsim
