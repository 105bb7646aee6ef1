#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "chronologic/scenario_file.hpp"
#include "chronologic/scenarios.hpp"

namespace chronologic {

enum class ReportFormat { text, json };

ReportFormat report_format_from_name(const std::string& name);

/// A finished analysis: deterministic for a fixed spec and configuration.
/// The document carries the query echoes, verdicts and numbers, and the
/// engine configuration; text and JSON renderings contain identical values.
struct Report {
    nlohmann::ordered_json doc;

    bool operator==(const Report&) const = default;
};

/// Executes each query in file order against the spec's family.
/// Engine errors are surfaced with the offending query index.
Report run_query(const ScenarioSpec& spec, const EngineConfig& cfg = {});

/// Evaluates a built-in scenario's expectations. `all_passed` reports whether
/// every expectation met its tolerance.
Report scenario_report(const Scenario& scenario, const EngineConfig& cfg, bool& all_passed);

/// Formats a decoherence sweep result table.
Report sweep_report(const std::vector<std::pair<std::size_t, double>>& sweep,
                    const std::map<std::string, std::string>& params);

std::string format_report(const Report& r, ReportFormat format);

/// Inverse of the JSON rendering; value-identical to the original report.
Report report_from_json(std::string_view bytes);

} // namespace chronologic
