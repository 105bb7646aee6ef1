#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "chronologic/logic.hpp"

namespace chronologic {

struct ConsistencyQuery {};

struct ProbabilityQuery {
    std::string proposition;
    bool unchecked = false;
};

struct ConditionalQuery {
    std::string given;
    std::string then;
};

struct ImplicationQuery {
    std::string premise;
    std::string conclusion;
};

struct Rule4Query {
    std::vector<std::pair<std::string, std::string>> steps;
};

/// Compatibility against a sibling family sharing everything but the
/// decompositions, which are given inline.
struct CompatibilityQuery {
    std::vector<Decomposition> decompositions;
};

struct Query {
    nlohmann::ordered_json echo; ///< the query object as written in the file
    std::variant<ConsistencyQuery, ProbabilityQuery, ConditionalQuery, ImplicationQuery,
                 Rule4Query, CompatibilityQuery>
        payload;
};

/// A scenario file resolved into engine objects. Parsing is strict: unknown
/// fields are rejected with their paths, and physics validation failures are
/// located by index.
struct ScenarioSpec {
    HilbertSpace space;
    FamilyPtr family;
    std::map<std::string, Proposition> propositions;
    std::vector<Query> queries;
};

ScenarioSpec parse_scenario_file(std::string_view bytes, const EngineConfig& cfg = {});

/// Reads and parses a scenario file from disk.
ScenarioSpec load_scenario_file(const std::string& path, const EngineConfig& cfg = {});

} // namespace chronologic
