#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chronologic/report.hpp"

namespace {

using namespace chronologic;

EngineConfig make_config(const std::string& condition, double consistency_tol) {
    EngineConfig cfg;
    cfg.condition = condition_from_name(condition);
    cfg.tol.consistency_tol = consistency_tol;
    cfg.tol.validate();
    if (const char* cap = std::getenv("CHRONOLOGIC_MAX_HISTORIES")) {
        try {
            const long long v = std::stoll(cap);
            if (v < 1) throw std::out_of_range("non-positive");
            cfg.max_histories = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw Error::parse(std::string("CHRONOLOGIC_MAX_HISTORIES: invalid value '") + cap +
                               "'");
        }
    }
    return cfg;
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& raw) {
    std::map<std::string, std::string> params;
    for (const std::string& kv : raw) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error::parse("--param expects key=value, got '" + kv + "'");
        params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return params;
}

int run(int argc, char** argv) {
    CLI::App app{"consistent-histories analysis engine"};
    app.require_subcommand(1);

    std::string condition = "medium";
    double tol = ToleranceConfig{}.consistency_tol;
    std::string format = "text";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--condition", condition, "consistency condition: weak|medium")
            ->check(CLI::IsMember({"weak", "medium"}));
        cmd->add_option("--tol", tol, "consistency tolerance (normalized violations)");
        cmd->add_option("--format", format, "output format: text|json")
            ->check(CLI::IsMember({"text", "json"}));
    };

    std::string file;
    CLI::App* analyze = app.add_subcommand("analyze", "run the queries in a scenario file");
    analyze->add_option("file", file, "scenario JSON file")->required();
    add_common(analyze);

    CLI::App* scenario = app.add_subcommand("scenario", "built-in scenarios");
    scenario->require_subcommand(1);

    CLI::App* list = scenario->add_subcommand("list", "list built-in scenarios");
    list->add_option("--format", format, "output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));

    std::string name;
    std::vector<std::string> raw_params;
    CLI::App* run_cmd =
        scenario->add_subcommand("run", "build a scenario and evaluate its expectations");
    run_cmd->add_option("name", name, "scenario name (see: scenario list)")->required();
    run_cmd->add_option("--param", raw_params, "scenario parameter key=value (repeatable)");
    add_common(run_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error [parse]: " << e.what() << "\n";
        return static_cast<int>(ErrorCategory::parse);
    }

    const ReportFormat fmt = report_format_from_name(format);

    if (analyze->parsed()) {
        const EngineConfig cfg = make_config(condition, tol);
        const ScenarioSpec spec = load_scenario_file(file, cfg);
        std::cout << format_report(run_query(spec, cfg), fmt);
        return 0;
    }

    if (list->parsed()) {
        if (fmt == ReportFormat::json) {
            nlohmann::ordered_json doc = nlohmann::ordered_json::array();
            for (const ScenarioInfo& info : list_scenarios()) {
                nlohmann::ordered_json params = nlohmann::ordered_json::array();
                for (const ScenarioParamDoc& p : info.params)
                    params.push_back(
                        {{"name", p.name}, {"description", p.description}, {"default", p.default_value}});
                doc.push_back({{"name", info.name},
                               {"description", info.description},
                               {"params", std::move(params)}});
            }
            std::cout << doc.dump(2) << "\n";
        } else {
            for (const ScenarioInfo& info : list_scenarios()) {
                std::cout << info.name << "\n  " << info.description << "\n";
                for (const ScenarioParamDoc& p : info.params)
                    std::cout << "    --param " << p.name << "=<" << p.description
                              << "> (default " << p.default_value << ")\n";
            }
        }
        return 0;
    }

    // scenario run
    const EngineConfig cfg = make_config(condition, tol);
    const auto params = parse_params(raw_params);
    for (const ScenarioInfo& info : list_scenarios()) {
        if (info.name == name && info.is_sweep) {
            std::cout << format_report(sweep_report(run_sweep(name, params, cfg), params), fmt);
            return 0;
        }
    }
    const Scenario s = make_scenario(name, params, cfg);
    bool all_passed = false;
    std::cout << format_report(scenario_report(s, cfg, all_passed), fmt);
    return all_passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error [" << category_name(e.category()) << "]: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error [internal]: " << e.what() << "\n";
        return 1;
    }
}
