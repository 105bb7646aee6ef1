#include "chronologic/report.hpp"

#include <cstdio>
#include <sstream>

namespace chronologic {

namespace {

using json = nlohmann::ordered_json;

json engine_echo(const EngineConfig& cfg) {
    return {{"condition", condition_name(cfg.condition)},
            {"structural_tol", cfg.tol.structural_tol},
            {"consistency_tol", cfg.tol.consistency_tol},
            {"probability_tol", cfg.tol.probability_tol},
            {"max_histories", cfg.max_histories}};
}

json family_echo(const FamilyPtr& family) {
    return {{"dimension", family->space.total_dim()},
            {"times", family->num_times()},
            {"histories", family->num_histories()}};
}

json consistency_json(const ConsistencyReport& report) {
    json pairs = json::array();
    for (const ViolatingPair& p : report.violating_pairs)
        pairs.push_back({{"alpha", p.alpha}, {"beta", p.beta}, {"magnitude", p.magnitude}});
    return {{"condition", condition_name(report.condition)},
            {"tolerance", report.tolerance},
            {"consistent", report.consistent},
            {"max_violation", report.max_violation},
            {"violating_pairs", std::move(pairs)}};
}

json rule4_json(const Rule4Report& report) {
    json failures = json::array();
    for (const Rule4Failure& f : report.failures) {
        json item;
        item["kind"] = rule4_failure_name(f.kind);
        if (f.step) item["step"] = *f.step;
        if (!f.premise.empty()) item["premise"] = f.premise;
        if (!f.conclusion.empty()) item["conclusion"] = f.conclusion;
        if (f.conditional) item["conditional"] = *f.conditional;
        if (f.consistency) item["consistency"] = consistency_json(*f.consistency);
        item["detail"] = f.detail;
        failures.push_back(std::move(item));
    }
    return {{"verdict", report.valid ? "valid" : "invalid"}, {"failures", std::move(failures)}};
}

double unchecked_probability(const DecoherenceMatrix& d, const Proposition& p) {
    double s = 0.0;
    for (std::size_t idx : p.member_set) s += d.entries(idx, idx).real();
    return s;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void render_text(const json& v, std::ostream& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (v.is_object()) {
        for (const auto& [key, value] : v.items()) {
            if (value.is_object() || value.is_array()) {
                out << pad << key << ":\n";
                render_text(value, out, indent + 1);
            } else if (value.is_number_float()) {
                out << pad << key << ": " << fmt17(value.get<double>()) << "\n";
            } else if (value.is_string()) {
                out << pad << key << ": " << value.get<std::string>() << "\n";
            } else {
                out << pad << key << ": " << value.dump() << "\n";
            }
        }
    } else if (v.is_array()) {
        std::size_t i = 0;
        for (const auto& value : v) {
            out << pad << "- [" << i++ << "]\n";
            render_text(value, out, indent + 1);
        }
        if (v.empty()) out << pad << "(none)\n";
    } else if (v.is_number_float()) {
        out << pad << fmt17(v.get<double>()) << "\n";
    } else {
        out << pad << v.dump() << "\n";
    }
}

} // namespace

ReportFormat report_format_from_name(const std::string& name) {
    if (name == "text") return ReportFormat::text;
    if (name == "json") return ReportFormat::json;
    throw Error::parse("unknown report format '" + name + "' (expected text|json)");
}

Report run_query(const ScenarioSpec& spec, const EngineConfig& cfg) {
    Report report;
    report.doc["engine"] = engine_echo(cfg);
    report.doc["family"] = family_echo(spec.family);
    json results = json::array();

    const DecoherenceMatrix d = decoherence_functional(spec.family, cfg);

    for (std::size_t i = 0; i < spec.queries.size(); ++i) {
        const Query& query = spec.queries[i];
        json entry;
        entry["query"] = query.echo;
        try {
            if (std::holds_alternative<ConsistencyQuery>(query.payload)) {
                entry["result"] = consistency_json(check_consistency(
                    d, cfg.condition, cfg.tol.consistency_tol, cfg.tol.structural_tol));
            } else if (const auto* pq = std::get_if<ProbabilityQuery>(&query.payload)) {
                const Proposition& prop = spec.propositions.at(pq->proposition);
                const double value = pq->unchecked ? unchecked_probability(d, prop)
                                                   : proposition_probability(d, prop, cfg);
                entry["result"] = {{"proposition", pq->proposition},
                                   {"unchecked", pq->unchecked},
                                   {"probability", value}};
            } else if (const auto* cq = std::get_if<ConditionalQuery>(&query.payload)) {
                const double value = conditional_probability(d, spec.propositions.at(cq->given),
                                                             spec.propositions.at(cq->then), cfg);
                entry["result"] = {
                    {"given", cq->given}, {"then", cq->then}, {"probability", value}};
            } else if (const auto* iq = std::get_if<ImplicationQuery>(&query.payload)) {
                const double conditional = conditional_probability(
                    d, spec.propositions.at(iq->premise), spec.propositions.at(iq->conclusion),
                    cfg);
                entry["result"] = {{"premise", iq->premise},
                                   {"conclusion", iq->conclusion},
                                   {"conditional", conditional},
                                   {"tolerance", cfg.tol.probability_tol},
                                   {"holds", conditional >= 1.0 - cfg.tol.probability_tol}};
            } else if (const auto* rq = std::get_if<Rule4Query>(&query.payload)) {
                std::vector<std::pair<Proposition, Proposition>> steps;
                steps.reserve(rq->steps.size());
                for (const auto& [a, b] : rq->steps)
                    steps.emplace_back(spec.propositions.at(a), spec.propositions.at(b));
                entry["result"] = rule4_json(validate_reasoning_chain(spec.family, d, steps, cfg));
            } else {
                const auto& altq = std::get<CompatibilityQuery>(query.payload);
                std::vector<PropagatorSpec> props;
                for (const ComplexMatrix& u : spec.family->propagators) props.emplace_back(u);
                const FamilyPtr sibling =
                    build_family(spec.family->initial, spec.family->times, std::move(props),
                                 altq.decompositions, cfg);
                const CompatibilityReport comp =
                    families_compatible(spec.family, sibling, cfg.tol.consistency_tol, cfg);
                entry["result"] = {{"compatible", comp.compatible},
                                   {"reason", compatibility_reason_name(comp.reason)},
                                   {"detail", comp.detail}};
                if (comp.refinement_violation)
                    entry["result"]["refinement_violation"] = *comp.refinement_violation;
            }
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "query " << i << ": " << e.what();
            throw Error(e.category(), msg.str());
        }
        results.push_back(std::move(entry));
    }
    report.doc["queries"] = std::move(results);
    return report;
}

Report scenario_report(const Scenario& scenario, const EngineConfig& cfg, bool& all_passed) {
    Report report;
    report.doc["engine"] = engine_echo(cfg);
    report.doc["scenario"] = scenario.name;
    report.doc["family"] = family_echo(scenario.family);

    json props = json::array();
    for (const auto& [name, prop] : scenario.named_propositions)
        props.push_back({{"name", name}, {"histories", prop.member_set.size()}});
    report.doc["propositions"] = std::move(props);

    all_passed = true;
    json checks = json::array();
    for (const Expectation& e : scenario.expectations) {
        const double actual = e.evaluate();
        const bool pass = std::abs(actual - e.expected) <= e.tolerance;
        all_passed = all_passed && pass;
        checks.push_back({{"description", e.description},
                          {"quantity", e.quantity},
                          {"expected", e.expected},
                          {"actual", actual},
                          {"tolerance", e.tolerance},
                          {"basis", e.derivation},
                          {"pass", pass}});
    }
    report.doc["expectations"] = std::move(checks);
    report.doc["all_passed"] = all_passed;
    return report;
}

Report sweep_report(const std::vector<std::pair<std::size_t, double>>& sweep,
                    const std::map<std::string, std::string>& params) {
    Report report;
    report.doc["scenario"] = "decoherence_sweep";
    json echo = json::object();
    for (const auto& [k, v] : params) echo[k] = v;
    report.doc["params"] = std::move(echo);
    json rows = json::array();
    for (const auto& [n, eps] : sweep)
        rows.push_back({{"n_env", n}, {"max_violation", eps}});
    report.doc["sweep"] = std::move(rows);
    return report;
}

std::string format_report(const Report& r, ReportFormat format) {
    if (format == ReportFormat::json) return r.doc.dump(2) + "\n";
    std::ostringstream out;
    render_text(r.doc, out, 0);
    return out.str();
}

Report report_from_json(std::string_view bytes) {
    try {
        return {json::parse(bytes)};
    } catch (const json::parse_error& e) {
        throw Error::parse(std::string("invalid report JSON: ") + e.what());
    }
}

} // namespace chronologic
