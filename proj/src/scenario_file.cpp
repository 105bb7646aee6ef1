#include "chronologic/scenario_file.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace chronologic {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw Error::parse(path + ": " + message);
}

const json& require_key(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing required field '" + key + "'");
    return *it;
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) fail(path + "/" + key, "unknown field");
    }
}

double as_real(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return v.get<std::size_t>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected a boolean");
    return v.get<bool>();
}

cx as_complex(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) fail(path, "expected [re, im]");
    return {as_real(v[0], path + "/0"), as_real(v[1], path + "/1")};
}

cxvec as_ket(const json& v, const std::string& path, std::size_t expected_len) {
    if (!v.is_array()) fail(path, "expected an array of [re, im] pairs");
    if (v.size() != expected_len) {
        std::ostringstream msg;
        msg << "expected " << expected_len << " amplitudes, got " << v.size();
        fail(path, msg.str());
    }
    cxvec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = as_complex(v[i], path + "/" + std::to_string(i));
    return out;
}

/// Row-major flat list of [re, im] pairs for a dim x dim matrix.
ComplexMatrix as_square_matrix(const json& v, const std::string& path, std::size_t dim) {
    if (!v.is_array()) fail(path, "expected a row-major array of [re, im] pairs");
    if (v.size() != dim * dim) {
        std::ostringstream msg;
        msg << "expected " << dim * dim << " entries for a " << dim << "x" << dim
            << " matrix, got " << v.size();
        fail(path, msg.str());
    }
    ComplexMatrix m(dim, dim);
    for (std::size_t k = 0; k < v.size(); ++k)
        m(k / dim, k % dim) = as_complex(v[k], path + "/" + std::to_string(k));
    return m;
}

HilbertSpace parse_space(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of factors");
    std::vector<std::pair<std::string, std::size_t>> factors;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        reject_unknown_keys(v[i], p, {"label", "dim"});
        factors.emplace_back(as_string(require_key(v[i], p, "label"), p + "/label"),
                             as_count(require_key(v[i], p, "dim"), p + "/dim"));
    }
    try {
        return make_space(factors);
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

DensityMatrix parse_initial(const json& v, const std::string& path, const HilbertSpace& space,
                            const EngineConfig& cfg) {
    if (v.is_string()) {
        if (v.get<std::string>() == "maximally_mixed") return maximally_mixed(space);
        fail(path, "expected \"maximally_mixed\", a {ket: ...} or a {density: ...} object");
    }
    if (!v.is_object()) fail(path, "expected a string or an object");
    if (v.contains("ket")) {
        reject_unknown_keys(v, path, {"ket"});
        return pure_state(space, as_ket(v["ket"], path + "/ket", space.total_dim()));
    }
    if (v.contains("density")) {
        reject_unknown_keys(v, path, {"density"});
        return density_from_matrix(
            space, as_square_matrix(v["density"], path + "/density", space.total_dim()), cfg.tol);
    }
    fail(path, "expected a 'ket' or 'density' field");
}

ComplexMatrix named_gate(const std::string& name, double angle, bool has_angle,
                         std::size_t n_targets, const std::string& path) {
    const double s = 1.0 / std::sqrt(2.0);
    auto expect_targets = [&](std::size_t want) {
        if (n_targets != want) {
            std::ostringstream msg;
            msg << "gate '" << name << "' takes " << want << " target(s), got " << n_targets;
            fail(path, msg.str());
        }
    };
    auto reject_angle = [&]() {
        if (has_angle) fail(path, "gate '" + name + "' takes no angle");
    };
    if (name == "identity") {
        expect_targets(1);
        reject_angle();
        return ComplexMatrix::identity(2);
    }
    if (name == "hadamard") {
        expect_targets(1);
        reject_angle();
        return ComplexMatrix::from_rows({{s, s}, {s, -s}});
    }
    if (name == "pauli_x") {
        expect_targets(1);
        reject_angle();
        return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    }
    if (name == "pauli_y") {
        expect_targets(1);
        reject_angle();
        return ComplexMatrix::from_rows({{0.0, cx{0.0, -1.0}}, {cx{0.0, 1.0}, 0.0}});
    }
    if (name == "pauli_z") {
        expect_targets(1);
        reject_angle();
        return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
    }
    if (name == "controlled_not") {
        expect_targets(2);
        reject_angle();
        ComplexMatrix u(4, 4);
        u(0, 0) = 1.0;
        u(1, 1) = 1.0;
        u(2, 3) = 1.0;
        u(3, 2) = 1.0;
        return u;
    }
    if (name == "controlled_rotation") {
        expect_targets(2);
        if (!has_angle) fail(path, "controlled_rotation requires an angle");
        const double c = std::cos(angle), sn = std::sin(angle);
        ComplexMatrix u = ComplexMatrix::identity(4);
        u(2, 2) = c;
        u(2, 3) = -sn;
        u(3, 2) = sn;
        u(3, 3) = c;
        return u;
    }
    fail(path, "unknown gate '" + name +
                   "' (known: identity, hadamard, pauli_x, pauli_y, pauli_z, controlled_not, "
                   "controlled_rotation)");
}

PropagatorSpec parse_propagator(const json& v, const std::string& path, const HilbertSpace& space) {
    if (!v.is_object()) fail(path, "expected an object");
    if (v.contains("matrix")) {
        reject_unknown_keys(v, path, {"matrix"});
        return as_square_matrix(v["matrix"], path + "/matrix", space.total_dim());
    }
    if (v.contains("gate")) {
        reject_unknown_keys(v, path, {"gate"});
        const json& g = v["gate"];
        const std::string gp = path + "/gate";
        reject_unknown_keys(g, gp, {"name", "targets", "angle"});
        const std::string name = as_string(require_key(g, gp, "name"), gp + "/name");
        const json& targets_json = require_key(g, gp, "targets");
        if (!targets_json.is_array() || targets_json.empty())
            fail(gp + "/targets", "expected a non-empty array of factor labels");
        std::vector<std::size_t> targets;
        for (std::size_t i = 0; i < targets_json.size(); ++i) {
            const std::string tp = gp + "/targets/" + std::to_string(i);
            const std::string label = as_string(targets_json[i], tp);
            try {
                targets.push_back(space.factor_index(label));
            } catch (const Error& e) {
                fail(tp, e.what());
            }
            if (space.factors()[targets.back()].dim != 2)
                fail(tp, "named gates act on dim-2 factors only");
        }
        const bool has_angle = g.contains("angle");
        const double angle = has_angle ? as_real(g["angle"], gp + "/angle") : 0.0;
        GateCircuit circuit;
        circuit.gates.push_back({named_gate(name, angle, has_angle, targets.size(), gp),
                                 std::move(targets)});
        return circuit;
    }
    if (v.contains("hamiltonian")) {
        reject_unknown_keys(v, path, {"hamiltonian"});
        const json& h = v["hamiltonian"];
        const std::string hp = path + "/hamiltonian";
        reject_unknown_keys(h, hp, {"matrix", "duration"});
        return HamiltonianStep{
            as_square_matrix(require_key(h, hp, "matrix"), hp + "/matrix", space.total_dim()),
            as_real(require_key(h, hp, "duration"), hp + "/duration")};
    }
    fail(path, "expected a 'matrix', 'gate' or 'hamiltonian' propagator");
}

Decomposition parse_decomposition(const json& v, const std::string& path,
                                  const HilbertSpace& space, const EngineConfig& cfg) {
    if (!v.is_object()) fail(path, "expected an object");
    if (v.contains("factor_basis")) {
        reject_unknown_keys(v, path, {"factor_basis"});
        const json& fb = v["factor_basis"];
        const std::string fp = path + "/factor_basis";
        reject_unknown_keys(fb, fp, {"factor", "labels"});
        const std::string factor = as_string(require_key(fb, fp, "factor"), fp + "/factor");
        const json& labels_json = require_key(fb, fp, "labels");
        if (!labels_json.is_array()) fail(fp + "/labels", "expected an array of labels");
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < labels_json.size(); ++i)
            labels.push_back(as_string(labels_json[i], fp + "/labels/" + std::to_string(i)));
        return basis_decomposition(space, factor, labels, cfg.tol);
    }
    if (v.contains("projectors")) {
        reject_unknown_keys(v, path, {"projectors"});
        const json& list = v["projectors"];
        if (!list.is_array() || list.empty())
            fail(path + "/projectors", "expected a non-empty array");
        std::vector<Property> members;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string pp = path + "/projectors/" + std::to_string(i);
            const json& item = list[i];
            if (!item.is_object()) fail(pp, "expected an object");
            const std::string label = as_string(require_key(item, pp, "label"), pp + "/label");
            if (item.contains("matrix")) {
                reject_unknown_keys(item, pp, {"label", "matrix"});
                members.push_back(property_from_matrix(
                    space, as_square_matrix(item["matrix"], pp + "/matrix", space.total_dim()),
                    label, cfg.tol));
            } else if (item.contains("vectors")) {
                reject_unknown_keys(item, pp, {"label", "vectors"});
                const json& vecs = item["vectors"];
                if (!vecs.is_array() || vecs.empty())
                    fail(pp + "/vectors", "expected a non-empty array of kets");
                std::vector<cxvec> vectors;
                for (std::size_t k = 0; k < vecs.size(); ++k)
                    vectors.push_back(as_ket(vecs[k], pp + "/vectors/" + std::to_string(k),
                                             space.total_dim()));
                members.push_back(projector_from_vectors(space, vectors, label, cfg.tol));
            } else {
                fail(pp, "expected a 'matrix' or 'vectors' field");
            }
        }
        return decomposition_from_members(space, std::move(members), cfg.tol);
    }
    fail(path, "expected a 'factor_basis' or 'projectors' decomposition");
}

OutcomePredicate parse_predicate(const json& v, const std::string& path, const FamilyPtr& family);

std::vector<OutcomePredicate> parse_predicate_list(const json& v, const std::string& path,
                                                   const FamilyPtr& family) {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of predicates");
    std::vector<OutcomePredicate> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(parse_predicate(v[i], path + "/" + std::to_string(i), family));
    return out;
}

OutcomePredicate parse_predicate(const json& v, const std::string& path, const FamilyPtr& family) {
    if (!v.is_object()) fail(path, "expected a predicate object");
    if (v.contains("all")) {
        reject_unknown_keys(v, path, {"all"});
        auto parts = parse_predicate_list(v["all"], path + "/all", family);
        return [parts](const std::vector<std::string>& labels) {
            for (const auto& p : parts)
                if (!p(labels)) return false;
            return true;
        };
    }
    if (v.contains("any")) {
        reject_unknown_keys(v, path, {"any"});
        auto parts = parse_predicate_list(v["any"], path + "/any", family);
        return [parts](const std::vector<std::string>& labels) {
            for (const auto& p : parts)
                if (p(labels)) return true;
            return false;
        };
    }
    if (v.contains("not")) {
        reject_unknown_keys(v, path, {"not"});
        auto inner = parse_predicate(v["not"], path + "/not", family);
        return [inner](const std::vector<std::string>& labels) { return !inner(labels); };
    }
    reject_unknown_keys(v, path, {"time_index", "outcome_label"});
    const std::size_t t =
        as_count(require_key(v, path, "time_index"), path + "/time_index");
    const std::string label =
        as_string(require_key(v, path, "outcome_label"), path + "/outcome_label");
    if (t >= family->num_times()) {
        std::ostringstream msg;
        msg << "time_index " << t << " out of range (family has " << family->num_times()
            << " times)";
        fail(path + "/time_index", msg.str());
    }
    // Unknown labels are almost certainly file typos; reject them here.
    bool known = false;
    for (const Property& p : family->decompositions[t].members)
        if (p.label == label) known = true;
    if (!known)
        fail(path + "/outcome_label",
             "no outcome '" + label + "' in the decomposition at time_index " +
                 std::to_string(t));
    return [t, label](const std::vector<std::string>& labels) { return labels[t] == label; };
}

std::string query_prop_name(const json& q, const std::string& path, const char* key,
                            const ScenarioSpec& spec) {
    const std::string name = as_string(require_key(q, path, key), path + "/" + key);
    if (!spec.propositions.count(name))
        fail(path + "/" + key, "unknown proposition '" + name + "'");
    return name;
}

Query parse_query(const json& v, const std::string& path, const ScenarioSpec& spec,
                  const EngineConfig& cfg) {
    if (!v.is_object()) fail(path, "expected a query object");
    const std::string type = as_string(require_key(v, path, "type"), path + "/type");
    Query out;
    out.echo = v;
    if (type == "consistency") {
        reject_unknown_keys(v, path, {"type"});
        out.payload = ConsistencyQuery{};
    } else if (type == "probability") {
        reject_unknown_keys(v, path, {"type", "proposition", "unchecked"});
        ProbabilityQuery q;
        q.proposition = query_prop_name(v, path, "proposition", spec);
        q.unchecked = v.contains("unchecked") && as_bool(v["unchecked"], path + "/unchecked");
        out.payload = std::move(q);
    } else if (type == "conditional") {
        reject_unknown_keys(v, path, {"type", "given", "then"});
        out.payload = ConditionalQuery{query_prop_name(v, path, "given", spec),
                                       query_prop_name(v, path, "then", spec)};
    } else if (type == "implication") {
        reject_unknown_keys(v, path, {"type", "premise", "conclusion"});
        out.payload = ImplicationQuery{query_prop_name(v, path, "premise", spec),
                                       query_prop_name(v, path, "conclusion", spec)};
    } else if (type == "rule4_chain") {
        reject_unknown_keys(v, path, {"type", "steps"});
        const json& steps = require_key(v, path, "steps");
        if (!steps.is_array() || steps.empty())
            fail(path + "/steps", "expected a non-empty array of [premise, conclusion] pairs");
        Rule4Query q;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const std::string sp = path + "/steps/" + std::to_string(i);
            if (!steps[i].is_array() || steps[i].size() != 2)
                fail(sp, "expected [premise, conclusion]");
            const std::string a = as_string(steps[i][0], sp + "/0");
            const std::string b = as_string(steps[i][1], sp + "/1");
            for (const std::string& name : {a, b})
                if (!spec.propositions.count(name))
                    fail(sp, "unknown proposition '" + name + "'");
            q.steps.emplace_back(a, b);
        }
        out.payload = std::move(q);
    } else if (type == "compatibility") {
        reject_unknown_keys(v, path, {"type", "decompositions"});
        const json& decs = require_key(v, path, "decompositions");
        if (!decs.is_array() || decs.size() != spec.family->num_times())
            fail(path + "/decompositions", "expected one decomposition per family time");
        CompatibilityQuery q;
        for (std::size_t i = 0; i < decs.size(); ++i)
            q.decompositions.push_back(parse_decomposition(
                decs[i], path + "/decompositions/" + std::to_string(i), spec.space, cfg));
        out.payload = std::move(q);
    } else {
        fail(path + "/type",
             "unknown query type '" + type +
                 "' (known: consistency, probability, conditional, implication, rule4_chain, "
                 "compatibility)");
    }
    return out;
}

} // namespace

ScenarioSpec parse_scenario_file(std::string_view bytes, const EngineConfig& cfg) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw Error::parse(std::string("invalid JSON: ") + e.what());
    }

    const std::string root;
    reject_unknown_keys(doc, "(root)",
                        {"space", "initial", "times", "propagators", "decompositions",
                         "propositions", "queries"});

    ScenarioSpec spec;
    spec.space = parse_space(require_key(doc, "(root)", "space"), "/space");
    DensityMatrix initial =
        parse_initial(require_key(doc, "(root)", "initial"), "/initial", spec.space, cfg);

    const json& times_json = require_key(doc, "(root)", "times");
    if (!times_json.is_array() || times_json.empty())
        fail("/times", "expected a non-empty array of reals");
    std::vector<double> times;
    for (std::size_t i = 0; i < times_json.size(); ++i)
        times.push_back(as_real(times_json[i], "/times/" + std::to_string(i)));

    const json& props_json = require_key(doc, "(root)", "propagators");
    if (!props_json.is_array() || props_json.size() != times.size())
        fail("/propagators", "expected exactly one propagator per time");
    std::vector<PropagatorSpec> propagators;
    for (std::size_t i = 0; i < props_json.size(); ++i)
        propagators.push_back(
            parse_propagator(props_json[i], "/propagators/" + std::to_string(i), spec.space));

    const json& decs_json = require_key(doc, "(root)", "decompositions");
    if (!decs_json.is_array() || decs_json.size() != times.size())
        fail("/decompositions", "expected exactly one decomposition per time");
    std::vector<Decomposition> decompositions;
    for (std::size_t i = 0; i < decs_json.size(); ++i)
        decompositions.push_back(parse_decomposition(
            decs_json[i], "/decompositions/" + std::to_string(i), spec.space, cfg));

    spec.family = build_family(std::move(initial), std::move(times), std::move(propagators),
                               std::move(decompositions), cfg);

    if (doc.contains("propositions")) {
        const json& props = doc["propositions"];
        if (!props.is_object()) fail("/propositions", "expected an object of name -> predicate");
        for (const auto& [name, predicate_json] : props.items()) {
            const OutcomePredicate predicate =
                parse_predicate(predicate_json, "/propositions/" + name, spec.family);
            spec.propositions.emplace(
                name, proposition_from_predicate(spec.family, predicate, name, cfg));
        }
    }

    if (doc.contains("queries")) {
        const json& queries = doc["queries"];
        if (!queries.is_array()) fail("/queries", "expected an array of query objects");
        for (std::size_t i = 0; i < queries.size(); ++i)
            spec.queries.push_back(
                parse_query(queries[i], "/queries/" + std::to_string(i), spec, cfg));
    }

    return spec;
}

ScenarioSpec load_scenario_file(const std::string& path, const EngineConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::parse("cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_file(buffer.str(), cfg);
}

} // namespace chronologic
