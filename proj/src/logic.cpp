#include "chronologic/logic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chronologic {

namespace {

void require_shared_family(const Proposition& a, const Proposition& b, const char* op) {
    if (!same_family(a.family, b.family)) {
        std::ostringstream msg;
        msg << op << ": propositions '" << a.name << "' and '" << b.name
            << "' belong to different families; no common logic contains both";
        throw Error::refusal(msg.str());
    }
}

void require_consistent(const DecoherenceMatrix& d, const EngineConfig& cfg) {
    const ConsistencyReport report =
        check_consistency(d, cfg.condition, cfg.tol.consistency_tol, cfg.tol.structural_tol);
    if (!report.consistent) {
        std::ostringstream msg;
        msg << "family inconsistent; histories are meaningless under Rule 4 (max normalized "
            << condition_name(cfg.condition) << " violation " << report.max_violation << ")";
        throw Error::refusal(msg.str());
    }
}

double member_probability_sum(const DecoherenceMatrix& d, const Proposition& a) {
    double p = 0.0;
    for (std::size_t idx : a.member_set) p += d.entries(idx, idx).real();
    return std::clamp(p, 0.0, 1.0);
}

} // namespace

Proposition make_proposition(const FamilyPtr& family, std::set<std::size_t> members,
                             const std::string& name, const EngineConfig& cfg) {
    if (!family) throw Error::validation("null family");
    const std::size_t m = family->num_histories();
    if (m > cfg.max_histories)
        throw Error::resource("family exceeds the history cap");
    for (std::size_t idx : members)
        if (idx >= m) {
            std::ostringstream msg;
            msg << "proposition '" << name << "': history index " << idx << " out of range (M="
                << m << ")";
            throw Error::validation(msg.str());
        }
    return {family, std::move(members), name};
}

Proposition proposition_from_predicate(const FamilyPtr& family, const OutcomePredicate& predicate,
                                       const std::string& name, const EngineConfig& cfg) {
    std::set<std::size_t> members;
    for (const History& h : enumerate_histories(family, cfg))
        if (predicate(outcome_labels(h))) members.insert(h.flat_index);
    return {family, std::move(members), name};
}

Proposition combine(const Proposition& a, const Proposition& b, Connective connective) {
    require_shared_family(a, b, "combine");
    std::set<std::size_t> members;
    if (connective == Connective::conjunction) {
        std::set_intersection(a.member_set.begin(), a.member_set.end(), b.member_set.begin(),
                              b.member_set.end(), std::inserter(members, members.begin()));
        return {a.family, std::move(members), "(" + a.name + " and " + b.name + ")"};
    }
    std::set_union(a.member_set.begin(), a.member_set.end(), b.member_set.begin(),
                   b.member_set.end(), std::inserter(members, members.begin()));
    return {a.family, std::move(members), "(" + a.name + " or " + b.name + ")"};
}

Proposition negate(const Proposition& a, const EngineConfig& cfg) {
    const std::size_t m = a.family->num_histories();
    if (m > cfg.max_histories)
        throw Error::resource("family exceeds the history cap");
    std::set<std::size_t> members;
    for (std::size_t idx = 0; idx < m; ++idx)
        if (!a.member_set.count(idx)) members.insert(idx);
    return {a.family, std::move(members), "(not " + a.name + ")"};
}

double proposition_probability(const DecoherenceMatrix& d, const Proposition& a,
                               const EngineConfig& cfg) {
    if (!same_family(d.family, a.family))
        throw Error::validation("proposition '" + a.name +
                                "' does not belong to this decoherence matrix's family");
    require_consistent(d, cfg);
    return member_probability_sum(d, a);
}

double conditional_probability(const DecoherenceMatrix& d, const Proposition& given,
                               const Proposition& then, const EngineConfig& cfg) {
    require_shared_family(given, then, "conditional_probability");
    const double p_given = proposition_probability(d, given, cfg);
    if (p_given <= cfg.tol.probability_tol) {
        std::ostringstream msg;
        msg << "null condition: p(" << given.name << ") = " << p_given
            << " is not above probability_tol " << cfg.tol.probability_tol;
        throw Error::refusal(msg.str());
    }
    const Proposition both = combine(given, then, Connective::conjunction);
    return member_probability_sum(d, both) / p_given;
}

bool implies(const DecoherenceMatrix& d, const Proposition& a, const Proposition& b, double tol,
             const EngineConfig& cfg) {
    return conditional_probability(d, a, b, cfg) >= 1.0 - tol;
}

const char* rule4_failure_name(Rule4FailureKind kind) {
    switch (kind) {
    case Rule4FailureKind::cross_family: return "cross_family";
    case Rule4FailureKind::family_inconsistent: return "family_inconsistent";
    case Rule4FailureKind::implication_failed: return "implication_failed";
    case Rule4FailureKind::null_condition: return "null_condition";
    }
    return "unknown";
}

Rule4Report validate_reasoning_chain(const FamilyPtr& family, const DecoherenceMatrix& d,
                                     const std::vector<std::pair<Proposition, Proposition>>& steps,
                                     const EngineConfig& cfg) {
    Rule4Report report;

    // (1) Every proposition must live in the single given family.
    std::vector<bool> step_in_family(steps.size(), true);
    for (std::size_t s = 0; s < steps.size(); ++s) {
        for (const Proposition* p : {&steps[s].first, &steps[s].second}) {
            if (!same_family(p->family, family)) {
                step_in_family[s] = false;
                Rule4Failure f;
                f.kind = Rule4FailureKind::cross_family;
                f.step = s;
                f.premise = steps[s].first.name;
                f.conclusion = steps[s].second.name;
                f.detail = "proposition '" + p->name + "' belongs to a different family";
                report.failures.push_back(std::move(f));
            }
        }
    }

    // (2) The family itself must be consistent.
    const ConsistencyReport consistency =
        check_consistency(d, cfg.condition, cfg.tol.consistency_tol, cfg.tol.structural_tol);
    const bool family_ok = consistency.consistent && same_family(d.family, family);
    if (!family_ok) {
        Rule4Failure f;
        f.kind = Rule4FailureKind::family_inconsistent;
        f.consistency = consistency;
        std::ostringstream msg;
        msg << "family fails the " << condition_name(cfg.condition)
            << " consistency condition, max normalized violation " << consistency.max_violation;
        f.detail = msg.str();
        report.failures.push_back(std::move(f));
    }

    // (3) Each claimed implication must hold at tolerance.
    if (family_ok) {
        for (std::size_t s = 0; s < steps.size(); ++s) {
            if (!step_in_family[s]) continue;
            const Proposition& a = steps[s].first;
            const Proposition& b = steps[s].second;
            const double p_given = member_probability_sum(d, a);
            if (p_given <= cfg.tol.probability_tol) {
                Rule4Failure f;
                f.kind = Rule4FailureKind::null_condition;
                f.step = s;
                f.premise = a.name;
                f.conclusion = b.name;
                std::ostringstream msg;
                msg << "premise '" << a.name << "' has probability " << p_given;
                f.detail = msg.str();
                report.failures.push_back(std::move(f));
                continue;
            }
            const double conditional =
                member_probability_sum(d, combine(a, b, Connective::conjunction)) / p_given;
            if (!(conditional >= 1.0 - cfg.tol.probability_tol)) {
                Rule4Failure f;
                f.kind = Rule4FailureKind::implication_failed;
                f.step = s;
                f.premise = a.name;
                f.conclusion = b.name;
                f.conditional = conditional;
                std::ostringstream msg;
                msg << "p(" << b.name << " | " << a.name << ") = " << conditional;
                f.detail = msg.str();
                report.failures.push_back(std::move(f));
            }
        }
    }

    report.valid = report.failures.empty();
    return report;
}

const char* compatibility_reason_name(CompatibilityReason reason) {
    switch (reason) {
    case CompatibilityReason::commuting_refinement_consistent:
        return "commuting_refinement_consistent";
    case CompatibilityReason::decompositions_do_not_commute:
        return "decompositions_do_not_commute";
    case CompatibilityReason::refinement_inconsistent: return "refinement_inconsistent";
    case CompatibilityReason::structure_mismatch: return "structure_mismatch";
    }
    return "unknown";
}

CompatibilityReport families_compatible(const FamilyPtr& f1, const FamilyPtr& f2, double tol,
                                        const EngineConfig& cfg) {
    if (!f1 || !f2) throw Error::validation("null family");

    CompatibilityReport report;
    if (f1->space != f2->space || f1->times != f2->times || f1->initial != f2->initial ||
        f1->propagators != f2->propagators) {
        report.compatible = false;
        report.reason = CompatibilityReason::structure_mismatch;
        report.detail = "families differ in space, times, initial state or propagators";
        return report;
    }

    const std::size_t n = f1->num_times();
    for (std::size_t k = 0; k < n; ++k) {
        for (const Property& p : f1->decompositions[k].members)
            for (const Property& q : f2->decompositions[k].members) {
                const double comm = max_abs(p.matrix * q.matrix - q.matrix * p.matrix);
                if (comm > cfg.tol.structural_tol) {
                    report.compatible = false;
                    report.reason = CompatibilityReason::decompositions_do_not_commute;
                    std::ostringstream msg;
                    msg << "time " << k << ": members '" << p.label << "' and '" << q.label
                        << "' have commutator norm " << comm;
                    report.detail = msg.str();
                    return report;
                }
            }
    }

    // Common refinement {P.Q}, dropping zero products. Commutation makes each
    // product a projector and the refinement a decomposition.
    std::vector<Decomposition> refined;
    refined.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<Property> members;
        for (const Property& p : f1->decompositions[k].members)
            for (const Property& q : f2->decompositions[k].members) {
                ComplexMatrix prod = p.matrix * q.matrix;
                if (max_abs(prod) <= cfg.tol.structural_tol) continue;
                const auto rank = static_cast<std::size_t>(std::llround(trace(prod).real()));
                members.push_back(
                    {f1->space, std::move(prod), rank, p.label + "&" + q.label});
            }
        refined.push_back({f1->space, std::move(members)});
    }

    std::vector<PropagatorSpec> props;
    props.reserve(n);
    for (const ComplexMatrix& u : f1->propagators) props.emplace_back(u);
    const FamilyPtr refinement =
        build_family(f1->initial, f1->times, std::move(props), std::move(refined), cfg);

    const DecoherenceMatrix d = decoherence_functional(refinement, cfg);
    const ConsistencyReport consistency =
        check_consistency(d, cfg.condition, tol, cfg.tol.structural_tol);
    report.refinement_violation = consistency.max_violation;
    if (consistency.consistent) {
        report.compatible = true;
        report.reason = CompatibilityReason::commuting_refinement_consistent;
        report.detail = "common refinement is consistent";
    } else {
        report.compatible = false;
        report.reason = CompatibilityReason::refinement_inconsistent;
        std::ostringstream msg;
        msg << "common refinement max normalized violation " << consistency.max_violation;
        report.detail = msg.str();
    }
    return report;
}

} // namespace chronologic
