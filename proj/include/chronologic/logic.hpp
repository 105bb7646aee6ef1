#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chronologic/family.hpp"

namespace chronologic {

/// A proposition about a family: the subset of elementary histories for which
/// it is true.
struct Proposition {
    FamilyPtr family;
    std::set<std::size_t> member_set; ///< flat history indices
    std::string name;
};

/// Builds a proposition from an explicit index set, validating the indices.
Proposition make_proposition(const FamilyPtr& family, std::set<std::size_t> members,
                             const std::string& name, const EngineConfig& cfg = {});

/// Predicate receives the outcome labels of one history, one label per time.
using OutcomePredicate = std::function<bool(const std::vector<std::string>&)>;

/// Selects exactly the elementary histories satisfying the predicate.
Proposition proposition_from_predicate(const FamilyPtr& family, const OutcomePredicate& predicate,
                                       const std::string& name, const EngineConfig& cfg = {});

enum class Connective { conjunction, disjunction };

/// Intersection / union of the member sets. Refuses cross-family input:
/// that is the Rule-4 boundary, not a representable proposition.
Proposition combine(const Proposition& a, const Proposition& b, Connective connective);

/// Complement within the family's full history set.
Proposition negate(const Proposition& a, const EngineConfig& cfg = {});

/// Sum of diagonal entries over the member set; well-defined exactly when the
/// family is consistent, so inconsistent families are refused.
double proposition_probability(const DecoherenceMatrix& d, const Proposition& a,
                               const EngineConfig& cfg = {});

/// p(given and then) / p(given). Conditioning on a proposition with
/// probability at most probability_tol is refused (null condition), not
/// defined as vacuous truth.
double conditional_probability(const DecoherenceMatrix& d, const Proposition& given,
                               const Proposition& then, const EngineConfig& cfg = {});

/// Implication as a conditional-probability threshold:
/// a implies b iff p(b | a) >= 1 - tol.
bool implies(const DecoherenceMatrix& d, const Proposition& a, const Proposition& b, double tol,
             const EngineConfig& cfg = {});

enum class Rule4FailureKind {
    cross_family,        ///< a proposition does not belong to the chain's family
    family_inconsistent, ///< the family fails the configured consistency condition
    implication_failed,  ///< a claimed implication does not hold at tolerance
    null_condition,      ///< a premise has (numerically) zero probability
};

const char* rule4_failure_name(Rule4FailureKind kind);

struct Rule4Failure {
    Rule4FailureKind kind{};
    std::optional<std::size_t> step; ///< chain step, where applicable
    std::string premise;
    std::string conclusion;
    std::optional<double> conditional;          ///< for implication_failed
    std::optional<ConsistencyReport> consistency; ///< for family_inconsistent
    std::string detail;
};

struct Rule4Report {
    bool valid = false;
    std::vector<Rule4Failure> failures; ///< empty iff valid
};

/// Validates a reasoning chain of implication claims: all propositions must
/// reference the given family, the family must be consistent, and every step
/// must hold at probability_tol. Violations are reported, never thrown.
Rule4Report validate_reasoning_chain(const FamilyPtr& family, const DecoherenceMatrix& d,
                                     const std::vector<std::pair<Proposition, Proposition>>& steps,
                                     const EngineConfig& cfg = {});

enum class CompatibilityReason {
    commuting_refinement_consistent,
    decompositions_do_not_commute,
    refinement_inconsistent,
    structure_mismatch, ///< different space, times, initial state or propagators
};

const char* compatibility_reason_name(CompatibilityReason reason);

struct CompatibilityReport {
    bool compatible = false;
    CompatibilityReason reason = CompatibilityReason::structure_mismatch;
    std::optional<double> refinement_violation;
    std::string detail;
};

/// Sufficient-condition check: families sharing structure whose decompositions
/// commute member-by-member at every time are compatible iff their common
/// refinement {P.Q} is consistent. Non-commuting or structurally different
/// families are reported incompatible with the precise reason; compatibility
/// is never claimed without the refinement certificate.
CompatibilityReport families_compatible(const FamilyPtr& f1, const FamilyPtr& f2, double tol,
                                        const EngineConfig& cfg = {});

} // namespace chronologic
