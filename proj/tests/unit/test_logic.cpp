#include <doctest.h>

#include <cmath>

#include "chronologic/logic.hpp"
#include "chronologic/scenarios.hpp"
#include "support/test_helpers.hpp"

using namespace chronologic;

namespace {

const double kSqrtHalf = 1.0 / std::sqrt(2.0);

Proposition heads_at(const Scenario& coin, std::size_t toss) {
    return coin.proposition("H_at_" + std::to_string(toss));
}

/// Single-time qubit family measuring along the given basis vectors.
FamilyPtr single_time_basis_family(const std::vector<cxvec>& basis_vectors,
                                   const std::vector<std::string>& labels) {
    const HilbertSpace q = make_space({{"spin", 2}});
    std::vector<Property> members;
    for (std::size_t i = 0; i < basis_vectors.size(); ++i)
        members.push_back(projector_from_vectors(q, {basis_vectors[i]}, labels[i]));
    return build_family(maximally_mixed(q), {1.0},
                        {PropagatorSpec{ComplexMatrix::identity(2)}},
                        {decomposition_from_members(q, std::move(members))});
}

FamilyPtr z_basis_family() {
    return single_time_basis_family({{cx{1.0, 0.0}, cx{0.0, 0.0}}, {cx{0.0, 0.0}, cx{1.0, 0.0}}},
                                    {"+z", "-z"});
}

FamilyPtr x_basis_family() {
    return single_time_basis_family(
        {{cx{kSqrtHalf, 0.0}, cx{kSqrtHalf, 0.0}}, {cx{kSqrtHalf, 0.0}, cx{-kSqrtHalf, 0.0}}},
        {"+x", "-x"});
}

FamilyPtr double_hadamard_family() {
    const HilbertSpace q = make_space({{"spin", 2}});
    const ComplexMatrix h =
        ComplexMatrix::from_rows({{kSqrtHalf, kSqrtHalf}, {kSqrtHalf, -kSqrtHalf}});
    std::vector<PropagatorSpec> props;
    props.emplace_back(h);
    props.emplace_back(h);
    return build_family(pure_state(q, {cx{1.0, 0.0}, cx{0.0, 0.0}}), {1.0, 2.0},
                        std::move(props),
                        {basis_decomposition(q, "spin", {"0", "1"}),
                         basis_decomposition(q, "spin", {"0", "1"})});
}

} // namespace

TEST_CASE("propositions from predicates select the advertised histories") {
    const Scenario coin = coin_toss_scenario(3, 0.5);

    // exactly one H among tosses 1-2: HT. and TH. -> flat {2, 3, 4, 5}
    const Proposition& one = coin.proposition("one_H_in_first_two");
    CHECK(one.member_set == std::set<std::size_t>{2, 3, 4, 5});

    const Proposition all = proposition_from_predicate(
        coin.family, [](const std::vector<std::string>&) { return true; }, "S");
    CHECK(all.member_set.size() == 8);

    const Proposition none = proposition_from_predicate(
        coin.family, [](const std::vector<std::string>&) { return false; }, "empty");
    CHECK(none.member_set.empty());
}

TEST_CASE("boolean combinations act on member sets") {
    const Scenario coin = coin_toss_scenario(3, 0.5);
    const Proposition h1 = heads_at(coin, 1);
    const Proposition h2 = heads_at(coin, 2);

    CHECK(combine(h1, negate(h1), Connective::conjunction).member_set.empty());
    CHECK(combine(h1, negate(h1), Connective::disjunction).member_set.size() == 8);

    // heads on toss 1 AND heads on toss 2: the two HH. histories
    const Proposition hh = combine(h1, h2, Connective::conjunction);
    CHECK(hh.member_set == std::set<std::size_t>{0, 1});

    const Scenario other = coin_toss_scenario(2, 0.5);
    CHECK_THROWS_WITH_AS(std::ignore = combine(h1, heads_at(other, 1), Connective::conjunction),
                         doctest::Contains("different families"), Error);
}

TEST_CASE("boolean algebra laws hold exactly on random propositions") {
    const Scenario coin = coin_toss_scenario(3, 0.5);
    std::mt19937_64 rng(211);
    auto random_prop = [&](const std::string& name) {
        std::set<std::size_t> members;
        for (std::size_t i = 0; i < 8; ++i)
            if (rng() & 1u) members.insert(i);
        return make_proposition(coin.family, members, name);
    };
    for (int trial = 0; trial < 30; ++trial) {
        const Proposition a = random_prop("a");
        const Proposition b = random_prop("b");
        const Proposition c = random_prop("c");

        // De Morgan
        CHECK(negate(combine(a, b, Connective::conjunction)).member_set ==
              combine(negate(a), negate(b), Connective::disjunction).member_set);
        CHECK(negate(combine(a, b, Connective::disjunction)).member_set ==
              combine(negate(a), negate(b), Connective::conjunction).member_set);
        // distributivity
        CHECK(combine(a, combine(b, c, Connective::disjunction), Connective::conjunction)
                  .member_set ==
              combine(combine(a, b, Connective::conjunction),
                      combine(a, c, Connective::conjunction), Connective::disjunction)
                  .member_set);
        // double negation
        CHECK(negate(negate(a)).member_set == a.member_set);
    }
}

TEST_CASE("proposition probabilities on the coin family") {
    const Scenario coin = coin_toss_scenario(3, 0.5);
    const DecoherenceMatrix d = decoherence_functional(coin.family);

    CHECK(proposition_probability(d, coin.proposition("one_H_in_first_two")) ==
          doctest::Approx(0.5).epsilon(1e-12));

    const Proposition none = make_proposition(coin.family, {}, "empty");
    CHECK(proposition_probability(d, none) == 0.0);

    const Proposition full =
        make_proposition(coin.family, {0, 1, 2, 3, 4, 5, 6, 7}, "S");
    CHECK(proposition_probability(d, full) == doctest::Approx(1.0).epsilon(1e-10));

    // inconsistent families are refused
    const FamilyPtr bad = double_hadamard_family();
    const DecoherenceMatrix dbad = decoherence_functional(bad);
    CHECK_THROWS_AS(std::ignore = proposition_probability(
                        dbad, make_proposition(bad, {0}, "p")),
                    Error);
}

TEST_CASE("monotonicity of probability under set inclusion") {
    const Scenario coin = coin_toss_scenario(3, 0.3);
    const DecoherenceMatrix d = decoherence_functional(coin.family);
    std::mt19937_64 rng(223);
    for (int trial = 0; trial < 20; ++trial) {
        std::set<std::size_t> small, large;
        for (std::size_t i = 0; i < 8; ++i) {
            if (rng() & 1u) {
                large.insert(i);
                if (rng() & 1u) small.insert(i);
            }
        }
        const double ps = proposition_probability(d, make_proposition(coin.family, small, "a"));
        const double pl = proposition_probability(d, make_proposition(coin.family, large, "b"));
        CHECK(ps <= pl + 1e-12);
    }
}

TEST_CASE("conditional probabilities and the null-condition refusal") {
    const Scenario coin = coin_toss_scenario(3, 0.5);
    const DecoherenceMatrix d = decoherence_functional(coin.family);
    const Proposition h1 = heads_at(coin, 1);
    const Proposition h2 = heads_at(coin, 2);

    // superset of the condition: certainty
    const Proposition h1_or_h2 = combine(h1, h2, Connective::disjunction);
    CHECK(conditional_probability(d, h1, h1_or_h2) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(conditional_probability(d, h1, h2) == doctest::Approx(0.5).epsilon(1e-12));

    const Proposition t1 = negate(h1);
    CHECK(conditional_probability(d, h1, t1) == doctest::Approx(0.0).epsilon(1e-12));

    // a sure coin makes tails a null condition
    const Scenario sure = coin_toss_scenario(2, 1.0);
    const DecoherenceMatrix dsure = decoherence_functional(sure.family);
    const Proposition tails1 = negate(heads_at(sure, 1));
    CHECK_THROWS_WITH_AS(
        std::ignore = conditional_probability(dsure, tails1, heads_at(sure, 2)),
        doctest::Contains("null condition"), Error);
}

TEST_CASE("implication by conditional-probability threshold") {
    const Scenario coin = coin_toss_scenario(3, 0.5);
    const DecoherenceMatrix d = decoherence_functional(coin.family);
    const Proposition h1 = heads_at(coin, 1);
    const Proposition h2 = heads_at(coin, 2);

    CHECK(implies(d, h1, combine(h1, h2, Connective::disjunction), 1e-10));
    CHECK_FALSE(implies(d, h1, h2, 1e-10)); // 0.5 < 1 - tol

    // retrodiction in the measurement chain
    const Scenario chain = measurement_chain_scenario(0.9);
    const DecoherenceMatrix dc = decoherence_functional(chain.family);
    CHECK(implies(dc, chain.proposition("pointer_up_t2"), chain.proposition("spin_up_t1"),
                  1e-10));
    CHECK_FALSE(implies(dc, chain.proposition("spin_up_t1"), chain.proposition("pointer_down_t2"),
                        1e-10));
}

TEST_CASE("implication is a preorder on nonzero-probability propositions") {
    const Scenario coin = coin_toss_scenario(3, 0.4);
    const DecoherenceMatrix d = decoherence_functional(coin.family);
    const double tol = ToleranceConfig{}.probability_tol;
    std::mt19937_64 rng(227);
    for (int trial = 0; trial < 25; ++trial) {
        std::set<std::size_t> base;
        for (std::size_t i = 0; i < 8; ++i)
            if (rng() & 1u) base.insert(i);
        if (base.empty()) base.insert(rng() % 8);
        const Proposition a = make_proposition(coin.family, base, "a");

        // reflexivity
        CHECK(implies(d, a, a, tol));

        // transitivity within accumulated tolerance: a => a|b => a|b|c
        std::set<std::size_t> wider = base, widest;
        wider.insert(rng() % 8);
        widest = wider;
        widest.insert(rng() % 8);
        const Proposition b = make_proposition(coin.family, wider, "b");
        const Proposition c = make_proposition(coin.family, widest, "c");
        if (implies(d, a, b, tol) && implies(d, b, c, tol))
            CHECK(conditional_probability(d, a, c) >= 1.0 - 2.0 * tol);
    }
}

TEST_CASE("rule-4 chains: valid, inconsistent-family and cross-family verdicts") {
    const Scenario coin = coin_toss_scenario(3, 0.5);
    const DecoherenceMatrix d = decoherence_functional(coin.family);
    const Proposition h1 = heads_at(coin, 1);
    const Proposition h1_or_h2 = combine(h1, heads_at(coin, 2), Connective::disjunction);
    const Proposition full = make_proposition(coin.family, {0, 1, 2, 3, 4, 5, 6, 7}, "S");

    // inclusions: valid chain
    const Rule4Report ok = validate_reasoning_chain(
        coin.family, d, {{h1, h1_or_h2}, {h1_or_h2, full}});
    CHECK(ok.valid);
    CHECK(ok.failures.empty());

    // failed implication is reported with the conditional
    const Rule4Report no = validate_reasoning_chain(coin.family, d, {{h1, heads_at(coin, 2)}});
    CHECK_FALSE(no.valid);
    REQUIRE(no.failures.size() == 1);
    CHECK(no.failures[0].kind == Rule4FailureKind::implication_failed);
    CHECK(*no.failures[0].conditional == doctest::Approx(0.5).epsilon(1e-12));

    // any chain over an inconsistent family is invalid
    const FamilyPtr bad = double_hadamard_family();
    const DecoherenceMatrix dbad = decoherence_functional(bad);
    const Proposition pa = make_proposition(bad, {0}, "a");
    const Proposition pb = make_proposition(bad, {0, 1}, "b");
    const Rule4Report inconsistent = validate_reasoning_chain(bad, dbad, {{pa, pb}});
    CHECK_FALSE(inconsistent.valid);
    REQUIRE(inconsistent.failures.size() == 1);
    CHECK(inconsistent.failures[0].kind == Rule4FailureKind::family_inconsistent);
    REQUIRE(inconsistent.failures[0].consistency.has_value());
    CHECK(inconsistent.failures[0].consistency->max_violation ==
          doctest::Approx(1.0).epsilon(1e-12));

    // mixing S_z and S_x propositions about the same qubit crosses families
    const FamilyPtr fz = z_basis_family();
    const FamilyPtr fx = x_basis_family();
    const DecoherenceMatrix dz = decoherence_functional(fz);
    const Proposition z_up = make_proposition(fz, {0}, "+z");
    const Proposition x_up = make_proposition(fx, {0}, "+x");
    const Rule4Report crossed = validate_reasoning_chain(fz, dz, {{z_up, x_up}});
    CHECK_FALSE(crossed.valid);
    REQUIRE_FALSE(crossed.failures.empty());
    CHECK(crossed.failures[0].kind == Rule4FailureKind::cross_family);

    // null premise is its own failure category
    const Scenario sure = coin_toss_scenario(2, 1.0);
    const DecoherenceMatrix dsure = decoherence_functional(sure.family);
    const Proposition tails = negate(heads_at(sure, 1));
    const Rule4Report null_cond =
        validate_reasoning_chain(sure.family, dsure, {{tails, heads_at(sure, 2)}});
    CHECK_FALSE(null_cond.valid);
    REQUIRE(null_cond.failures.size() == 1);
    CHECK(null_cond.failures[0].kind == Rule4FailureKind::null_condition);
}

TEST_CASE("family compatibility: identical, non-commuting and refined") {
    const FamilyPtr fz = z_basis_family();
    EngineConfig cfg;

    const CompatibilityReport self = families_compatible(fz, fz, cfg.tol.consistency_tol, cfg);
    CHECK(self.compatible);
    CHECK(self.reason == CompatibilityReason::commuting_refinement_consistent);

    const CompatibilityReport zx =
        families_compatible(fz, x_basis_family(), cfg.tol.consistency_tol, cfg);
    CHECK_FALSE(zx.compatible);
    CHECK(zx.reason == CompatibilityReason::decompositions_do_not_commute);

    // two coarse-grainings of one orthonormal basis refine to the fine basis
    const HilbertSpace four = make_space({{"sys", 4}});
    auto diag_projector = [&](std::initializer_list<std::size_t> on, const std::string& label) {
        ComplexMatrix p(4, 4);
        for (std::size_t i : on) p(i, i) = 1.0;
        return property_from_matrix(four, p, label);
    };
    auto family_with = [&](std::vector<Property> members) {
        return build_family(maximally_mixed(four), {1.0},
                            {PropagatorSpec{ComplexMatrix::identity(4)}},
                            {decomposition_from_members(four, std::move(members))});
    };
    const FamilyPtr coarse_a =
        family_with({diag_projector({0, 1}, "low"), diag_projector({2, 3}, "high")});
    const FamilyPtr coarse_b =
        family_with({diag_projector({0, 2}, "even"), diag_projector({1, 3}, "odd")});
    const CompatibilityReport refined =
        families_compatible(coarse_a, coarse_b, cfg.tol.consistency_tol, cfg);
    CHECK(refined.compatible);
    CHECK(refined.reason == CompatibilityReason::commuting_refinement_consistent);
    REQUIRE(refined.refinement_violation.has_value());
    CHECK(*refined.refinement_violation < 1e-12);

    // structural mismatch is its own verdict
    const HilbertSpace q = make_space({{"spin", 2}});
    const FamilyPtr different_initial =
        build_family(pure_state(q, {cx{1.0, 0.0}, cx{0.0, 0.0}}), {1.0},
                     {PropagatorSpec{ComplexMatrix::identity(2)}},
                     {basis_decomposition(q, "spin", {"+z", "-z"})});
    const CompatibilityReport mismatch =
        families_compatible(fz, different_initial, cfg.tol.consistency_tol, cfg);
    CHECK_FALSE(mismatch.compatible);
    CHECK(mismatch.reason == CompatibilityReason::structure_mismatch);
}

TEST_CASE("incompatible-family propositions can never share a valid chain") {
    const FamilyPtr fz = z_basis_family();
    const FamilyPtr fx = x_basis_family();
    EngineConfig cfg;
    REQUIRE_FALSE(families_compatible(fz, fx, cfg.tol.consistency_tol, cfg).compatible);

    const DecoherenceMatrix dz = decoherence_functional(fz);
    const Proposition z_up = make_proposition(fz, {0}, "+z");
    const Proposition x_up = make_proposition(fx, {0}, "+x");
    for (const auto& steps :
         {std::vector<std::pair<Proposition, Proposition>>{{z_up, x_up}},
          std::vector<std::pair<Proposition, Proposition>>{{x_up, z_up}}}) {
        const Rule4Report report = validate_reasoning_chain(fz, dz, steps);
        CHECK_FALSE(report.valid);
        CHECK(report.failures[0].kind == Rule4FailureKind::cross_family);
    }
}

TEST_CASE("verdicts are invariant under outcome relabeling") {
    const HilbertSpace q = make_space({{"spin", 2}});
    auto family_with_labels = [&](const std::vector<std::string>& labels) {
        return build_family(maximally_mixed(q), {1.0},
                            {PropagatorSpec{ComplexMatrix::identity(2)}},
                            {basis_decomposition(q, "spin", labels)});
    };
    const FamilyPtr f1 = family_with_labels({"0", "1"});
    const FamilyPtr f2 = family_with_labels({"heads", "tails"});
    const DecoherenceMatrix d1 = decoherence_functional(f1);
    const DecoherenceMatrix d2 = decoherence_functional(f2);
    const Proposition p1 = make_proposition(f1, {0}, "p");
    const Proposition p2 = make_proposition(f2, {0}, "p");
    CHECK(proposition_probability(d1, p1) == proposition_probability(d2, p2));
    CHECK(validate_reasoning_chain(f1, d1, {{p1, p1}}).valid ==
          validate_reasoning_chain(f2, d2, {{p2, p2}}).valid);
}
