#include "chronologic/scenarios.hpp"

#include <cmath>
#include <sstream>

namespace chronologic {

namespace {

constexpr double kPi = 3.14159265358979323846;

ComplexMatrix pauli_x() {
    return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
}

ComplexMatrix rotation2(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return ComplexMatrix::from_rows({{c, -s}, {s, c}});
}

struct AxisBasis {
    ComplexMatrix plus;
    ComplexMatrix minus;
    std::string plus_label;
    std::string minus_label;
};

AxisBasis axis_basis(Axis axis) {
    if (axis == Axis::z) {
        return {ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}}),
                ComplexMatrix::from_rows({{0.0, 0.0}, {0.0, 1.0}}), "+z", "-z"};
    }
    return {ComplexMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}}),
            ComplexMatrix::from_rows({{0.5, -0.5}, {-0.5, 0.5}}), "+x", "-x"};
}

/// Controlled flip |s, p> -> |s, p xor s>: the pointer copies the spin.
ComplexMatrix controlled_flip() {
    ComplexMatrix u(4, 4);
    u(0, 0) = 1.0;
    u(1, 1) = 1.0;
    u(2, 3) = 1.0;
    u(3, 2) = 1.0;
    return u;
}

/// Measurement coupling on (system, apparatus): copy the system's axis
/// outcome onto the apparatus, P_plus x I + P_minus x X.
ComplexMatrix measurement_gate(Axis axis) {
    const AxisBasis basis = axis_basis(axis);
    return tensor_product(basis.plus, ComplexMatrix::identity(2)) +
           tensor_product(basis.minus, pauli_x());
}

/// Superposition basis of the four spin(x)pointer branch states:
/// (|+z,up> +- |-z,down>)/sqrt2 and (|+z,down> +- |-z,up>)/sqrt2.
std::vector<std::pair<std::string, ComplexMatrix>> mqs_projectors() {
    auto outer_pm = [](std::size_t i, std::size_t j, double sign) {
        ComplexMatrix p(4, 4);
        p(i, i) = 0.5;
        p(j, j) = 0.5;
        p(i, j) = 0.5 * sign;
        p(j, i) = 0.5 * sign;
        return p;
    };
    return {{"mqs+", outer_pm(0, 3, 1.0)},
            {"mqs-", outer_pm(0, 3, -1.0)},
            {"ghost+", outer_pm(1, 2, 1.0)},
            {"ghost-", outer_pm(1, 2, -1.0)}};
}

Proposition label_at_time(const FamilyPtr& family, std::size_t time_index,
                          const std::string& label, const std::string& name,
                          const EngineConfig& cfg) {
    return proposition_from_predicate(
        family,
        [time_index, label](const std::vector<std::string>& labels) {
            return labels[time_index] == label;
        },
        name, cfg);
}

double max_consistency_violation(const FamilyPtr& family, const EngineConfig& cfg) {
    const DecoherenceMatrix d = decoherence_functional(family, cfg);
    return check_consistency(d, cfg.condition, cfg.tol.consistency_tol, cfg.tol.structural_tol)
        .max_violation;
}

/// The measurement-chain family with N environment qubits partially copying
/// the pointer, analyzed in the spin basis at t1 and the superposition basis
/// at t2. N = 0 reduces to the plain superposition-basis family.
FamilyPtr mqs_environment_family(std::size_t n_env, double theta, double coupling_angle,
                                 const EngineConfig& cfg) {
    std::vector<std::pair<std::string, std::size_t>> factors = {{"spin", 2}, {"pointer", 2}};
    for (std::size_t k = 1; k <= n_env; ++k)
        factors.emplace_back("env" + std::to_string(k), 2);
    const HilbertSpace space = make_space(factors);

    cxvec amps(space.total_dim(), cx{0.0, 0.0});
    amps[0] = std::cos(theta);
    amps[space.total_dim() / 2] = std::sin(theta); // |-z, ready, 0...0>
    DensityMatrix initial = pure_state(space, amps);

    GateCircuit coupling;
    coupling.gates.push_back({controlled_flip(), {0, 1}});
    const ComplexMatrix partial_copy =
        tensor_product(ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}}),
                       ComplexMatrix::identity(2)) +
        tensor_product(ComplexMatrix::from_rows({{0.0, 0.0}, {0.0, 1.0}}),
                       rotation2(coupling_angle));
    for (std::size_t k = 1; k <= n_env; ++k)
        coupling.gates.push_back({partial_copy, {1, 1 + k}});

    std::vector<PropagatorSpec> props;
    props.emplace_back(ComplexMatrix::identity(space.total_dim()));
    props.emplace_back(std::move(coupling));

    std::vector<Decomposition> decs;
    decs.push_back(basis_decomposition(space, "spin", {"+z", "-z"}, cfg.tol));
    decs.push_back(lifted_decomposition(space, 0, 1, mqs_projectors(), cfg.tol));

    return build_family(std::move(initial), {1.0, 2.0}, std::move(props), std::move(decs), cfg);
}

std::size_t parse_count(const std::map<std::string, std::string>& params, const std::string& key,
                        std::size_t fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        const long long v = std::stoll(it->second);
        if (v < 0) throw std::out_of_range("negative");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw Error::parse("parameter '" + key + "': expected a count, got '" + it->second + "'");
    }
}

double parse_real(const std::map<std::string, std::string>& params, const std::string& key,
                  double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw Error::parse("parameter '" + key + "': expected a real, got '" + it->second + "'");
    }
}

std::string parse_choice(const std::map<std::string, std::string>& params, const std::string& key,
                         const std::string& fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown_params(const std::map<std::string, std::string>& params,
                           const std::vector<std::string>& known) {
    for (const auto& [key, value] : params) {
        (void)value;
        bool ok = false;
        for (const std::string& k : known)
            if (k == key) {
                ok = true;
                break;
            }
        if (!ok) throw Error::parse("unknown scenario parameter '" + key + "'");
    }
}

} // namespace

const Proposition& Scenario::proposition(const std::string& prop_name) const {
    auto it = named_propositions.find(prop_name);
    if (it == named_propositions.end())
        throw Error::validation("scenario '" + name + "' has no proposition '" + prop_name + "'");
    return it->second;
}

Scenario coin_toss_scenario(std::size_t n, double bias, const EngineConfig& cfg) {
    if (n < 1 || n > 10)
        throw Error::validation("coin_toss: n must be in [1, 10]");
    if (!(bias >= 0.0 && bias <= 1.0))
        throw Error::validation("coin_toss: bias must lie in [0, 1]");

    std::vector<std::pair<std::string, std::size_t>> factors;
    for (std::size_t k = 1; k <= n; ++k)
        factors.emplace_back("coin" + std::to_string(k), 2);
    const HilbertSpace space = make_space(factors);
    const std::size_t d = space.total_dim();

    // Product of per-toss diag(bias, 1-bias): heads is basis state 0.
    ComplexMatrix rho(d, d);
    for (std::size_t idx = 0; idx < d; ++idx) {
        double w = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const bool tails = (idx >> (n - 1 - k)) & 1u;
            w *= tails ? (1.0 - bias) : bias;
        }
        rho(idx, idx) = w;
    }

    std::vector<double> times;
    std::vector<PropagatorSpec> props;
    std::vector<Decomposition> decs;
    for (std::size_t k = 1; k <= n; ++k) {
        times.push_back(static_cast<double>(k));
        props.emplace_back(ComplexMatrix::identity(d));
        decs.push_back(basis_decomposition(space, "coin" + std::to_string(k), {"H", "T"}, cfg.tol));
    }

    Scenario s;
    s.name = "coin_toss";
    s.family = build_family({space, std::move(rho)}, std::move(times), std::move(props),
                            std::move(decs), cfg);

    for (std::size_t k = 1; k <= n; ++k) {
        const std::string name = "H_at_" + std::to_string(k);
        s.named_propositions.emplace(name, label_at_time(s.family, k - 1, "H", name, cfg));
    }
    if (n >= 2) {
        s.named_propositions.emplace(
            "one_H_in_first_two",
            proposition_from_predicate(
                s.family,
                [](const std::vector<std::string>& labels) {
                    return (labels[0] == "H") + (labels[1] == "H") == 1;
                },
                "one_H_in_first_two", cfg));
    }

    const FamilyPtr family = s.family;
    s.expectations.push_back(
        {"histories carry the product-law weights", "max |p - product law|", 0.0, 1e-10,
         "per-toss weight product", [family, cfg, n, bias]() {
             const DecoherenceMatrix dm = decoherence_functional(family, cfg);
             double dev = 0.0;
             for (const History& h : enumerate_histories(family, cfg)) {
                 double w = 1.0;
                 for (std::size_t k = 0; k < n; ++k)
                     w *= h.outcome_indices[k] == 0 ? bias : 1.0 - bias;
                 dev = std::max(dev, std::abs(dm.diagonal(h.flat_index) - w));
             }
             return dev;
         }});
    s.expectations.push_back({"probabilities sum to one", "sum p(alpha)", 1.0, 1e-10,
                              "trace identity", [family, cfg]() {
                                  return decoherence_functional(family, cfg).diagonal_sum();
                              }});
    s.expectations.push_back({"the family is consistent", "max normalized violation", 0.0, 1e-12,
                              "orthogonal diagonal supports", [family, cfg]() {
                                  return max_consistency_violation(family, cfg);
                              }});
    if (n >= 2) {
        const Proposition prop = s.proposition("one_H_in_first_two");
        s.expectations.push_back({"exactly one H among tosses 1-2", "p(one_H_in_first_two)",
                                  2.0 * bias * (1.0 - bias), 1e-10, "counting the two orderings",
                                  [family, cfg, prop]() {
                                      const DecoherenceMatrix dm =
                                          decoherence_functional(family, cfg);
                                      return proposition_probability(dm, prop, cfg);
                                  }});
    }
    return s;
}

Scenario measurement_chain_scenario(double theta, const EngineConfig& cfg) {
    const HilbertSpace space = make_space({{"spin", 2}, {"pointer", 2}});
    cxvec amps(4, cx{0.0, 0.0});
    amps[0] = std::cos(theta); // |+z, ready>
    amps[2] = std::sin(theta); // |-z, ready>
    DensityMatrix initial = pure_state(space, amps);

    std::vector<PropagatorSpec> props;
    props.emplace_back(ComplexMatrix::identity(4));
    props.emplace_back(controlled_flip());

    std::vector<Decomposition> decs;
    decs.push_back(basis_decomposition(space, "spin", {"+z", "-z"}, cfg.tol));
    decs.push_back(basis_decomposition(space, "pointer", {"up", "down"}, cfg.tol));

    Scenario s;
    s.name = "measurement_chain";
    s.family = build_family(std::move(initial), {1.0, 2.0}, std::move(props), std::move(decs), cfg);
    s.named_propositions.emplace("spin_up_t1", label_at_time(s.family, 0, "+z", "spin_up_t1", cfg));
    s.named_propositions.emplace("spin_down_t1",
                                 label_at_time(s.family, 0, "-z", "spin_down_t1", cfg));
    s.named_propositions.emplace("pointer_up_t2",
                                 label_at_time(s.family, 1, "up", "pointer_up_t2", cfg));
    s.named_propositions.emplace("pointer_down_t2",
                                 label_at_time(s.family, 1, "down", "pointer_down_t2", cfg));

    const FamilyPtr family = s.family;
    const double p_up = std::cos(theta) * std::cos(theta);
    s.expectations.push_back({"the family is consistent", "max normalized violation", 0.0, 1e-12,
                              "pointer branches are orthogonal", [family, cfg]() {
                                  return max_consistency_violation(family, cfg);
                              }});
    const Proposition up = s.proposition("pointer_up_t2");
    s.expectations.push_back({"pointer-up weight", "p(pointer_up_t2)", p_up, 1e-10,
                              "squared amplitude of the up branch", [family, cfg, up]() {
                                  const DecoherenceMatrix dm = decoherence_functional(family, cfg);
                                  return proposition_probability(dm, up, cfg);
                              }});
    if (p_up > 1e-8) {
        const Proposition spin_up = s.proposition("spin_up_t1");
        s.expectations.push_back(
            {"pointer up retrodicts spin up", "p(spin_up_t1 | pointer_up_t2)", 1.0, 1e-10,
             "the coupling is a faithful record", [family, cfg, up, spin_up]() {
                 const DecoherenceMatrix dm = decoherence_functional(family, cfg);
                 return conditional_probability(dm, up, spin_up, cfg);
             }});
    }
    return s;
}

Scenario mqs_scenario(double theta, const EngineConfig& cfg) {
    const HilbertSpace space = make_space({{"spin", 2}, {"pointer", 2}});
    cxvec amps(4, cx{0.0, 0.0});
    amps[0] = std::cos(theta);
    amps[2] = std::sin(theta);
    DensityMatrix initial = pure_state(space, amps);

    std::vector<PropagatorSpec> props;
    props.emplace_back(ComplexMatrix::identity(4));
    props.emplace_back(controlled_flip());

    std::vector<Decomposition> decs;
    decs.push_back(basis_decomposition(space, "spin", {"+z", "-z"}, cfg.tol));
    decs.push_back(lifted_decomposition(space, 0, 1, mqs_projectors(), cfg.tol));

    Scenario s;
    s.name = "mqs";
    s.family = build_family(std::move(initial), {1.0, 2.0}, std::move(props), std::move(decs), cfg);
    s.named_propositions.emplace("spin_up_t1", label_at_time(s.family, 0, "+z", "spin_up_t1", cfg));
    s.named_propositions.emplace("mqs_plus_t2",
                                 label_at_time(s.family, 1, "mqs+", "mqs_plus_t2", cfg));

    const FamilyPtr family = s.family;
    const double branch = std::min(std::cos(theta) * std::cos(theta),
                                   std::sin(theta) * std::sin(theta));
    if (branch > 1e-6) {
        // Both branches populated: the superposition members interfere fully.
        s.expectations.push_back({"the family is inconsistent", "max normalized violation", 1.0,
                                  1e-9, "both branches feed one superposition member",
                                  [family, cfg]() {
                                      return max_consistency_violation(family, cfg);
                                  }});
    } else if (branch < 1e-12) {
        s.expectations.push_back({"single-branch family is consistent",
                                  "max normalized violation", 0.0, 1e-10, "one branch is empty",
                                  [family, cfg]() {
                                      return max_consistency_violation(family, cfg);
                                  }});
    }
    return s;
}

EprOrder epr_order_from_name(const std::string& name) {
    if (name == "A_first") return EprOrder::a_first;
    if (name == "B_first") return EprOrder::b_first;
    if (name == "A_not_measured") return EprOrder::a_not_measured;
    throw Error::parse("unknown EPR order '" + name +
                       "' (expected A_first|B_first|A_not_measured)");
}

Axis axis_from_name(const std::string& name) {
    if (name == "z") return Axis::z;
    if (name == "x") return Axis::x;
    throw Error::parse("unknown axis '" + name + "' (expected z|x)");
}

const char* epr_order_name(EprOrder order) {
    switch (order) {
    case EprOrder::a_first: return "A_first";
    case EprOrder::b_first: return "B_first";
    case EprOrder::a_not_measured: return "A_not_measured";
    }
    return "unknown";
}

const char* axis_name(Axis axis) {
    return axis == Axis::z ? "z" : "x";
}

Scenario epr_scenario(EprOrder order, Axis a_axis, Axis b_axis, const EngineConfig& cfg) {
    const AxisBasis b_basis = axis_basis(b_axis);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    Scenario s;
    s.name = "epr";

    if (order == EprOrder::a_not_measured) {
        const HilbertSpace space = make_space({{"qubitA", 2}, {"qubitB", 2}});
        cxvec amps(4, cx{0.0, 0.0});
        amps[1] = inv_sqrt2;  // |+z, -z>
        amps[2] = -inv_sqrt2; // |-z, +z>
        std::vector<PropagatorSpec> props;
        props.emplace_back(ComplexMatrix::identity(4));
        std::vector<Decomposition> decs;
        decs.push_back(lifted_decomposition(space, 1, 1,
                                            {{b_basis.plus_label, b_basis.plus},
                                             {b_basis.minus_label, b_basis.minus}},
                                            cfg.tol));
        s.family = build_family(pure_state(space, amps), {1.0}, std::move(props), std::move(decs),
                                cfg);
        s.named_propositions.emplace("B_plus",
                                     label_at_time(s.family, 0, b_basis.plus_label, "B_plus", cfg));
        s.named_propositions.emplace(
            "B_minus", label_at_time(s.family, 0, b_basis.minus_label, "B_minus", cfg));
    } else {
        const HilbertSpace space =
            make_space({{"qubitA", 2}, {"qubitB", 2}, {"apparatusA", 2}});
        cxvec amps(8, cx{0.0, 0.0});
        amps[2] = inv_sqrt2;  // |+z, -z, ready>
        amps[4] = -inv_sqrt2; // |-z, +z, ready>

        GateCircuit measure;
        measure.gates.push_back({measurement_gate(a_axis), {0, 2}});

        Decomposition b_dec = lifted_decomposition(space, 1, 1,
                                                   {{b_basis.plus_label, b_basis.plus},
                                                    {b_basis.minus_label, b_basis.minus}},
                                                   cfg.tol);
        Decomposition app_dec = basis_decomposition(space, "apparatusA", {"up", "down"}, cfg.tol);

        std::vector<PropagatorSpec> props;
        std::vector<Decomposition> decs;
        std::size_t b_time = 0, app_time = 0;
        if (order == EprOrder::a_first) {
            props.emplace_back(std::move(measure));
            props.emplace_back(ComplexMatrix::identity(8));
            decs.push_back(std::move(app_dec));
            decs.push_back(std::move(b_dec));
            app_time = 0;
            b_time = 1;
        } else {
            props.emplace_back(ComplexMatrix::identity(8));
            props.emplace_back(std::move(measure));
            decs.push_back(std::move(b_dec));
            decs.push_back(std::move(app_dec));
            b_time = 0;
            app_time = 1;
        }
        s.family = build_family(pure_state(space, amps), {1.0, 2.0}, std::move(props),
                                std::move(decs), cfg);
        s.named_propositions.emplace(
            "B_plus", label_at_time(s.family, b_time, b_basis.plus_label, "B_plus", cfg));
        s.named_propositions.emplace(
            "B_minus", label_at_time(s.family, b_time, b_basis.minus_label, "B_minus", cfg));
        s.named_propositions.emplace("app_up",
                                     label_at_time(s.family, app_time, "up", "app_up", cfg));
        s.named_propositions.emplace("app_down",
                                     label_at_time(s.family, app_time, "down", "app_down", cfg));
    }

    const FamilyPtr family = s.family;
    s.expectations.push_back({"the family is consistent", "max normalized violation", 0.0, 1e-12,
                              "records and orthogonal outcomes", [family, cfg]() {
                                  return max_consistency_violation(family, cfg);
                              }});
    for (const char* which : {"B_plus", "B_minus"}) {
        const Proposition prop = s.proposition(which);
        s.expectations.push_back({std::string("B marginal for ") + which,
                                  "p(" + std::string(which) + ")", 0.5, 1e-12,
                                  "singlet marginals are unpolarized", [family, cfg, prop]() {
                                      const DecoherenceMatrix dm =
                                          decoherence_functional(family, cfg);
                                      return proposition_probability(dm, prop, cfg);
                                  }});
    }
    if (order != EprOrder::a_not_measured) {
        const Proposition app_up = s.proposition("app_up");
        if (a_axis == b_axis) {
            const Proposition b_minus = s.proposition("B_minus");
            s.expectations.push_back(
                {"perfect anticorrelation along a shared axis", "p(B_minus | app_up)", 1.0, 1e-10,
                 "singlet anticorrelation", [family, cfg, app_up, b_minus]() {
                     const DecoherenceMatrix dm = decoherence_functional(family, cfg);
                     return conditional_probability(dm, app_up, b_minus, cfg);
                 }});
        } else {
            const Proposition b_plus = s.proposition("B_plus");
            s.expectations.push_back(
                {"complementary axes are uncorrelated", "p(B_plus | app_up)", 0.5, 1e-10,
                 "conjugate axes decouple", [family, cfg, app_up, b_plus]() {
                     const DecoherenceMatrix dm = decoherence_functional(family, cfg);
                     return conditional_probability(dm, app_up, b_plus, cfg);
                 }});
        }
    }
    return s;
}

Scenario mqs_environment_scenario(std::size_t n_env, double coupling_angle,
                                  const EngineConfig& cfg) {
    Scenario s;
    s.name = "mqs_environment";
    s.family = mqs_environment_family(n_env, kPi / 4.0, coupling_angle, cfg);
    s.named_propositions.emplace("spin_up_t1", label_at_time(s.family, 0, "+z", "spin_up_t1", cfg));
    s.named_propositions.emplace("mqs_plus_t2",
                                 label_at_time(s.family, 1, "mqs+", "mqs_plus_t2", cfg));
    const FamilyPtr family = s.family;
    const double expected = std::pow(std::cos(coupling_angle), static_cast<double>(n_env));
    s.expectations.push_back(
        {"interference shrinks with each environment record", "max normalized violation",
         std::abs(expected), 1e-9, "per-record overlap cos(angle)^N", [family, cfg]() {
             return max_consistency_violation(family, cfg);
         }});
    return s;
}

std::vector<std::pair<std::size_t, double>> decoherence_sweep(std::size_t n_env_max,
                                                              double coupling_angle,
                                                              const EngineConfig& cfg) {
    if (n_env_max > 10)
        throw Error::validation("decoherence_sweep: n_env_max must be at most 10");
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(n_env_max + 1);
    for (std::size_t n = 0; n <= n_env_max; ++n) {
        const FamilyPtr family = mqs_environment_family(n, kPi / 4.0, coupling_angle, cfg);
        out.emplace_back(n, max_consistency_violation(family, cfg));
    }
    return out;
}

const std::vector<ScenarioInfo>& list_scenarios() {
    static const std::vector<ScenarioInfo> infos = {
        {"coin_toss",
         "n successive coin tosses embedded as one dim-2 factor per toss; a classical sample "
         "space with identity dynamics",
         {{"n", "number of tosses, 1..10", "3"}, {"bias", "probability of heads", "0.5"}},
         false},
        {"measurement_chain",
         "spin measured by a two-state pointer: spin basis at t1, pointer basis at t2",
         {{"theta", "initial spin angle: cos(theta)|+z> + sin(theta)|-z>", "0.7853981633974483"}},
         false},
        {"mqs",
         "measurement dynamics analyzed in the superposition basis of the pointer branches",
         {{"theta", "initial spin angle", "0.7853981633974483"}},
         false},
        {"epr",
         "spin singlet; apparatus measures A before or after B's time slot, or not at all",
         {{"order", "A_first | B_first | A_not_measured", "A_first"},
          {"a_axis", "apparatus axis, z | x", "z"},
          {"b_axis", "analysis axis for B, z | x", "z"}},
         false},
        {"decoherence_sweep",
         "superposition-basis family with N pointer records in the environment; reports the "
         "normalized max violation for N = 0..n_env_max",
         {{"n_env_max", "largest environment size, 0..10", "8"},
          {"coupling_angle", "controlled rotation angle per record", "0.7853981633974483"}},
         true},
    };
    return infos;
}

Scenario make_scenario(const std::string& name, const std::map<std::string, std::string>& params,
                       const EngineConfig& cfg) {
    if (name == "coin_toss") {
        reject_unknown_params(params, {"n", "bias"});
        return coin_toss_scenario(parse_count(params, "n", 3), parse_real(params, "bias", 0.5),
                                  cfg);
    }
    if (name == "measurement_chain") {
        reject_unknown_params(params, {"theta"});
        return measurement_chain_scenario(parse_real(params, "theta", kPi / 4.0), cfg);
    }
    if (name == "mqs") {
        reject_unknown_params(params, {"theta"});
        return mqs_scenario(parse_real(params, "theta", kPi / 4.0), cfg);
    }
    if (name == "epr") {
        reject_unknown_params(params, {"order", "a_axis", "b_axis"});
        return epr_scenario(epr_order_from_name(parse_choice(params, "order", "A_first")),
                            axis_from_name(parse_choice(params, "a_axis", "z")),
                            axis_from_name(parse_choice(params, "b_axis", "z")), cfg);
    }
    if (name == "decoherence_sweep")
        throw Error::parse("decoherence_sweep is a sweep; it has no single family");
    throw Error::parse("unknown scenario '" + name + "'");
}

std::vector<std::pair<std::size_t, double>> run_sweep(
    const std::string& name, const std::map<std::string, std::string>& params,
    const EngineConfig& cfg) {
    if (name != "decoherence_sweep")
        throw Error::parse("'" + name + "' is not a sweep");
    reject_unknown_params(params, {"n_env_max", "coupling_angle"});
    return decoherence_sweep(parse_count(params, "n_env_max", 8),
                             parse_real(params, "coupling_angle", kPi / 4.0), cfg);
}

} // namespace chronologic
