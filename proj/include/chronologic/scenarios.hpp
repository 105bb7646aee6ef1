#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chronologic/logic.hpp"

namespace chronologic {

/// One checkable claim about a scenario: an engine-computed quantity, the
/// value it must take, and where that value comes from.
struct Expectation {
    std::string description;
    std::string quantity;
    double expected = 0.0;
    double tolerance = 0.0;
    std::string derivation; ///< origin of the expected value (closed form, counting, ...)
    std::function<double()> evaluate;
};

/// A packaged canonical situation: family, named propositions, and the
/// expected analyses as executable regression fixtures.
struct Scenario {
    std::string name;
    FamilyPtr family;
    std::map<std::string, Proposition> named_propositions;
    std::vector<Expectation> expectations;

    const Proposition& proposition(const std::string& name) const;
};

/// n successive tosses of a (possibly biased) coin, one dim-2 factor per toss
/// with identity dynamics: a classical sample space embedded exactly.
Scenario coin_toss_scenario(std::size_t n, double bias, const EngineConfig& cfg = {});

/// Spin prepared as cos(theta)|+z> + sin(theta)|-z>, measured by a two-state
/// pointer via a controlled flip; spin basis at t1, pointer basis at t2.
Scenario measurement_chain_scenario(double theta, const EngineConfig& cfg = {});

/// Same dynamics, but the t2 decomposition uses the superposition basis of
/// macroscopically distinct pointer branches instead of the pointer basis.
Scenario mqs_scenario(double theta, const EngineConfig& cfg = {});

enum class EprOrder { a_first, b_first, a_not_measured };
enum class Axis { z, x };

EprOrder epr_order_from_name(const std::string& name);
Axis axis_from_name(const std::string& name);
const char* epr_order_name(EprOrder order);
const char* axis_name(Axis axis);

/// Spin-singlet pair; qubit A is measured by a local apparatus before or
/// after the time slot carrying B's decomposition (or not at all), and B is
/// analyzed along its own axis. B's marginals cannot depend on the ordering.
Scenario epr_scenario(EprOrder order, Axis a_axis, Axis b_axis, const EngineConfig& cfg = {});

/// Measurement-chain dynamics followed by partial copies of the pointer onto
/// N environment qubits (controlled rotation by coupling_angle), analyzed in
/// the superposition basis at t2. Returns (N, normalized max violation) for
/// N = 0..n_env_max; each environment record multiplies the off-diagonal
/// weight by cos(coupling_angle).
std::vector<std::pair<std::size_t, double>> decoherence_sweep(std::size_t n_env_max,
                                                              double coupling_angle,
                                                              const EngineConfig& cfg = {});

/// The family behind one sweep point, exposed for tests.
Scenario mqs_environment_scenario(std::size_t n_env, double coupling_angle,
                                  const EngineConfig& cfg = {});

// --- CLI-facing registry -----------------------------------------------

struct ScenarioParamDoc {
    std::string name;
    std::string description;
    std::string default_value;
};

struct ScenarioInfo {
    std::string name;
    std::string description;
    std::vector<ScenarioParamDoc> params;
    bool is_sweep = false;
};

const std::vector<ScenarioInfo>& list_scenarios();

/// Builds a scenario by registry name from string parameters; throws a parse
/// error for unknown names, unknown parameters or malformed values.
Scenario make_scenario(const std::string& name, const std::map<std::string, std::string>& params,
                       const EngineConfig& cfg = {});

/// Runs the sweep by registry name (name must be the sweep entry).
std::vector<std::pair<std::size_t, double>> run_sweep(
    const std::string& name, const std::map<std::string, std::string>& params,
    const EngineConfig& cfg = {});

} // namespace chronologic
