#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chronologic/space.hpp"

namespace chronologic {

/// Consistency condition variants. The medium condition (full off-diagonal
/// entries vanish) is the engine default; weak tests only the real parts.
enum class Condition { weak, medium };

const char* condition_name(Condition c);
Condition condition_from_name(const std::string& name);

inline constexpr std::size_t kDefaultHistoryCap = 4096;

/// Engine-wide knobs threaded through consistency gating and probabilities.
struct EngineConfig {
    ToleranceConfig tol;
    Condition condition = Condition::medium;
    std::size_t max_histories = kDefaultHistoryCap;
};

/// Propagator given as an explicit unitary matrix (fully checked).
using ExplicitUnitary = ComplexMatrix;

/// Propagator built as exp(-i * generator * duration).
struct HamiltonianStep {
    ComplexMatrix generator;
    double duration = 0.0;
};

/// Propagator assembled from factor-local gates, earliest first.
struct GateCircuit {
    std::vector<GateOp> gates;
};

using PropagatorSpec = std::variant<ExplicitUnitary, HamiltonianStep, GateCircuit>;

/// A family of histories: initial condition, time grid, inter-time unitaries
/// and one projective decomposition per time. Immutable once built.
struct Family {
    HilbertSpace space;
    DensityMatrix initial;                    ///< state at t0, strictly before times[0]
    std::vector<double> times;                ///< strictly increasing
    std::vector<ComplexMatrix> propagators;   ///< propagators[k] evolves t_{k-1} -> t_k
    std::vector<Decomposition> decompositions;

    std::size_t num_times() const { return times.size(); }
    /// Number of elementary histories M = product of decomposition sizes.
    std::size_t num_histories() const;

    bool operator==(const Family&) const = default;
};

using FamilyPtr = std::shared_ptr<const Family>;

/// Same family for logic purposes: pointer identity or exact structural equality.
bool same_family(const FamilyPtr& a, const FamilyPtr& b);

/// Validates all parts and realizes the propagators as unitary matrices.
/// Explicit matrices get the full ||U^t U - I|| check; propagators that are
/// unitary by construction (Hamiltonian steps, gate circuits) get a sampled
/// round-trip check. Errors name the failing index and deviation.
FamilyPtr build_family(DensityMatrix initial, std::vector<double> times,
                       std::vector<PropagatorSpec> propagator_specs,
                       std::vector<Decomposition> decompositions,
                       const EngineConfig& cfg = {});

/// One elementary history: a decomposition-member index per time.
struct History {
    FamilyPtr family;
    std::vector<std::size_t> outcome_indices;
    std::size_t flat_index = 0; ///< mixed radix, earliest time most significant
};

/// All M histories in mixed-radix order; errors if M exceeds the cap.
std::vector<History> enumerate_histories(const FamilyPtr& family,
                                         const EngineConfig& cfg = {});

History history_from_flat(const FamilyPtr& family, std::size_t flat_index);

/// Outcome labels of a history, one per time.
std::vector<std::string> outcome_labels(const History& h);

/// C = P_n U_n ... P_1 U_1 (earliest time applied first).
ComplexMatrix chain_operator(const FamilyPtr& family, const History& history);

/// The decoherence functional D(a, b) = Tr[C_a rho C_b^t] over all pairs of
/// elementary histories. Hermitian; diagonal entries are the candidate
/// probabilities.
struct DecoherenceMatrix {
    FamilyPtr family;
    std::size_t size = 0; ///< M
    ComplexMatrix entries;

    cx operator()(std::size_t alpha, std::size_t beta) const { return entries(alpha, beta); }
    double diagonal(std::size_t alpha) const { return entries(alpha, alpha).real(); }
    double diagonal_sum() const;
};

/// Production evaluation: the initial state is factored spectrally and chain
/// operators are applied to its eigenvectors; entries are evaluated in
/// parallel and merged deterministically (output independent of worker count).
DecoherenceMatrix decoherence_functional(const FamilyPtr& family, const EngineConfig& cfg = {});

/// Serial reference: explicit chain matrices paired under rho by the literal
/// trace formula. Kept for testing and benchmarking against the parallel path.
DecoherenceMatrix decoherence_functional_reference(const FamilyPtr& family,
                                                   const EngineConfig& cfg = {});

struct ViolatingPair {
    std::size_t alpha = 0;
    std::size_t beta = 0;
    double magnitude = 0.0;
};

struct ConsistencyReport {
    Condition condition = Condition::medium;
    double tolerance = 0.0;
    bool consistent = false;
    double max_violation = 0.0;          ///< normalized, see check_consistency
    std::vector<ViolatingPair> violating_pairs; ///< all pairs above tolerance, descending
};

/// Normalized violation per pair (a, b):
///   |D(a,b)| / sqrt(D(a,a) * D(b,b))   (medium; weak uses |Re D| on top)
/// with the convention 0 when either diagonal is at most structural_tol.
ConsistencyReport check_consistency(const DecoherenceMatrix& d, Condition condition, double tol,
                                    double structural_tol = ToleranceConfig{}.structural_tol);

/// D(a, a), refused when the family fails the configured consistency
/// condition unless `unchecked` is set.
double history_probability(const DecoherenceMatrix& d, const History& history,
                           const EngineConfig& cfg = {}, bool unchecked = false);

/// Independent oracle: evolve the state through the history, projecting at
/// each time, and read off the squared norm (pure initial state) or trace
/// (mixed). Never forms the decoherence matrix.
double sequential_projection_probability(const FamilyPtr& family, const History& history);

/// Sum of Re D(a, b) over all pairs drawn from the given history indices;
/// equals the sum of diagonals exactly when the family is weakly consistent.
double coarse_grained_weight(const DecoherenceMatrix& d, std::span<const std::size_t> indices);

/// Reverses the order of events: decomposition k maps to decomposition
/// n+1-k, each propagator becomes the adjoint of its interval mirror, and the
/// time stamps traverse the same window backwards. For a maximally mixed
/// initial state every history keeps the probability of its reversed image.
FamilyPtr time_reversed(const FamilyPtr& family, const EngineConfig& cfg = {});

} // namespace chronologic
