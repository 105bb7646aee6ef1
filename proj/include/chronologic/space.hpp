#pragma once

#include <string>
#include <vector>

#include "chronologic/matrix.hpp"

namespace chronologic {

/// A tensor factor of a Hilbert space.
struct Factor {
    std::string label;
    std::size_t dim = 0;

    bool operator==(const Factor&) const = default;
};

/// Finite-dimensional Hilbert space with named tensor-factor structure.
class HilbertSpace {
  public:
    HilbertSpace() = default;
    explicit HilbertSpace(std::vector<Factor> factors);

    const std::vector<Factor>& factors() const { return factors_; }
    std::size_t total_dim() const { return total_dim_; }
    std::size_t num_factors() const { return factors_.size(); }

    /// Index of the factor with the given label; throws if unknown.
    std::size_t factor_index(const std::string& label) const;

    bool operator==(const HilbertSpace&) const = default;

  private:
    std::vector<Factor> factors_;
    std::size_t total_dim_ = 0;
};

HilbertSpace make_space(const std::vector<std::pair<std::string, std::size_t>>& factors);

/// Unit-trace, Hermitian, positive semidefinite state on a space.
struct DensityMatrix {
    HilbertSpace space;
    ComplexMatrix matrix;

    bool operator==(const DensityMatrix&) const = default;
};

/// Normalizes the amplitudes and forms the rank-1 outer product.
DensityMatrix pure_state(const HilbertSpace& space, const cxvec& amplitudes);

DensityMatrix maximally_mixed(const HilbertSpace& space);

/// Validates an arbitrary matrix as a density matrix (Hermitian, trace 1, PSD).
DensityMatrix density_from_matrix(const HilbertSpace& space, ComplexMatrix m,
                                  const ToleranceConfig& tol = {});

/// A property of the system: an orthogonal projector onto a subspace.
struct Property {
    HilbertSpace space;
    ComplexMatrix matrix;
    std::size_t rank = 0;
    std::string label;

    bool operator==(const Property&) const = default;
};

/// Orthonormalizes the span of the given vectors (modified Gram-Schmidt with a
/// re-orthogonalization pass) and returns the projector onto it.
Property projector_from_vectors(const HilbertSpace& space, const std::vector<cxvec>& vectors,
                                const std::string& label, const ToleranceConfig& tol = {});

/// Wraps an already-validated projector matrix. Checks P = P^dagger, P^2 = P.
Property property_from_matrix(const HilbertSpace& space, ComplexMatrix m,
                              const std::string& label, const ToleranceConfig& tol = {});

/// Exhaustive set of mutually exclusive alternatives at one time:
/// pairwise-orthogonal projectors summing to the identity.
struct Decomposition {
    HilbertSpace space;
    std::vector<Property> members;

    std::size_t size() const { return members.size(); }
    /// Index of the member with the given outcome label; throws if unknown.
    std::size_t member_index(const std::string& label) const;

    bool operator==(const Decomposition&) const = default;
};

/// Validates arbitrary projectors as a decomposition (orthogonality via member
/// products, completeness via the sum). O(m^2) matrix multiplies.
Decomposition decomposition_from_members(const HilbertSpace& space, std::vector<Property> members,
                                         const ToleranceConfig& tol = {});

/// Standard-basis alternatives on one factor, identity on the rest.
Decomposition basis_decomposition(const HilbertSpace& space, const std::string& factor_label,
                                  const std::vector<std::string>& outcome_labels,
                                  const ToleranceConfig& tol = {});

/// Lifts a decomposition of the contiguous factor range [first, last] to the
/// full space (identity on the remaining factors). The small members are
/// validated with full rigor; tensoring with the identity preserves
/// idempotence, orthogonality and completeness exactly, so the lifted members
/// are not re-multiplied.
Decomposition lifted_decomposition(const HilbertSpace& space, std::size_t first_factor,
                                   std::size_t last_factor,
                                   const std::vector<std::pair<std::string, ComplexMatrix>>& small_projectors,
                                   const ToleranceConfig& tol = {});

/// The single-member decomposition {I}: "no statement at this time".
Decomposition trivial_decomposition(const HilbertSpace& space, const std::string& label = "any");

/// I x ... x op x ... x I with op at the named factor position.
ComplexMatrix lift_operator(const HilbertSpace& space, const std::string& factor_label,
                            const ComplexMatrix& op);

/// A gate acting on a subset of factors, used to assemble propagators.
struct GateOp {
    ComplexMatrix matrix;             ///< dim = product of target factor dims
    std::vector<std::size_t> targets; ///< factor indices, distinct
};

/// Applies the gate to a state vector in place.
void apply_gate(const HilbertSpace& space, const GateOp& gate, cxvec& state);

/// Dense unitary of a gate sequence (earliest gate applied first), built by
/// streaming the circuit through the columns of the identity.
ComplexMatrix build_circuit_unitary(const HilbertSpace& space, const std::vector<GateOp>& gates);

} // namespace chronologic
