#include "chronologic/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace chronologic {

namespace {

std::size_t checked_total_dim(const std::vector<Factor>& factors) {
    if (factors.empty())
        throw Error::validation("space needs at least one factor");
    std::size_t total = 1;
    std::set<std::string> seen;
    for (const Factor& f : factors) {
        if (f.dim == 0)
            throw Error::validation("factor '" + f.label + "' has dimension 0");
        if (!seen.insert(f.label).second)
            throw Error::validation("duplicate factor label '" + f.label + "'");
        if (total > kMaxDenseDim / f.dim) {
            std::ostringstream msg;
            msg << "total dimension exceeds dense engine maximum " << kMaxDenseDim;
            throw Error::resource(msg.str());
        }
        total *= f.dim;
    }
    return total;
}

ComplexMatrix outer_product(const cxvec& v) {
    ComplexMatrix m(v.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
}

} // namespace

HilbertSpace::HilbertSpace(std::vector<Factor> factors)
    : factors_(std::move(factors)), total_dim_(checked_total_dim(factors_)) {}

std::size_t HilbertSpace::factor_index(const std::string& label) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label == label) return i;
    throw Error::validation("unknown factor '" + label + "'");
}

HilbertSpace make_space(const std::vector<std::pair<std::string, std::size_t>>& factors) {
    std::vector<Factor> fs;
    fs.reserve(factors.size());
    for (const auto& [label, dim] : factors) fs.push_back({label, dim});
    return HilbertSpace(std::move(fs));
}

DensityMatrix pure_state(const HilbertSpace& space, const cxvec& amplitudes) {
    if (amplitudes.size() != space.total_dim())
        throw Error::validation("pure_state: amplitude count does not match space dimension");
    const double n2 = norm2(amplitudes);
    if (!(n2 > 0.0) || !std::isfinite(n2))
        throw Error::validation("pure_state: amplitudes have zero or non-finite norm");
    cxvec normalized = amplitudes;
    const double inv = 1.0 / std::sqrt(n2);
    for (cx& a : normalized) a *= inv;
    return {space, outer_product(normalized)};
}

DensityMatrix maximally_mixed(const HilbertSpace& space) {
    const std::size_t d = space.total_dim();
    ComplexMatrix m(d, d);
    const double w = 1.0 / static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = w;
    return {space, std::move(m)};
}

DensityMatrix density_from_matrix(const HilbertSpace& space, ComplexMatrix m,
                                  const ToleranceConfig& tol) {
    if (m.rows() != space.total_dim() || m.cols() != space.total_dim())
        throw Error::validation("density matrix dimension does not match space");
    m.require_finite("density matrix");
    const double asym = hermitian_deviation(m);
    if (asym > tol.structural_tol) {
        std::ostringstream msg;
        msg << "density matrix not Hermitian, max asymmetry " << asym;
        throw Error::validation(msg.str());
    }
    const cx tr = trace(m);
    if (std::abs(tr - cx{1.0, 0.0}) > tol.structural_tol) {
        std::ostringstream msg;
        msg << "density matrix trace " << tr.real() << " != 1";
        throw Error::validation(msg.str());
    }
    const double min_eval = min_hermitian_eigenvalue(m);
    if (min_eval < -tol.structural_tol) {
        std::ostringstream msg;
        msg << "density matrix not positive semidefinite, min eigenvalue " << min_eval;
        throw Error::validation(msg.str());
    }
    return {space, std::move(m)};
}

Property property_from_matrix(const HilbertSpace& space, ComplexMatrix m,
                              const std::string& label, const ToleranceConfig& tol) {
    if (m.rows() != space.total_dim() || m.cols() != space.total_dim())
        throw Error::validation("projector '" + label + "': dimension does not match space");
    m.require_finite("projector '" + label + "'");
    const double asym = hermitian_deviation(m);
    if (asym > tol.structural_tol) {
        std::ostringstream msg;
        msg << "projector '" << label << "' not Hermitian, max asymmetry " << asym;
        throw Error::validation(msg.str());
    }
    const double idem = max_abs(m * m - m);
    if (idem > tol.structural_tol) {
        std::ostringstream msg;
        msg << "projector '" << label << "' not idempotent, max |P^2 - P| = " << idem;
        throw Error::validation(msg.str());
    }
    const double tr = trace(m).real();
    const auto rank = static_cast<std::size_t>(std::llround(tr));
    if (rank > space.total_dim())
        throw Error::validation("projector '" + label + "' has rank above space dimension");
    return {space, std::move(m), rank, label};
}

Property projector_from_vectors(const HilbertSpace& space, const std::vector<cxvec>& vectors,
                                const std::string& label, const ToleranceConfig& tol) {
    if (vectors.empty())
        throw Error::validation("projector '" + label + "': no spanning vectors given");
    for (const cxvec& v : vectors)
        if (v.size() != space.total_dim())
            throw Error::validation("projector '" + label +
                                    "': vector length does not match space dimension");

    const std::size_t r = vectors.size();
    ComplexMatrix gram(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) gram(i, j) = inner(vectors[i], vectors[j]);
    const double min_eval = min_hermitian_eigenvalue(gram);
    if (!(min_eval > tol.structural_tol)) {
        std::ostringstream msg;
        msg << "projector '" << label << "': vectors linearly dependent, Gram min eigenvalue "
            << min_eval;
        throw Error::validation(msg.str());
    }

    // Modified Gram-Schmidt with one re-orthogonalization pass; deterministic
    // given input order.
    std::vector<cxvec> basis;
    basis.reserve(r);
    for (const cxvec& v : vectors) {
        cxvec u = v;
        for (int pass = 0; pass < 2; ++pass)
            for (const cxvec& q : basis) {
                const cx overlap = inner(q, u);
                for (std::size_t k = 0; k < u.size(); ++k) u[k] -= overlap * q[k];
            }
        const double n = std::sqrt(norm2(u));
        if (!(n > std::sqrt(tol.structural_tol)))
            throw Error::validation("projector '" + label +
                                    "': vectors numerically dependent after orthogonalization");
        for (cx& x : u) x /= n;
        basis.push_back(std::move(u));
    }

    ComplexMatrix p(space.total_dim(), space.total_dim());
    for (const cxvec& q : basis)
        for (std::size_t i = 0; i < q.size(); ++i)
            for (std::size_t j = 0; j < q.size(); ++j) p(i, j) += q[i] * std::conj(q[j]);
    return {space, std::move(p), r, label};
}

std::size_t Decomposition::member_index(const std::string& label) const {
    for (std::size_t i = 0; i < members.size(); ++i)
        if (members[i].label == label) return i;
    throw Error::validation("unknown outcome label '" + label + "'");
}

Decomposition decomposition_from_members(const HilbertSpace& space,
                                         std::vector<Property> members,
                                         const ToleranceConfig& tol) {
    if (members.empty())
        throw Error::validation("decomposition needs at least one member");
    std::set<std::string> labels;
    for (const Property& p : members) {
        if (p.space != space)
            throw Error::validation("decomposition member '" + p.label + "' lives on another space");
        if (!labels.insert(p.label).second)
            throw Error::validation("duplicate outcome label '" + p.label + "'");
    }
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const double dev = max_abs(members[i].matrix * members[j].matrix);
            if (dev > tol.structural_tol) {
                std::ostringstream msg;
                msg << "decomposition members '" << members[i].label << "' and '"
                    << members[j].label << "' not orthogonal, max |PQ| = " << dev;
                throw Error::validation(msg.str());
            }
        }
    ComplexMatrix sum(space.total_dim(), space.total_dim());
    for (const Property& p : members) sum = sum + p.matrix;
    const double dev = max_abs(sum - ComplexMatrix::identity(space.total_dim()));
    if (dev > tol.structural_tol) {
        std::ostringstream msg;
        msg << "decomposition incomplete, max |sum P - I| = " << dev;
        throw Error::validation(msg.str());
    }
    return {space, std::move(members)};
}

Decomposition lifted_decomposition(
    const HilbertSpace& space, std::size_t first_factor, std::size_t last_factor,
    const std::vector<std::pair<std::string, ComplexMatrix>>& small_projectors,
    const ToleranceConfig& tol) {
    const auto& factors = space.factors();
    if (first_factor > last_factor || last_factor >= factors.size())
        throw Error::validation("lifted_decomposition: factor range out of bounds");

    std::size_t pre = 1, mid = 1, post = 1;
    for (std::size_t f = 0; f < factors.size(); ++f) {
        if (f < first_factor) pre *= factors[f].dim;
        else if (f <= last_factor) mid *= factors[f].dim;
        else post *= factors[f].dim;
    }

    // Validate the small projectors as a decomposition of the factor range
    // with full multiplicative rigor; tensoring with identities preserves
    // idempotence, orthogonality and completeness entrywise.
    std::vector<Factor> small_factors(factors.begin() + static_cast<std::ptrdiff_t>(first_factor),
                                      factors.begin() + static_cast<std::ptrdiff_t>(last_factor) + 1);
    const HilbertSpace small_space(std::move(small_factors));
    if (small_space.total_dim() != mid)
        throw Error::validation("lifted_decomposition: internal dimension bookkeeping error");
    std::vector<Property> small_members;
    small_members.reserve(small_projectors.size());
    for (const auto& [label, m] : small_projectors)
        small_members.push_back(property_from_matrix(small_space, m, label, tol));
    const Decomposition small = decomposition_from_members(small_space, std::move(small_members), tol);

    const ComplexMatrix eye_pre = ComplexMatrix::identity(pre);
    const ComplexMatrix eye_post = ComplexMatrix::identity(post);
    std::vector<Property> members;
    members.reserve(small.members.size());
    for (const Property& p : small.members) {
        ComplexMatrix lifted = tensor_product(tensor_product(eye_pre, p.matrix), eye_post);
        members.push_back({space, std::move(lifted), p.rank * pre * post, p.label});
    }
    return {space, std::move(members)};
}

Decomposition basis_decomposition(const HilbertSpace& space, const std::string& factor_label,
                                  const std::vector<std::string>& outcome_labels,
                                  const ToleranceConfig& tol) {
    const std::size_t f = space.factor_index(factor_label);
    const std::size_t dim = space.factors()[f].dim;
    if (outcome_labels.size() != dim) {
        std::ostringstream msg;
        msg << "factor '" << factor_label << "' has dimension " << dim << " but "
            << outcome_labels.size() << " outcome labels were given";
        throw Error::validation(msg.str());
    }
    std::vector<std::pair<std::string, ComplexMatrix>> projectors;
    projectors.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        ComplexMatrix p(dim, dim);
        p(i, i) = 1.0;
        projectors.emplace_back(outcome_labels[i], std::move(p));
    }
    return lifted_decomposition(space, f, f, projectors, tol);
}

Decomposition trivial_decomposition(const HilbertSpace& space, const std::string& label) {
    const std::size_t d = space.total_dim();
    return {space, {Property{space, ComplexMatrix::identity(d), d, label}}};
}

ComplexMatrix lift_operator(const HilbertSpace& space, const std::string& factor_label,
                            const ComplexMatrix& op) {
    const std::size_t f = space.factor_index(factor_label);
    const std::size_t dim = space.factors()[f].dim;
    if (!op.square() || op.rows() != dim) {
        std::ostringstream msg;
        msg << "lift_operator: operator is " << op.rows() << "x" << op.cols() << " but factor '"
            << factor_label << "' has dimension " << dim;
        throw Error::validation(msg.str());
    }
    std::size_t pre = 1, post = 1;
    for (std::size_t g = 0; g < space.num_factors(); ++g) {
        if (g < f) pre *= space.factors()[g].dim;
        else if (g > f) post *= space.factors()[g].dim;
    }
    return tensor_product(tensor_product(ComplexMatrix::identity(pre), op),
                          ComplexMatrix::identity(post));
}

void apply_gate(const HilbertSpace& space, const GateOp& gate, cxvec& state) {
    if (state.size() != space.total_dim())
        throw Error::validation("apply_gate: state length does not match space dimension");
    if (gate.targets.empty())
        throw Error::validation("apply_gate: gate has no targets");
    std::set<std::size_t> distinct(gate.targets.begin(), gate.targets.end());
    if (distinct.size() != gate.targets.size())
        throw Error::validation("apply_gate: duplicate gate targets");

    const auto& factors = space.factors();
    std::vector<std::size_t> strides(factors.size(), 1);
    for (std::size_t f = factors.size(); f-- > 1;)
        strides[f - 1] = strides[f] * factors[f].dim;

    std::size_t block = 1;
    for (std::size_t t : gate.targets) {
        if (t >= factors.size())
            throw Error::validation("apply_gate: target factor index out of range");
        block *= factors[t].dim;
    }
    if (!gate.matrix.square() || gate.matrix.rows() != block)
        throw Error::validation("apply_gate: gate dimension does not match its targets");

    // Offsets of the gate's local basis inside the full index space; the first
    // target is the most significant digit of the gate's own index.
    std::vector<std::size_t> offsets(block, 0);
    for (std::size_t g = 0; g < block; ++g) {
        std::size_t rem = g, off = 0;
        for (std::size_t t = gate.targets.size(); t-- > 0;) {
            const std::size_t d = factors[gate.targets[t]].dim;
            off += (rem % d) * strides[gate.targets[t]];
            rem /= d;
        }
        offsets[g] = off;
    }

    // Enumerate base indices (all target digits zero) with a mixed-radix
    // counter over the non-target factors.
    std::vector<std::size_t> free_factors;
    for (std::size_t f = 0; f < factors.size(); ++f)
        if (!distinct.count(f)) free_factors.push_back(f);

    std::size_t n_base = 1;
    for (std::size_t f : free_factors) n_base *= factors[f].dim;

    cxvec scratch(block);
    std::vector<std::size_t> digits(free_factors.size(), 0);
    for (std::size_t b = 0; b < n_base; ++b) {
        std::size_t base = 0;
        for (std::size_t k = 0; k < free_factors.size(); ++k)
            base += digits[k] * strides[free_factors[k]];

        for (std::size_t g = 0; g < block; ++g) scratch[g] = state[base + offsets[g]];
        for (std::size_t g = 0; g < block; ++g) {
            cx acc{0.0, 0.0};
            for (std::size_t h = 0; h < block; ++h) acc += gate.matrix(g, h) * scratch[h];
            state[base + offsets[g]] = acc;
        }

        for (std::size_t k = free_factors.size(); k-- > 0;) {
            if (++digits[k] < factors[free_factors[k]].dim) break;
            digits[k] = 0;
        }
    }
}

ComplexMatrix build_circuit_unitary(const HilbertSpace& space, const std::vector<GateOp>& gates) {
    const std::size_t d = space.total_dim();
    ComplexMatrix u(d, d);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (d >= 64)
#endif
    for (long long j = 0; j < static_cast<long long>(d); ++j) {
        cxvec col(d, cx{0.0, 0.0});
        col[static_cast<std::size_t>(j)] = 1.0;
        for (const GateOp& g : gates) apply_gate(space, g, col);
        for (std::size_t i = 0; i < d; ++i) u(i, static_cast<std::size_t>(j)) = col[i];
    }
    return u;
}

} // namespace chronologic
