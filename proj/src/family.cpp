#include "chronologic/family.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chronologic {

namespace {

// Workspace guard for the functional's evolved-vector buffer (complex entries).
constexpr std::size_t kFunctionalWorkspaceCap = std::size_t{1} << 26;

// Eigenvalues of rho at or below this are treated as empty spectral modes.
constexpr double kSpectralCutoff = 1e-15;

enum class UnitaryCheckMode { full, sampled };

void check_propagator_unitary(const ComplexMatrix& u, std::size_t index, std::size_t dim,
                              UnitaryCheckMode mode, double tol) {
    if (!u.square() || u.rows() != dim) {
        std::ostringstream msg;
        msg << "propagator " << index << " is " << u.rows() << "x" << u.cols()
            << " but the space has dimension " << dim;
        throw Error::validation(msg.str());
    }
    u.require_finite("propagator " + std::to_string(index));
    if (mode == UnitaryCheckMode::full) {
        const UnitaryCheck check = is_unitary(u, tol);
        if (!check.unitary) {
            std::ostringstream msg;
            msg << "propagator " << index << " not unitary, max |U^t U - I| = " << check.deviation;
            throw Error::validation(msg.str());
        }
        return;
    }
    // Constructed-unitary path: deterministic sampled round trips U^t(Uv) = v.
    std::mt19937_64 rng(0x5eedULL + index);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int sample = 0; sample < 3; ++sample) {
        cxvec v(dim);
        for (cx& x : v) x = cx{gauss(rng), gauss(rng)};
        const double scale = 1.0 / std::sqrt(norm2(v));
        for (cx& x : v) x *= scale;
        cxvec uv, round_trip;
        kernels::matvec_serial(u, v, uv);
        const ComplexMatrix ua = adjoint(u);
        kernels::matvec_serial(ua, uv, round_trip);
        double dev = 0.0;
        for (std::size_t i = 0; i < dim; ++i) dev = std::max(dev, std::abs(round_trip[i] - v[i]));
        if (dev > tol) {
            std::ostringstream msg;
            msg << "propagator " << index << " failed the sampled unitarity check, deviation "
                << dev;
            throw Error::validation(msg.str());
        }
    }
}

FamilyPtr realize_family(DensityMatrix initial, std::vector<double> times,
                         std::vector<std::pair<ComplexMatrix, UnitaryCheckMode>> propagators,
                         std::vector<Decomposition> decompositions, const EngineConfig& cfg) {
    cfg.tol.validate();
    const std::size_t n = times.size();
    if (n == 0)
        throw Error::validation("family needs at least one time");
    if (propagators.size() != n || decompositions.size() != n) {
        std::ostringstream msg;
        msg << "family needs one propagator and one decomposition per time: got " << n
            << " times, " << propagators.size() << " propagators, " << decompositions.size()
            << " decompositions";
        throw Error::validation(msg.str());
    }
    for (std::size_t k = 0; k + 1 < n; ++k)
        if (!(times[k] < times[k + 1])) {
            std::ostringstream msg;
            msg << "times not strictly increasing at index " << k + 1 << ": " << times[k]
                << " then " << times[k + 1];
            throw Error::validation(msg.str());
        }

    const HilbertSpace& space = initial.space;
    const std::size_t d = space.total_dim();
    initial.matrix.require_finite("initial density matrix");
    if (initial.matrix.rows() != d || initial.matrix.cols() != d)
        throw Error::validation("initial density matrix does not match the space dimension");
    if (hermitian_deviation(initial.matrix) > cfg.tol.structural_tol)
        throw Error::validation("initial density matrix not Hermitian");
    if (std::abs(trace(initial.matrix) - cx{1.0, 0.0}) > cfg.tol.structural_tol)
        throw Error::validation("initial density matrix trace != 1");

    std::vector<ComplexMatrix> realized;
    realized.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        check_propagator_unitary(propagators[k].first, k, d, propagators[k].second,
                                 cfg.tol.structural_tol);
        realized.push_back(std::move(propagators[k].first));
    }

    for (std::size_t k = 0; k < n; ++k) {
        const Decomposition& dec = decompositions[k];
        if (dec.space != space) {
            std::ostringstream msg;
            msg << "decomposition " << k << " lives on a different space";
            throw Error::validation(msg.str());
        }
        if (dec.members.empty())
            throw Error::validation("decomposition " + std::to_string(k) + " has no members");
        ComplexMatrix sum(d, d);
        for (const Property& p : dec.members) sum = sum + p.matrix;
        const double dev = max_abs(sum - ComplexMatrix::identity(d));
        if (dev > cfg.tol.structural_tol) {
            std::ostringstream msg;
            msg << "decomposition " << k << " incomplete, max |sum P - I| = " << dev;
            throw Error::validation(msg.str());
        }
    }

    auto family = std::make_shared<Family>();
    family->space = space;
    family->initial = std::move(initial);
    family->times = std::move(times);
    family->propagators = std::move(realized);
    family->decompositions = std::move(decompositions);
    return family;
}

struct SpectralDensity {
    std::vector<double> weights;
    std::vector<cxvec> vectors;
};

// rho = sum_k w_k |psi_k><psi_k|, w_k > 0. Exact fast paths for diagonal and
// rank-1 input, Eigen's self-adjoint solver otherwise.
SpectralDensity spectral_decompose(const ComplexMatrix& rho) {
    const std::size_t d = rho.rows();
    SpectralDensity out;

    bool diagonal = true;
    for (std::size_t i = 0; i < d && diagonal; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (i != j && rho(i, j) != cx{0.0, 0.0}) {
                diagonal = false;
                break;
            }
    if (diagonal) {
        for (std::size_t i = 0; i < d; ++i) {
            const double w = rho(i, i).real();
            if (w > kSpectralCutoff) {
                cxvec v(d, cx{0.0, 0.0});
                v[i] = 1.0;
                out.weights.push_back(w);
                out.vectors.push_back(std::move(v));
            }
        }
        return out;
    }

    double purity = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) purity += std::norm(rho(i, j));
    if (std::abs(purity - 1.0) <= 1e-13) {
        // Rank-1: any nonzero column is the state up to phase and scale.
        std::size_t pivot = 0;
        double best = rho(0, 0).real();
        for (std::size_t i = 1; i < d; ++i)
            if (rho(i, i).real() > best) {
                best = rho(i, i).real();
                pivot = i;
            }
        cxvec v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = rho(i, pivot);
        const double scale = 1.0 / std::sqrt(norm2(v));
        for (cx& x : v) x *= scale;
        out.weights.push_back(1.0);
        out.vectors.push_back(std::move(v));
        return out;
    }

    using EigenRowMajor = Eigen::Matrix<cx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const EigenRowMajor> view(rho.data(), static_cast<Eigen::Index>(d),
                                         static_cast<Eigen::Index>(d));
    EigenRowMajor sym = 0.5 * (EigenRowMajor(view) + EigenRowMajor(view).adjoint().eval());
    Eigen::SelfAdjointEigenSolver<EigenRowMajor> solver(sym);
    if (solver.info() != Eigen::Success)
        throw Error::validation("initial state eigendecomposition failed");
    for (std::size_t k = 0; k < d; ++k) {
        const double w = solver.eigenvalues()(static_cast<Eigen::Index>(k));
        if (w > kSpectralCutoff) {
            cxvec v(d);
            for (std::size_t i = 0; i < d; ++i)
                v[i] = solver.eigenvectors()(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(k));
            out.weights.push_back(w);
            out.vectors.push_back(std::move(v));
        }
    }
    return out;
}

std::vector<std::size_t> decomposition_sizes(const Family& f) {
    std::vector<std::size_t> sizes;
    sizes.reserve(f.decompositions.size());
    for (const Decomposition& dec : f.decompositions) sizes.push_back(dec.size());
    return sizes;
}

void validate_functional(const DecoherenceMatrix& d, double structural_tol) {
    double sum = 0.0;
    for (std::size_t a = 0; a < d.size; ++a) {
        const double p = d.entries(a, a).real();
        if (p < -structural_tol) {
            std::ostringstream msg;
            msg << "decoherence matrix diagonal " << a << " = " << p << " below zero";
            throw Error::validation(msg.str());
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 10.0 * structural_tol) {
        std::ostringstream msg;
        msg << "decoherence matrix diagonal sum " << sum << " != 1";
        throw Error::validation(msg.str());
    }
}

void require_member_of(const DecoherenceMatrix& d, const History& h) {
    if (!same_family(d.family, h.family))
        throw Error::validation("history does not belong to this decoherence matrix's family");
    if (h.flat_index >= d.size)
        throw Error::validation("history index out of range");
}

} // namespace

const char* condition_name(Condition c) {
    return c == Condition::weak ? "weak" : "medium";
}

Condition condition_from_name(const std::string& name) {
    if (name == "weak") return Condition::weak;
    if (name == "medium") return Condition::medium;
    throw Error::parse("unknown consistency condition '" + name + "' (expected weak|medium)");
}

std::size_t Family::num_histories() const {
    std::size_t m = 1;
    for (const Decomposition& dec : decompositions) {
        if (dec.size() != 0 && m > (std::size_t{1} << 62) / dec.size())
            throw Error::resource("history count overflows");
        m *= dec.size();
    }
    return m;
}

bool same_family(const FamilyPtr& a, const FamilyPtr& b) {
    if (!a || !b) return false;
    if (a == b) return true;
    return *a == *b;
}

FamilyPtr build_family(DensityMatrix initial, std::vector<double> times,
                       std::vector<PropagatorSpec> propagator_specs,
                       std::vector<Decomposition> decompositions, const EngineConfig& cfg) {
    const std::size_t d = initial.space.total_dim();
    std::vector<std::pair<ComplexMatrix, UnitaryCheckMode>> propagators;
    propagators.reserve(propagator_specs.size());
    for (std::size_t k = 0; k < propagator_specs.size(); ++k) {
        PropagatorSpec& spec = propagator_specs[k];
        if (auto* mat = std::get_if<ExplicitUnitary>(&spec)) {
            propagators.emplace_back(std::move(*mat), UnitaryCheckMode::full);
        } else if (auto* ham = std::get_if<HamiltonianStep>(&spec)) {
            if (!ham->generator.square() || ham->generator.rows() != d) {
                std::ostringstream msg;
                msg << "propagator " << k << ": generator dimension does not match the space";
                throw Error::validation(msg.str());
            }
            propagators.emplace_back(
                hermitian_exponential(ham->generator, ham->duration, cfg.tol.structural_tol),
                UnitaryCheckMode::sampled);
        } else {
            const auto& circuit = std::get<GateCircuit>(spec);
            propagators.emplace_back(build_circuit_unitary(initial.space, circuit.gates),
                                     UnitaryCheckMode::sampled);
        }
    }
    return realize_family(std::move(initial), std::move(times), std::move(propagators),
                          std::move(decompositions), cfg);
}

std::vector<History> enumerate_histories(const FamilyPtr& family, const EngineConfig& cfg) {
    if (!family) throw Error::validation("null family");
    const std::size_t m = family->num_histories();
    if (m > cfg.max_histories) {
        std::ostringstream msg;
        msg << "family has " << m << " elementary histories, above the cap of "
            << cfg.max_histories << " (CHRONOLOGIC_MAX_HISTORIES overrides)";
        throw Error::resource(msg.str());
    }
    const std::vector<std::size_t> sizes = decomposition_sizes(*family);
    std::vector<History> out;
    out.reserve(m);
    std::vector<std::size_t> indices(sizes.size(), 0);
    for (std::size_t flat = 0; flat < m; ++flat) {
        out.push_back({family, indices, flat});
        for (std::size_t k = sizes.size(); k-- > 0;) {
            if (++indices[k] < sizes[k]) break;
            indices[k] = 0;
        }
    }
    return out;
}

History history_from_flat(const FamilyPtr& family, std::size_t flat_index) {
    if (!family) throw Error::validation("null family");
    const std::vector<std::size_t> sizes = decomposition_sizes(*family);
    if (flat_index >= family->num_histories())
        throw Error::validation("history index out of range");
    std::vector<std::size_t> indices(sizes.size(), 0);
    std::size_t rem = flat_index;
    for (std::size_t k = sizes.size(); k-- > 0;) {
        indices[k] = rem % sizes[k];
        rem /= sizes[k];
    }
    return {family, std::move(indices), flat_index};
}

std::vector<std::string> outcome_labels(const History& h) {
    std::vector<std::string> labels;
    labels.reserve(h.outcome_indices.size());
    for (std::size_t k = 0; k < h.outcome_indices.size(); ++k)
        labels.push_back(h.family->decompositions[k].members[h.outcome_indices[k]].label);
    return labels;
}

ComplexMatrix chain_operator(const FamilyPtr& family, const History& history) {
    if (!same_family(family, history.family))
        throw Error::validation("history does not belong to this family");
    const std::size_t n = family->num_times();
    if (history.outcome_indices.size() != n)
        throw Error::validation("history length does not match the family");
    ComplexMatrix c = family->propagators[0];
    c = family->decompositions[0].members[history.outcome_indices[0]].matrix * c;
    for (std::size_t k = 1; k < n; ++k) {
        c = family->propagators[k] * c;
        c = family->decompositions[k].members[history.outcome_indices[k]].matrix * c;
    }
    return c;
}

double DecoherenceMatrix::diagonal_sum() const {
    double s = 0.0;
    for (std::size_t a = 0; a < size; ++a) s += entries(a, a).real();
    return s;
}

DecoherenceMatrix decoherence_functional(const FamilyPtr& family, const EngineConfig& cfg) {
    const std::vector<History> histories = enumerate_histories(family, cfg);
    const std::size_t m = histories.size();
    const std::size_t d = family->space.total_dim();
    const std::size_t n = family->num_times();

    const SpectralDensity sd = spectral_decompose(family->initial.matrix);
    const std::size_t rank = sd.weights.size();
    if (rank == 0)
        throw Error::validation("initial state has no spectral weight");
    if (m * rank > kFunctionalWorkspaceCap / d) {
        std::ostringstream msg;
        msg << "decoherence functional workspace " << m << " histories x " << rank
            << " modes x dim " << d << " exceeds the resource cap";
        throw Error::resource(msg.str());
    }

    // evolved[(alpha * rank + k) * d ...] = C_alpha |psi_k>
    std::vector<cx> evolved(m * rank * d);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long a = 0; a < static_cast<long long>(m); ++a) {
        const History& h = histories[static_cast<std::size_t>(a)];
        cxvec v, next;
        for (std::size_t k = 0; k < rank; ++k) {
            v = sd.vectors[k];
            for (std::size_t t = 0; t < n; ++t) {
                kernels::matvec_serial(family->propagators[t], v, next);
                kernels::matvec_serial(
                    family->decompositions[t].members[h.outcome_indices[t]].matrix, next, v);
            }
            std::copy(v.begin(), v.end(),
                      evolved.begin() +
                          static_cast<std::ptrdiff_t>((static_cast<std::size_t>(a) * rank + k) * d));
        }
    }

    DecoherenceMatrix out{family, m, ComplexMatrix(m, m)};
    // D(a,b) = sum_k w_k <C_b psi_k, C_a psi_k>; each upper-triangle entry is
    // accumulated in a fixed order and mirrored, so the result is independent
    // of scheduling and worker count.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long a = 0; a < static_cast<long long>(m); ++a) {
        for (std::size_t b = static_cast<std::size_t>(a); b < m; ++b) {
            cx acc{0.0, 0.0};
            for (std::size_t k = 0; k < rank; ++k) {
                const cx* va = &evolved[(static_cast<std::size_t>(a) * rank + k) * d];
                const cx* vb = &evolved[(b * rank + k) * d];
                cx dot{0.0, 0.0};
                for (std::size_t i = 0; i < d; ++i) dot += std::conj(vb[i]) * va[i];
                acc += sd.weights[k] * dot;
            }
            out.entries(static_cast<std::size_t>(a), b) = acc;
            out.entries(b, static_cast<std::size_t>(a)) = std::conj(acc);
        }
    }

    validate_functional(out, cfg.tol.structural_tol);
    return out;
}

DecoherenceMatrix decoherence_functional_reference(const FamilyPtr& family,
                                                   const EngineConfig& cfg) {
    const std::vector<History> histories = enumerate_histories(family, cfg);
    const std::size_t m = histories.size();
    const std::size_t n = family->num_times();

    // Literal route: explicit chain matrices, then D(a,b) = Tr[C_a rho C_b^t].
    std::vector<ComplexMatrix> chains(m), weighted(m);
    for (std::size_t a = 0; a < m; ++a) {
        ComplexMatrix c, tmp;
        kernels::matmul_serial(
            family->decompositions[0].members[histories[a].outcome_indices[0]].matrix,
            family->propagators[0], c);
        for (std::size_t k = 1; k < n; ++k) {
            kernels::matmul_serial(family->propagators[k], c, tmp);
            kernels::matmul_serial(
                family->decompositions[k].members[histories[a].outcome_indices[k]].matrix, tmp, c);
        }
        kernels::matmul_serial(c, family->initial.matrix, weighted[a]);
        chains[a] = std::move(c);
    }

    DecoherenceMatrix out{family, m, ComplexMatrix(m, m)};
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
            // Tr[C_a rho C_b^t] = sum_ij (C_a rho)_ij conj(C_b)_ij
            const cx v = frobenius_inner(chains[b], weighted[a]);
            out.entries(a, b) = v;
            out.entries(b, a) = std::conj(v);
        }

    validate_functional(out, cfg.tol.structural_tol);
    return out;
}

ConsistencyReport check_consistency(const DecoherenceMatrix& d, Condition condition, double tol,
                                    double structural_tol) {
    ConsistencyReport report;
    report.condition = condition;
    report.tolerance = tol;
    for (std::size_t a = 0; a < d.size; ++a) {
        const double pa = d.entries(a, a).real();
        for (std::size_t b = a + 1; b < d.size; ++b) {
            const double pb = d.entries(b, b).real();
            double violation = 0.0;
            if (pa > structural_tol && pb > structural_tol) {
                const cx off = d.entries(a, b);
                const double numerator =
                    condition == Condition::weak ? std::abs(off.real()) : std::abs(off);
                violation = numerator / std::sqrt(pa * pb);
            }
            report.max_violation = std::max(report.max_violation, violation);
            if (violation > tol) report.violating_pairs.push_back({a, b, violation});
        }
    }
    std::stable_sort(report.violating_pairs.begin(), report.violating_pairs.end(),
                     [](const ViolatingPair& x, const ViolatingPair& y) {
                         if (x.magnitude != y.magnitude) return x.magnitude > y.magnitude;
                         if (x.alpha != y.alpha) return x.alpha < y.alpha;
                         return x.beta < y.beta;
                     });
    report.consistent = report.max_violation <= tol;
    return report;
}

double history_probability(const DecoherenceMatrix& d, const History& history,
                           const EngineConfig& cfg, bool unchecked) {
    require_member_of(d, history);
    if (!unchecked) {
        const ConsistencyReport report =
            check_consistency(d, cfg.condition, cfg.tol.consistency_tol, cfg.tol.structural_tol);
        if (!report.consistent) {
            std::ostringstream msg;
            msg << "family inconsistent; histories are meaningless under Rule 4 (max normalized "
                << condition_name(cfg.condition) << " violation " << report.max_violation << ")";
            throw Error::refusal(msg.str());
        }
    }
    double p = d.entries(history.flat_index, history.flat_index).real();
    if (p < 0.0) {
        if (p < -cfg.tol.structural_tol)
            throw Error::validation("history probability below zero beyond tolerance");
        p = 0.0;
    }
    if (p > 1.0) {
        if (p > 1.0 + cfg.tol.structural_tol)
            throw Error::validation("history probability above one beyond tolerance");
        p = 1.0;
    }
    return p;
}

double sequential_projection_probability(const FamilyPtr& family, const History& history) {
    if (!same_family(family, history.family))
        throw Error::validation("history does not belong to this family");
    const std::size_t n = family->num_times();
    const ComplexMatrix& rho = family->initial.matrix;
    const std::size_t d = rho.rows();

    double purity = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) purity += std::norm(rho(i, j));

    if (std::abs(purity - 1.0) <= 1e-13) {
        // Pure state: evolve the ket, squared norm at the end.
        std::size_t pivot = 0;
        double best = rho(0, 0).real();
        for (std::size_t i = 1; i < d; ++i)
            if (rho(i, i).real() > best) {
                best = rho(i, i).real();
                pivot = i;
            }
        cxvec v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = rho(i, pivot);
        const double scale = 1.0 / std::sqrt(norm2(v));
        for (cx& x : v) x *= scale;
        cxvec next;
        for (std::size_t t = 0; t < n; ++t) {
            kernels::matvec_serial(family->propagators[t], v, next);
            kernels::matvec_serial(
                family->decompositions[t].members[history.outcome_indices[t]].matrix, next, v);
        }
        return norm2(v);
    }

    // Mixed state: evolve rho itself, trace at the end.
    ComplexMatrix sigma = rho, tmp;
    for (std::size_t t = 0; t < n; ++t) {
        const ComplexMatrix& u = family->propagators[t];
        kernels::matmul_serial(u, sigma, tmp);
        kernels::matmul_serial(tmp, adjoint(u), sigma);
        const ComplexMatrix& p =
            family->decompositions[t].members[history.outcome_indices[t]].matrix;
        kernels::matmul_serial(p, sigma, tmp);
        kernels::matmul_serial(tmp, p, sigma);
    }
    return trace(sigma).real();
}

double coarse_grained_weight(const DecoherenceMatrix& d, std::span<const std::size_t> indices) {
    double s = 0.0;
    for (std::size_t a : indices)
        for (std::size_t b : indices) s += d.entries(a, b).real();
    return s;
}

FamilyPtr time_reversed(const FamilyPtr& family, const EngineConfig& cfg) {
    if (!family) throw Error::validation("null family");
    const std::size_t n = family->num_times();

    // Same window traversed backwards: t'_k = t_1 + t_n - t_{n+1-k}.
    const double span = family->times.front() + family->times.back();
    std::vector<double> times(n);
    for (std::size_t k = 0; k < n; ++k) times[k] = span - family->times[n - 1 - k];

    // The initial step has no interval mirror and maps to its own adjoint;
    // every later step k mirrors interval n+2-k. Double application is an
    // exact involution.
    std::vector<std::pair<ComplexMatrix, UnitaryCheckMode>> propagators;
    propagators.reserve(n);
    propagators.emplace_back(adjoint(family->propagators[0]), UnitaryCheckMode::sampled);
    for (std::size_t j = 1; j < n; ++j)
        propagators.emplace_back(adjoint(family->propagators[n - j]), UnitaryCheckMode::sampled);

    std::vector<Decomposition> decompositions(family->decompositions.rbegin(),
                                              family->decompositions.rend());

    return realize_family(family->initial, std::move(times), std::move(propagators),
                          std::move(decompositions), cfg);
}

} // namespace chronologic
