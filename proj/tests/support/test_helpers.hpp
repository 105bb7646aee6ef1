#pragma once

// Shared helpers for the unit and acceptance suites: deterministic random
// matrices/families and the independent numerical oracles.

#include <random>
#include <vector>

#include "chronologic/family.hpp"

namespace chronologic::testing {

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = cx{gauss(rng), gauss(rng)};
    return m;
}

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    const ComplexMatrix g = random_matrix(n, n, rng);
    ComplexMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
    return h;
}

inline ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
    return hermitian_exponential(random_hermitian(n, rng), 1.0);
}

/// Independent oracle for exp(-i h t): plain power series summed to machine
/// precision. Only valid for moderate ||h t||; callers keep norms small.
inline ComplexMatrix power_series_exponential(const ComplexMatrix& h, double t,
                                              int max_terms = 200) {
    const std::size_t n = h.rows();
    ComplexMatrix sum = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    const cx factor{0.0, -t};
    for (int k = 1; k <= max_terms; ++k) {
        ComplexMatrix next;
        kernels::matmul_serial(term, h, next);
        term = (factor * (1.0 / static_cast<double>(k))) * next;
        sum = sum + term;
        if (max_abs(term) < 1e-18) break;
    }
    return sum;
}

struct RandomFamilyOptions {
    std::size_t min_dim = 2;
    std::size_t max_dim = 6;
    std::size_t max_times = 3;
    bool maximally_mixed_initial = false;
    bool pure_initial = false; ///< otherwise a random full-rank mixed state
};

/// A random single-factor family: Hamiltonian-generated propagators and
/// random-basis decompositions coarse-grained into 2..3 outcome groups.
inline FamilyPtr random_family(std::mt19937_64& rng, const RandomFamilyOptions& opt = {},
                               const EngineConfig& cfg = {}) {
    std::uniform_int_distribution<std::size_t> dim_dist(opt.min_dim, opt.max_dim);
    const std::size_t dim = dim_dist(rng);
    std::uniform_int_distribution<std::size_t> times_dist(1, opt.max_times);
    const std::size_t n_times = times_dist(rng);
    const HilbertSpace space = make_space({{"sys", dim}});

    DensityMatrix initial{space, {}};
    if (opt.maximally_mixed_initial) {
        initial = maximally_mixed(space);
    } else if (opt.pure_initial) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        cxvec amps(dim);
        for (cx& a : amps) a = cx{gauss(rng), gauss(rng)};
        initial = pure_state(space, amps);
    } else {
        const ComplexMatrix w = random_matrix(dim, dim, rng);
        ComplexMatrix rho;
        kernels::matmul_serial(w, adjoint(w), rho);
        const double tr = trace(rho).real();
        initial = {space, (cx{1.0 / tr, 0.0}) * rho};
    }

    std::uniform_real_distribution<double> duration(0.2, 1.5);
    std::vector<double> times;
    std::vector<PropagatorSpec> props;
    std::vector<Decomposition> decs;
    double clock = 0.0;
    for (std::size_t t = 0; t < n_times; ++t) {
        clock += duration(rng);
        times.push_back(clock);
        props.emplace_back(HamiltonianStep{random_hermitian(dim, rng), duration(rng)});

        const ComplexMatrix basis = random_unitary(dim, rng);
        std::uniform_int_distribution<std::size_t> group_dist(2, std::min<std::size_t>(3, dim));
        const std::size_t groups = dim == 1 ? 1 : group_dist(rng);
        std::vector<Property> members;
        for (std::size_t g = 0; g < groups; ++g) {
            const std::size_t lo = g * dim / groups;
            const std::size_t hi = (g + 1) * dim / groups;
            std::vector<cxvec> span;
            for (std::size_t c = lo; c < hi; ++c) {
                cxvec v(dim);
                for (std::size_t i = 0; i < dim; ++i) v[i] = basis(i, c);
                span.push_back(std::move(v));
            }
            members.push_back(
                projector_from_vectors(space, span, "o" + std::to_string(g), cfg.tol));
        }
        decs.push_back(decomposition_from_members(space, std::move(members), cfg.tol));
    }
    return build_family(std::move(initial), std::move(times), std::move(props), std::move(decs),
                        cfg);
}

} // namespace chronologic::testing
