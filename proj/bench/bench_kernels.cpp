// Compares the serial reference kernels against the OpenMP paths: dense
// matmul, and the decoherence functional (spectral parallel production vs
// serial chain-matrix reference) on a random family. Build target only, not
// part of the test suite.

#include <cstdio>
#include <functional>
#include <random>

#include <omp.h>

#include "chronologic/family.hpp"

using namespace chronologic;

namespace {

ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = cx{gauss(rng), gauss(rng)};
    return m;
}

ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    ComplexMatrix g = random_matrix(n, rng);
    ComplexMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
    return h;
}

double time_of(const std::function<void()>& fn, int reps) {
    fn(); // warm up
    const double start = omp_get_wtime();
    for (int r = 0; r < reps; ++r) fn();
    return (omp_get_wtime() - start) / reps;
}

FamilyPtr bench_family(std::size_t dim, std::size_t n_times, std::size_t outcomes,
                       std::mt19937_64& rng) {
    const HilbertSpace space = make_space({{"sys", dim}});
    std::vector<double> times;
    std::vector<PropagatorSpec> props;
    std::vector<Decomposition> decs;
    for (std::size_t t = 0; t < n_times; ++t) {
        times.push_back(static_cast<double>(t + 1));
        props.emplace_back(HamiltonianStep{random_hermitian(dim, rng), 0.7});

        const ComplexMatrix basis = hermitian_exponential(random_hermitian(dim, rng), 1.0);
        std::vector<Property> members;
        const std::size_t per = dim / outcomes;
        for (std::size_t g = 0; g < outcomes; ++g) {
            const std::size_t hi = g + 1 == outcomes ? dim : (g + 1) * per;
            std::vector<cxvec> span;
            for (std::size_t c = g * per; c < hi; ++c) {
                cxvec v(dim);
                for (std::size_t i = 0; i < dim; ++i) v[i] = basis(i, c);
                span.push_back(std::move(v));
            }
            members.push_back(projector_from_vectors(space, span, "o" + std::to_string(g)));
        }
        decs.push_back(decomposition_from_members(space, std::move(members)));
    }
    return build_family(maximally_mixed(space), std::move(times), std::move(props),
                        std::move(decs));
}

} // namespace

int main() {
    std::mt19937_64 rng(12345);
    std::printf("threads available: %d\n\n", omp_get_max_threads());

    std::printf("dense complex matmul, serial kernel vs OpenMP kernel\n");
    std::printf("%8s %14s %14s %9s\n", "dim", "serial [s]", "parallel [s]", "speedup");
    for (std::size_t n : {64u, 128u, 256u, 512u}) {
        const ComplexMatrix a = random_matrix(n, rng);
        const ComplexMatrix b = random_matrix(n, rng);
        ComplexMatrix out;
        const int reps = n <= 128 ? 20 : 5;
        const double ts = time_of([&]() { kernels::matmul_serial(a, b, out); }, reps);
        const double tp = time_of([&]() { kernels::matmul_parallel(a, b, out); }, reps);
        std::printf("%8zu %14.6f %14.6f %8.2fx\n", n, ts, tp, ts / tp);
    }

    std::printf("\ndecoherence functional, serial chain-matrix reference vs parallel spectral\n");
    std::printf("%22s %14s %14s %9s %12s\n", "family", "reference [s]", "parallel [s]", "speedup",
                "max |diff|");
    struct Case {
        std::size_t dim, times, outcomes;
    };
    for (const Case c : {Case{16, 3, 4}, Case{32, 3, 4}, Case{32, 4, 4}, Case{64, 3, 4}}) {
        const FamilyPtr family = bench_family(c.dim, c.times, c.outcomes, rng);
        DecoherenceMatrix ref, par;
        const double tr =
            time_of([&]() { ref = decoherence_functional_reference(family); }, 3);
        const double tp = time_of([&]() { par = decoherence_functional(family); }, 3);
        const double diff = max_abs(ref.entries - par.entries);
        std::printf("  d=%-3zu n=%zu M=%-6zu %14.6f %14.6f %8.2fx %12.3e\n", c.dim, c.times,
                    ref.size, tr, tp, tr / tp, diff);
    }
    return 0;
}
