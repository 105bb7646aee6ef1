#include <doctest.h>

#include <cmath>

#include "support/test_helpers.hpp"

using namespace chronologic;
using chronologic::testing::power_series_exponential;
using chronologic::testing::random_hermitian;
using chronologic::testing::random_matrix;

namespace {

const ComplexMatrix kHadamard = ComplexMatrix::from_rows(
    {{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}, {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)}});
const ComplexMatrix kPauliX = ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});

} // namespace

TEST_CASE("tolerance config rejects out-of-range values") {
    CHECK_NOTHROW(ToleranceConfig{}.validate());
    ToleranceConfig bad;
    bad.structural_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad.structural_tol = 1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad.structural_tol = -1e-3;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("tensor product of identities and projector lift") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    CHECK(tensor_product(i2, i2) == ComplexMatrix::identity(4));

    const ComplexMatrix p = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
    ComplexMatrix expected(4, 4);
    expected(0, 0) = 1.0;
    expected(1, 1) = 1.0;
    CHECK(tensor_product(p, i2) == expected);
}

TEST_CASE("tensor product of two flips is the 4x4 anti-diagonal permutation") {
    const ComplexMatrix xx = tensor_product(kPauliX, kPauliX);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(xx(i, j) == (i + j == 3 ? cx{1.0, 0.0} : cx{0.0, 0.0}));
}

TEST_CASE("tensor product is associative on integer matrices") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> entry(-3, 3);
    for (int trial = 0; trial < 20; ++trial) {
        auto rand_int_matrix = [&](std::size_t r, std::size_t c) {
            ComplexMatrix m(r, c);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j)
                    m(i, j) = cx{static_cast<double>(entry(rng)), static_cast<double>(entry(rng))};
            return m;
        };
        const ComplexMatrix a = rand_int_matrix(2, 3);
        const ComplexMatrix b = rand_int_matrix(3, 2);
        const ComplexMatrix c = rand_int_matrix(2, 2);
        CHECK(tensor_product(tensor_product(a, b), c) ==
              tensor_product(a, tensor_product(b, c)));
    }
}

TEST_CASE("tensor product refuses dimension overflow") {
    const ComplexMatrix big = ComplexMatrix::identity(kMaxDenseDim / 2 + 1);
    CHECK_THROWS_WITH_AS(std::ignore = tensor_product(big, ComplexMatrix::identity(2)),
                         doctest::Contains("exceeds dense engine maximum"), Error);
}

TEST_CASE("hermitian exponential of the zero generator is the identity") {
    const ComplexMatrix zero(3, 3);
    CHECK(max_abs(hermitian_exponential(zero, 2.7) - ComplexMatrix::identity(3)) < 1e-15);
}

TEST_CASE("hermitian exponential of a diagonal generator applies phases") {
    const double pi = 3.14159265358979323846;
    const ComplexMatrix h = ComplexMatrix::from_rows({{0.0, 0.0}, {0.0, pi}});
    const ComplexMatrix u = hermitian_exponential(h, 1.0);
    CHECK(std::abs(u(0, 0) - cx{1.0, 0.0}) < 1e-14);
    CHECK(std::abs(u(1, 1) - cx{-1.0, 0.0}) < 1e-14);
    CHECK(std::abs(u(0, 1)) < 1e-14);
    CHECK(std::abs(u(1, 0)) < 1e-14);
}

TEST_CASE("exp(-i (pi/2) X) equals -iX, cross-checked by the power series") {
    const double pi = 3.14159265358979323846;
    const ComplexMatrix u = hermitian_exponential(kPauliX, pi / 2.0);
    const ComplexMatrix expected = cx{0.0, -1.0} * kPauliX;
    CHECK(max_abs(u - expected) < 1e-14);
    CHECK(max_abs(u - power_series_exponential(kPauliX, pi / 2.0)) < 1e-13);
}

TEST_CASE("hermitian exponential matches the power-series oracle on random generators") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + trial % 5;
        const ComplexMatrix h = random_hermitian(n, rng);
        const double t = 0.1 + 0.2 * (trial % 4);
        CHECK(max_abs(hermitian_exponential(h, t) - power_series_exponential(h, t)) < 1e-12);
    }
}

TEST_CASE("hermitian exponential group properties") {
    std::mt19937_64 rng(13);
    const double tol = 10.0 * ToleranceConfig{}.structural_tol;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 7; // dims up to 8
        const ComplexMatrix h = random_hermitian(n, rng);
        std::uniform_real_distribution<double> dt(-1.5, 1.5);
        const double s = dt(rng), t = dt(rng);

        const ComplexMatrix left = hermitian_exponential(h, s + t);
        const ComplexMatrix right = hermitian_exponential(h, s) * hermitian_exponential(h, t);
        CHECK(max_abs(left - right) < tol);

        const ComplexMatrix round_trip =
            hermitian_exponential(h, t) * hermitian_exponential(h, -t);
        CHECK(max_abs(round_trip - ComplexMatrix::identity(n)) < tol);

        CHECK(is_unitary(hermitian_exponential(h, t), ToleranceConfig{}.structural_tol).unitary);
    }
}

TEST_CASE("hermitian exponential rejects non-Hermitian generators") {
    const ComplexMatrix g = ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
    CHECK_THROWS_WITH_AS(std::ignore = hermitian_exponential(g, 1.0),
                         doctest::Contains("max asymmetry"), Error);
}

TEST_CASE("is_unitary verdicts and deviations") {
    const auto id_check = is_unitary(ComplexMatrix::identity(4), 1e-10);
    CHECK(id_check.unitary);
    CHECK(id_check.deviation == 0.0);

    CHECK(is_unitary(kHadamard, 1e-10).unitary);

    const ComplexMatrix stretched = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 2.0}});
    const auto bad = is_unitary(stretched, 1e-10);
    CHECK_FALSE(bad.unitary);
    CHECK(bad.deviation == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("frobenius distance") {
    std::mt19937_64 rng(17);
    const ComplexMatrix a = random_matrix(3, 3, rng);
    CHECK(frobenius_distance(a, a) == 0.0);

    CHECK(frobenius_distance(ComplexMatrix::identity(2), ComplexMatrix(2, 2)) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    // Entrywise: |1/sqrt2 - 1|^2 + 2*(1/2) + |-1/sqrt2 - 1|^2 = 4 exactly.
    CHECK(frobenius_distance(kHadamard, ComplexMatrix::identity(2)) ==
          doctest::Approx(2.0).epsilon(1e-14));

    // The 45-degree rotation, by contrast, sits at sqrt(2(2 - sqrt 2)).
    const double s = 1.0 / std::sqrt(2.0);
    const ComplexMatrix rot = ComplexMatrix::from_rows({{s, -s}, {s, s}});
    CHECK(frobenius_distance(rot, ComplexMatrix::identity(2)) ==
          doctest::Approx(std::sqrt(2.0 * (2.0 - std::sqrt(2.0)))).epsilon(1e-14));

    CHECK_THROWS_AS(std::ignore = frobenius_distance(a, ComplexMatrix(2, 2)), Error);
}

TEST_CASE("matmul kernels: serial and parallel are bit-identical") {
    std::mt19937_64 rng(19);
    for (const std::size_t n : {2u, 5u, 17u, 64u}) {
        const ComplexMatrix a = random_matrix(n, n, rng);
        const ComplexMatrix b = random_matrix(n, n, rng);
        ComplexMatrix serial, parallel;
        kernels::matmul_serial(a, b, serial);
        kernels::matmul_parallel(a, b, parallel);
        CHECK(serial == parallel);
    }
}

TEST_CASE("matvec kernels: serial and parallel are bit-identical") {
    std::mt19937_64 rng(23);
    const ComplexMatrix m = random_matrix(33, 33, rng);
    cxvec v(33);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (cx& x : v) x = cx{gauss(rng), gauss(rng)};
    cxvec serial, parallel;
    kernels::matvec_serial(m, v, serial);
    kernels::matvec_parallel(m, v, parallel);
    CHECK(serial == parallel);
}

TEST_CASE("finite-entry validation") {
    ComplexMatrix m(2, 2);
    m(1, 1) = cx{std::nan(""), 0.0};
    CHECK_THROWS_WITH_AS(m.require_finite("probe"), doctest::Contains("non-finite"), Error);
}
