#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "chronologic/errors.hpp"

namespace chronologic {

using cx = std::complex<double>;
using cxvec = std::vector<cx>;

/// Largest dense dimension the engine accepts (desk-scale Hilbert spaces).
inline constexpr std::size_t kMaxDenseDim = 4096;

/// Tolerances used throughout the engine. All must lie in (0, 1).
struct ToleranceConfig {
    double structural_tol = 1e-10;  ///< idempotence / unitarity / Hermiticity checks
    double consistency_tol = 1e-8;  ///< normalized consistency violations
    double probability_tol = 1e-10; ///< implication / normalization checks

    void validate() const;
};

/// Dense complex matrix, row-major. Entries are dimensionless amplitudes.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;

    /// rows x cols zero matrix.
    ComplexMatrix(std::size_t rows, std::size_t cols);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cx>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    cx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    cx* data() { return data_.data(); }
    const cx* data() const { return data_.data(); }

    /// Throws a validation error if any entry is NaN or Inf.
    void require_finite(const std::string& what) const;

    bool operator==(const ComplexMatrix& other) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cx> data_;
};

// ---------------------------------------------------------------------------
// Kernels. Serial variants are the reference implementations; the unsuffixed
// entry points dispatch to OpenMP versions when the problem is large enough.
// Both orders of summation are identical per output entry, so serial and
// parallel results are bit-for-bit equal.
// ---------------------------------------------------------------------------
namespace kernels {

void matmul_serial(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out);
void matmul_parallel(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out);

void matvec_serial(const ComplexMatrix& m, const cxvec& v, cxvec& out);
void matvec_parallel(const ComplexMatrix& m, const cxvec& v, cxvec& out);

} // namespace kernels

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cx scale, const ComplexMatrix& m);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);

cxvec matvec(const ComplexMatrix& m, const cxvec& v);

ComplexMatrix adjoint(const ComplexMatrix& m);
cx trace(const ComplexMatrix& m);

/// Largest entry magnitude, 0 for empty matrices.
double max_abs(const ComplexMatrix& m);

double frobenius_norm(const ComplexMatrix& m);

/// sqrt(sum |a_ij - b_ij|^2). Throws on dimension mismatch.
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Frobenius inner product <a, b> = sum conj(a_ij) * b_ij.
cx frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product; block (i,j) of the result equals a(i,j) * b.
/// Throws a resource error if the result exceeds kMaxDenseDim.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// max |m - m^dagger| over entries; 0 for Hermitian input.
double hermitian_deviation(const ComplexMatrix& m);

struct UnitaryCheck {
    bool unitary = false;
    double deviation = 0.0; ///< max |u^dagger u - I|
};

UnitaryCheck is_unitary(const ComplexMatrix& u, double tol);

/// U = exp(-i * h * t) for Hermitian h, via eigendecomposition of h.
/// Rejects non-Hermitian input (reporting the max asymmetry magnitude).
ComplexMatrix hermitian_exponential(const ComplexMatrix& h, double t,
                                    double structural_tol = ToleranceConfig{}.structural_tol);

/// Eigenvalues of a Hermitian matrix, ascending.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);

/// Smallest eigenvalue of a Hermitian matrix.
double min_hermitian_eigenvalue(const ComplexMatrix& h);

// Vector helpers.
cx inner(const cxvec& a, const cxvec& b); ///< sum conj(a_i) b_i
double norm2(const cxvec& v);             ///< squared Euclidean norm

} // namespace chronologic
