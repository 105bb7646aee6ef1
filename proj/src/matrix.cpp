#include "chronologic/matrix.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chronologic {

namespace {

using EigenRowMajor =
    Eigen::Matrix<cx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenRowMajor> eigen_view(const ComplexMatrix& m) {
    return {m.data(), static_cast<Eigen::Index>(m.rows()),
            static_cast<Eigen::Index>(m.cols())};
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream msg;
        msg << op << ": dimension mismatch " << a.rows() << "x" << a.cols() << " vs "
            << b.rows() << "x" << b.cols();
        throw Error::validation(msg.str());
    }
}

// Work threshold below which threading costs more than it saves.
constexpr std::size_t kParallelMatmulWork = 1u << 15;

} // namespace

void ToleranceConfig::validate() const {
    for (double t : {structural_tol, consistency_tol, probability_tol}) {
        if (!(t > 0.0) || !(t < 1.0)) {
            std::ostringstream msg;
            msg << "tolerances must lie in (0, 1), got " << t;
            throw Error::validation(msg.str());
        }
    }
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cx{0.0, 0.0}) {
    if (rows == 0 || cols == 0)
        throw Error::validation("matrix dimensions must be >= 1");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<cx>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    ComplexMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c)
            throw Error::validation("from_rows: ragged row lengths");
        std::size_t j = 0;
        for (const cx& v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

void ComplexMatrix::require_finite(const std::string& what) const {
    for (std::size_t k = 0; k < data_.size(); ++k) {
        const cx& v = data_[k];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream msg;
            msg << what << ": non-finite entry at flat index " << k;
            throw Error::validation(msg.str());
        }
    }
}

namespace kernels {

// ikj loop order: the inner j-loop runs over contiguous rows of b and out,
// and every out(i,j) accumulates in the same k order in both variants.
static void matmul_rows(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out,
                        std::size_t row_begin, std::size_t row_end) {
    const std::size_t n = a.cols();
    const std::size_t cols = b.cols();
    const cx* bp = b.data();
    cx* op = out.data();
    for (std::size_t i = row_begin; i < row_end; ++i) {
        cx* orow = op + i * cols;
        for (std::size_t j = 0; j < cols; ++j) orow[j] = cx{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            const cx aik = a(i, k);
            if (aik == cx{0.0, 0.0}) continue;
            const cx* brow = bp + k * cols;
            for (std::size_t j = 0; j < cols; ++j) orow[j] += aik * brow[j];
        }
    }
}

void matmul_serial(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out) {
    if (a.cols() != b.rows())
        throw Error::validation("matmul: inner dimension mismatch");
    out = ComplexMatrix(a.rows(), b.cols());
    matmul_rows(a, b, out, 0, a.rows());
}

void matmul_parallel(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out) {
    if (a.cols() != b.rows())
        throw Error::validation("matmul: inner dimension mismatch");
    out = ComplexMatrix(a.rows(), b.cols());
    const std::size_t rows = a.rows();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(rows); ++i)
        matmul_rows(a, b, out, static_cast<std::size_t>(i), static_cast<std::size_t>(i) + 1);
}

void matvec_serial(const ComplexMatrix& m, const cxvec& v, cxvec& out) {
    if (m.cols() != v.size())
        throw Error::validation("matvec: dimension mismatch");
    out.assign(m.rows(), cx{0.0, 0.0});
    const cx* mp = m.data();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const cx* row = mp + i * m.cols();
        cx acc{0.0, 0.0};
        for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
}

void matvec_parallel(const ComplexMatrix& m, const cxvec& v, cxvec& out) {
    if (m.cols() != v.size())
        throw Error::validation("matvec: dimension mismatch");
    out.assign(m.rows(), cx{0.0, 0.0});
    const cx* mp = m.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(m.rows()); ++i) {
        const cx* row = mp + static_cast<std::size_t>(i) * m.cols();
        cx acc{0.0, 0.0};
        for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j] * v[j];
        out[static_cast<std::size_t>(i)] = acc;
    }
}

} // namespace kernels

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out;
    if (a.rows() * a.cols() * b.cols() >= kParallelMatmulWork)
        kernels::matmul_parallel(a, b, out);
    else
        kernels::matmul_serial(a, b, out);
    return out;
}

ComplexMatrix operator*(cx scale, const ComplexMatrix& m) {
    ComplexMatrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) *= scale;
    return out;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "operator+");
    ComplexMatrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) += b(i, j);
    return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "operator-");
    ComplexMatrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) -= b(i, j);
    return out;
}

cxvec matvec(const ComplexMatrix& m, const cxvec& v) {
    cxvec out;
    if (m.rows() * m.cols() >= kParallelMatmulWork)
        kernels::matvec_parallel(m, v, out);
    else
        kernels::matvec_serial(m, v, out);
    return out;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
    ComplexMatrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
    return out;
}

cx trace(const ComplexMatrix& m) {
    if (!m.square())
        throw Error::validation("trace: matrix not square");
    cx t{0.0, 0.0};
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

double max_abs(const ComplexMatrix& m) {
    double mx = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) mx = std::max(mx, std::abs(m(i, j)));
    return mx;
}

double frobenius_norm(const ComplexMatrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "frobenius_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j) - b(i, j));
    return std::sqrt(s);
}

cx frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "frobenius_inner");
    cx s{0.0, 0.0};
    const cx* ap = a.data();
    const cx* bp = b.data();
    const std::size_t n = a.rows() * a.cols();
    for (std::size_t k = 0; k < n; ++k) s += std::conj(ap[k]) * bp[k];
    return s;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    if (rows > kMaxDenseDim || cols > kMaxDenseDim) {
        std::ostringstream msg;
        msg << "tensor_product: result dimension " << rows << "x" << cols
            << " exceeds dense engine maximum " << kMaxDenseDim;
        throw Error::resource(msg.str());
    }
    ComplexMatrix out(rows, cols);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cx aij = a(i, j);
            if (aij == cx{0.0, 0.0}) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

double hermitian_deviation(const ComplexMatrix& m) {
    if (!m.square())
        throw Error::validation("hermitian_deviation: matrix not square");
    double mx = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j)
            mx = std::max(mx, std::abs(m(i, j) - std::conj(m(j, i))));
    return mx;
}

UnitaryCheck is_unitary(const ComplexMatrix& u, double tol) {
    if (!u.square())
        throw Error::validation("is_unitary: matrix not square");
    ComplexMatrix gram = adjoint(u) * u;
    for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) -= 1.0;
    const double dev = max_abs(gram);
    return {dev <= tol, dev};
}

ComplexMatrix hermitian_exponential(const ComplexMatrix& h, double t, double structural_tol) {
    if (!h.square())
        throw Error::validation("hermitian_exponential: generator not square");
    const double asym = hermitian_deviation(h);
    if (asym > structural_tol) {
        std::ostringstream msg;
        msg << "hermitian_exponential: generator not Hermitian, max asymmetry " << asym;
        throw Error::validation(msg.str());
    }

    const std::size_t n = h.rows();
    // Symmetrize before the solve so rounding-level asymmetry cannot leak in.
    EigenRowMajor hm = eigen_view(h);
    hm = 0.5 * (hm + hm.adjoint().eval());

    Eigen::SelfAdjointEigenSolver<EigenRowMajor> solver(hm);
    if (solver.info() != Eigen::Success)
        throw Error::validation("hermitian_exponential: eigendecomposition failed");

    const auto& evals = solver.eigenvalues();
    const auto& evecs = solver.eigenvectors();

    Eigen::VectorXcd phases(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = -evals(static_cast<Eigen::Index>(k)) * t;
        phases(static_cast<Eigen::Index>(k)) = cx{std::cos(angle), std::sin(angle)};
    }

    EigenRowMajor um = evecs * phases.asDiagonal() * evecs.adjoint();
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = um(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
    if (!h.square())
        throw Error::validation("hermitian_eigenvalues: matrix not square");
    EigenRowMajor hm = eigen_view(h);
    hm = 0.5 * (hm + hm.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<EigenRowMajor> solver(hm, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error::validation("hermitian_eigenvalues: eigendecomposition failed");
    std::vector<double> out(h.rows());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = solver.eigenvalues()(static_cast<Eigen::Index>(k));
    return out;
}

double min_hermitian_eigenvalue(const ComplexMatrix& h) {
    return hermitian_eigenvalues(h).front();
}

cx inner(const cxvec& a, const cxvec& b) {
    if (a.size() != b.size())
        throw Error::validation("inner: vector length mismatch");
    cx s{0.0, 0.0};
    for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
    return s;
}

double norm2(const cxvec& v) {
    double s = 0.0;
    for (const cx& x : v) s += std::norm(x);
    return s;
}

} // namespace chronologic
