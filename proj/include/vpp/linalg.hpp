#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace vpp {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;
using RealVector = std::vector<double>;

// Dense complex matrix, row-major. Sized for small MU-MIMO systems
// (tens of rows/columns), so everything here is straightforward O(n^3)
// dense arithmetic.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<Complex>& data() const { return data_; }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

struct QrResult {
    ComplexMatrix Q;  // thin, orthonormal columns
    ComplexMatrix R;  // upper triangular, real nonnegative diagonal
};

// Conjugate transpose.
ComplexMatrix hermitian(const ComplexMatrix& A);

ComplexMatrix matmul(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexVector matvec(const ComplexMatrix& A, const ComplexVector& x);

// Right pseudo-inverse W = A^H (A A^H + ridge I)^-1 for a wide or square A.
// ridge = 0 gives the exact right inverse (A W == I); ridge > 0 is the
// regularized variant. Throws std::runtime_error when the Gram matrix is
// singular (pivot below 1e-12 relative to the largest entry).
ComplexMatrix right_pseudo_inverse(const ComplexMatrix& A, double ridge);

// Thin QR via Householder reflections, rows >= cols. The diagonal of R is
// normalized to be real and nonnegative, which makes the factorization
// unique. Throws std::runtime_error on rank deficiency.
QrResult qr_decompose(const ComplexMatrix& A);

// Maximum complex modulus over the entries. Throws on an empty vector.
double linf_norm(const ComplexVector& v);

}  // namespace vpp
