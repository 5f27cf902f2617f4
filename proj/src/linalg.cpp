#include "vpp/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vpp {

namespace {

double max_abs_entry(const ComplexMatrix& A) {
    double m = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            m = std::max(m, std::abs(A(i, j)));
    return m;
}

// In-place solve G X = B with partial-pivoted Gauss-Jordan elimination.
// G is destroyed. Throws when a pivot falls below tol.
void solve_in_place(ComplexMatrix& G, ComplexMatrix& B, double pivot_tol) {
    const std::size_t n = G.rows();
    const std::size_t nrhs = B.cols();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double piv_mag = std::abs(G(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            double mag = std::abs(G(r, k));
            if (mag > piv_mag) {
                piv = r;
                piv_mag = mag;
            }
        }
        if (piv_mag < pivot_tol)
            throw std::runtime_error("singular matrix: pivot " + std::to_string(piv_mag) +
                                     " below tolerance");
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(G(k, c), G(piv, c));
            for (std::size_t c = 0; c < nrhs; ++c) std::swap(B(k, c), B(piv, c));
        }
        const Complex inv_p = 1.0 / G(k, k);
        for (std::size_t c = k; c < n; ++c) G(k, c) *= inv_p;
        for (std::size_t c = 0; c < nrhs; ++c) B(k, c) *= inv_p;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == k) continue;
            const Complex f = G(r, k);
            if (f == Complex{}) continue;
            for (std::size_t c = k; c < n; ++c) G(r, c) -= f * G(k, c);
            for (std::size_t c = 0; c < nrhs; ++c) B(r, c) -= f * B(k, c);
        }
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        throw std::invalid_argument("ComplexMatrix: entry count does not match dimensions");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

bool ComplexMatrix::all_finite() const {
    for (const auto& z : data_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

ComplexMatrix hermitian(const ComplexMatrix& A) {
    ComplexMatrix T(A.cols(), A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) T(j, i) = std::conj(A(i, j));
    return T;
}

ComplexMatrix matmul(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.cols() != B.rows()) throw std::invalid_argument("matmul: dimension mismatch");
    ComplexMatrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const Complex a = A(i, k);
            if (a == Complex{}) continue;
            for (std::size_t j = 0; j < B.cols(); ++j) C(i, j) += a * B(k, j);
        }
    return C;
}

ComplexVector matvec(const ComplexMatrix& A, const ComplexVector& x) {
    if (A.cols() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
    ComplexVector y(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        Complex acc{};
        for (std::size_t j = 0; j < A.cols(); ++j) acc += A(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

ComplexMatrix right_pseudo_inverse(const ComplexMatrix& A, double ridge) {
    if (A.rows() > A.cols())
        throw std::invalid_argument("right_pseudo_inverse: needs rows <= cols");
    if (ridge < 0.0) throw std::invalid_argument("right_pseudo_inverse: negative ridge");
    const std::size_t m = A.rows();
    ComplexMatrix G(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            Complex acc{};
            for (std::size_t k = 0; k < A.cols(); ++k) acc += A(i, k) * std::conj(A(j, k));
            G(i, j) = acc;
        }
    for (std::size_t i = 0; i < m; ++i) G(i, i) += ridge;

    const double tol = 1e-12 * std::max(max_abs_entry(G), 1e-300);
    // W = A^H G^-1, computed as W = (G^-1 A)^H since G is Hermitian.
    ComplexMatrix rhs = A;
    solve_in_place(G, rhs, tol);
    return hermitian(rhs);
}

QrResult qr_decompose(const ComplexMatrix& A) {
    const std::size_t m = A.rows();
    const std::size_t n = A.cols();
    if (m < n) throw std::invalid_argument("qr_decompose: needs rows >= cols");

    const double tol = 1e-12 * std::max(max_abs_entry(A), 1e-300);
    ComplexMatrix R = A;
    // Householder vectors, column k holds the reflector for step k.
    ComplexMatrix V(m, n);

    for (std::size_t k = 0; k < n; ++k) {
        double norm_x = 0.0;
        for (std::size_t i = k; i < m; ++i) norm_x += std::norm(R(i, k));
        norm_x = std::sqrt(norm_x);
        if (norm_x < tol) throw std::runtime_error("qr_decompose: rank-deficient matrix");

        const Complex x0 = R(k, k);
        const Complex phase = (x0 == Complex{}) ? Complex{1.0} : x0 / std::abs(x0);

        // v = x + phase*|x| e1; reflector I - 2 v v^H / |v|^2 maps x to -phase*|x| e1.
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            Complex vi = R(i, k);
            if (i == k) vi += phase * norm_x;
            V(i, k) = vi;
            vnorm2 += std::norm(vi);
        }
        if (vnorm2 == 0.0) continue;

        for (std::size_t j = k; j < n; ++j) {
            Complex dot{};
            for (std::size_t i = k; i < m; ++i) dot += std::conj(V(i, k)) * R(i, j);
            const Complex f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < m; ++i) R(i, j) -= f * V(i, k);
        }
        R(k, k) = -phase * norm_x;
        for (std::size_t i = k + 1; i < m; ++i) R(i, k) = 0.0;
    }

    // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I.
    ComplexMatrix Q(m, n);
    for (std::size_t j = 0; j < n; ++j) Q(j, j) = 1.0;
    for (std::size_t k = n; k-- > 0;) {
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < m; ++i) vnorm2 += std::norm(V(i, k));
        if (vnorm2 == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            Complex dot{};
            for (std::size_t i = k; i < m; ++i) dot += std::conj(V(i, k)) * Q(i, j);
            const Complex f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < m; ++i) Q(i, j) -= f * V(i, k);
        }
    }

    // Rotate so the diagonal of R is real and nonnegative.
    ComplexMatrix Rt(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) Rt(i, j) = R(i, j);
    for (std::size_t k = 0; k < n; ++k) {
        const Complex d = Rt(k, k);
        const double mag = std::abs(d);
        if (mag < tol) throw std::runtime_error("qr_decompose: rank-deficient matrix");
        const Complex phase = d / mag;
        for (std::size_t j = k; j < n; ++j) Rt(k, j) *= std::conj(phase);
        for (std::size_t i = 0; i < m; ++i) Q(i, k) *= phase;
        Rt(k, k) = mag;
    }

    return {std::move(Q), std::move(Rt)};
}

double linf_norm(const ComplexVector& v) {
    if (v.empty()) throw std::invalid_argument("linf_norm: empty vector");
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace vpp
