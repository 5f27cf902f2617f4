#include "vpp/precoding.hpp"

#include <cmath>
#include <stdexcept>

namespace vpp {

PrecodingMatrix zf_precoder(const ChannelInstance& ch) {
    return {right_pseudo_inverse(ch.H, 0.0), PrecoderKind::ZF};
}

PrecodingMatrix rzf_precoder(const ChannelInstance& ch, const SnrConfig& cfg) {
    const double alpha = static_cast<double>(cfg.n_users) / cfg.rho;
    return {right_pseudo_inverse(ch.H, alpha), PrecoderKind::RZF};
}

VppProblem make_vpp_problem(const PrecodingMatrix& W, const ComplexVector& u, double tau) {
    const std::size_t m = W.W.rows();
    const std::size_t n = W.W.cols();
    if (m < 1 || n < 1) throw std::invalid_argument("make_vpp_problem: empty system");
    if (u.size() != n) throw std::invalid_argument("make_vpp_problem: dimension mismatch");
    if (!(tau > 0.0)) throw std::invalid_argument("make_vpp_problem: tau must be positive");

    VppProblem p;
    p.n_tx = m;
    p.n_users = n;
    p.tau = tau;
    p.W_hat = ComplexMatrix(m, 2 * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            p.W_hat(i, j) = W.W(i, j);
            p.W_hat(i, n + j) = Complex(0.0, 1.0) * W.W(i, j);
        }
    p.u_hat.resize(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        p.u_hat[j] = u[j].real();
        p.u_hat[n + j] = u[j].imag();
    }
    return p;
}

ComplexVector fold_complex(const PerturbationVector& v_hat) {
    if (v_hat.size() % 2 != 0) throw std::invalid_argument("fold_complex: odd length");
    const std::size_t n = v_hat.size() / 2;
    ComplexVector v(n);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = Complex(static_cast<double>(v_hat[k]), static_cast<double>(v_hat[n + k]));
    return v;
}

// d = W_hat(u_hat + tau*v_hat), the precoded antenna signal.
static ComplexVector precoded_signal(const VppProblem& p, const PerturbationVector& v_hat) {
    if (v_hat.size() != p.u_hat.size())
        throw std::invalid_argument("objective: dimension mismatch");
    ComplexVector d(p.n_tx);
    for (std::size_t i = 0; i < p.n_tx; ++i) {
        Complex acc{};
        for (std::size_t j = 0; j < p.u_hat.size(); ++j)
            acc += p.W_hat(i, j) * (p.u_hat[j] + p.tau * static_cast<double>(v_hat[j]));
        d[i] = acc;
    }
    return d;
}

double objective(const VppProblem& p, const PerturbationVector& v_hat) {
    return linf_norm(precoded_signal(p, v_hat));
}

std::pair<ComplexVector, double> transmit_vector(const VppProblem& p,
                                                 const PerturbationVector& v_hat, double P) {
    ComplexVector d = precoded_signal(p, v_hat);
    const double gamma = linf_norm(d);
    if (gamma == 0.0) throw std::runtime_error("transmit_vector: all-zero precoded vector");
    const double scale = std::sqrt(P) / gamma;
    for (auto& di : d) di *= scale;
    return {std::move(d), gamma};
}

}  // namespace vpp
