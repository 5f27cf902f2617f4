#pragma once

#include <utility>
#include <vector>

#include "vpp/channel.hpp"
#include "vpp/linalg.hpp"

namespace vpp {

enum class PrecoderKind { ZF, RZF };

struct PrecodingMatrix {
    ComplexMatrix W;  // n_tx x n_users
    PrecoderKind kind = PrecoderKind::ZF;
};

// The real-transformed perturbation problem. The complex objective
// ||W(u + tau*v)||_inf over Gaussian-integer v becomes
// ||W_hat(u_hat + tau*v_hat)||_inf over real-integer v_hat, where
// W_hat = [W | iW] stacks the real/imaginary action and
// u_hat = [Re(u); Im(u)]. Row i of W_hat is transmit antenna i.
struct VppProblem {
    ComplexMatrix W_hat;      // n_tx x 2*n_users
    RealVector u_hat;         // length 2*n_users
    double tau = 0.0;
    std::size_t n_tx = 0;
    std::size_t n_users = 0;
};

// Stacked real-integer perturbation [Re(v); Im(v)], length 2*n_users.
using PerturbationVector = std::vector<int>;

PrecodingMatrix zf_precoder(const ChannelInstance& ch);

// Regularization alpha = n_users / rho.
PrecodingMatrix rzf_precoder(const ChannelInstance& ch, const SnrConfig& cfg);

VppProblem make_vpp_problem(const PrecodingMatrix& W, const ComplexVector& u, double tau);

// Invert the real stacking: v_k = v_hat[k] + i*v_hat[k + n].
ComplexVector fold_complex(const PerturbationVector& v_hat);

// P(v_hat) = ||W_hat(u_hat + tau*v_hat)||_inf, the amplitude of the
// loudest antenna under the given perturbation.
double objective(const VppProblem& p, const PerturbationVector& v_hat);

// Per-antenna power normalization: x = sqrt(P) * d / ||d||_inf with
// d = W_hat(u_hat + tau*v_hat). Returns (x, gamma) where gamma = ||d||_inf
// is the scale the receiver must undo. Throws when d == 0.
std::pair<ComplexVector, double> transmit_vector(const VppProblem& p,
                                                 const PerturbationVector& v_hat, double P);

}  // namespace vpp
