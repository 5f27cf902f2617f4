#pragma once

#include <cstddef>

#include "vpp/linalg.hpp"
#include "vpp/rng.hpp"

namespace vpp {

// SNR bookkeeping: rho = P / E[||n||^2] with E[||n||^2] = n_users * sigma2,
// sigma2 being the per-user complex noise variance.
struct SnrConfig {
    double power_budget_P = 1.0;
    double rho = 1.0;       // linear SNR
    double sigma2 = 0.0;    // per-user complex noise variance
    std::size_t n_users = 1;
};

struct ChannelInstance {
    ComplexMatrix H;  // n_users x n_tx
    std::size_t n_users = 0;
    std::size_t n_tx = 0;
};

// i.i.d. circularly symmetric complex Gaussian entries, unit variance
// (real and imaginary parts each with variance 1/2).
ChannelInstance sample_rayleigh(std::size_t n_users, std::size_t n_tx, RngStream& rng);

SnrConfig sigma_for_snr(double P, double rho_db, std::size_t n_users);

// y = Hx + n with n_i complex Gaussian of variance cfg.sigma2.
ComplexVector apply_channel(const ChannelInstance& ch, const ComplexVector& x,
                            const SnrConfig& cfg, RngStream& rng);

}  // namespace vpp
