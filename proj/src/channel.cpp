#include "vpp/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace vpp {

ChannelInstance sample_rayleigh(std::size_t n_users, std::size_t n_tx, RngStream& rng) {
    if (n_users < 1 || n_tx < n_users)
        throw std::invalid_argument("sample_rayleigh: need n_tx >= n_users >= 1");
    ChannelInstance ch;
    ch.n_users = n_users;
    ch.n_tx = n_tx;
    ch.H = ComplexMatrix(n_users, n_tx);
    const double s = std::sqrt(0.5);
    for (std::size_t i = 0; i < n_users; ++i)
        for (std::size_t j = 0; j < n_tx; ++j)
            ch.H(i, j) = Complex(s * rng.normal(), s * rng.normal());
    return ch;
}

SnrConfig sigma_for_snr(double P, double rho_db, std::size_t n_users) {
    if (P <= 0.0) throw std::invalid_argument("sigma_for_snr: P must be positive");
    SnrConfig cfg;
    cfg.power_budget_P = P;
    cfg.n_users = n_users;
    cfg.rho = std::pow(10.0, rho_db / 10.0);
    cfg.sigma2 = P / (cfg.rho * static_cast<double>(n_users));
    return cfg;
}

ComplexVector apply_channel(const ChannelInstance& ch, const ComplexVector& x,
                            const SnrConfig& cfg, RngStream& rng) {
    if (x.size() != ch.n_tx) throw std::invalid_argument("apply_channel: dimension mismatch");
    ComplexVector y = matvec(ch.H, x);
    if (cfg.sigma2 > 0.0) {
        const double s = std::sqrt(cfg.sigma2 / 2.0);
        for (auto& yi : y) yi += Complex(s * rng.normal(), s * rng.normal());
    }
    return y;
}

}  // namespace vpp
