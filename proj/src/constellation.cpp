#include "vpp/constellation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vpp {

namespace {

int gray_encode(int b) { return b ^ (b >> 1); }

int gray_decode(int g) {
    int b = 0;
    for (; g; g >>= 1) b ^= g;
    return b;
}

int bits_as_int(const Bits& bits) {
    int v = 0;
    for (auto b : bits) v = (v << 1) | (b & 1);
    return v;
}

}  // namespace

Constellation make_constellation(int order) {
    if (order != 4 && order != 16 && order != 64)
        throw std::invalid_argument("make_constellation: order must be 4, 16, or 64");

    Constellation c;
    c.order = order;
    c.side = (order == 4) ? 2 : (order == 16) ? 4 : 8;
    c.bits_per_symbol = (order == 4) ? 2 : (order == 16) ? 4 : 6;
    c.delta = 2.0;

    const int half_bits = c.bits_per_symbol / 2;
    auto level_amp = [&](int k) { return static_cast<double>(2 * k - (c.side - 1)); };

    c.symbols.resize(order);
    c.index_to_bits.assign(order, Bits(c.bits_per_symbol, 0));
    c.bits_to_index.assign(order, -1);

    for (int rk = 0; rk < c.side; ++rk) {
        for (int ik = 0; ik < c.side; ++ik) {
            const int idx = rk * c.side + ik;
            c.symbols[idx] = Complex(level_amp(rk), level_amp(ik));

            const int gr = gray_encode(rk);
            const int gi = gray_encode(ik);
            Bits& b = c.index_to_bits[idx];
            for (int t = 0; t < half_bits; ++t) {
                b[t] = static_cast<std::uint8_t>((gr >> (half_bits - 1 - t)) & 1);
                b[half_bits + t] = static_cast<std::uint8_t>((gi >> (half_bits - 1 - t)) & 1);
            }
            c.bits_to_index[bits_as_int(b)] = idx;
        }
    }

    c.c_max = 0.0;
    for (const auto& s : c.symbols) c.c_max = std::max(c.c_max, std::abs(s));
    c.tau = 2.0 * (c.c_max + c.delta / 2.0);
    return c;
}

Complex bits_to_symbol(const Constellation& c, const Bits& bits) {
    if (static_cast<int>(bits.size()) != c.bits_per_symbol)
        throw std::invalid_argument("bits_to_symbol: wrong bit count");
    const int half_bits = c.bits_per_symbol / 2;
    int gr = 0, gi = 0;
    for (int t = 0; t < half_bits; ++t) {
        gr = (gr << 1) | (bits[t] & 1);
        gi = (gi << 1) | (bits[half_bits + t] & 1);
    }
    const int rk = gray_decode(gr);
    const int ik = gray_decode(gi);
    return c.symbols[rk * c.side + ik];
}

const Bits& symbol_to_bits(const Constellation& c, int symbol_index) {
    return c.index_to_bits.at(symbol_index);
}

std::pair<int, Bits> nearest_symbol(const Constellation& c, Complex y) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < c.order; ++i) {
        const double d = std::norm(y - c.symbols[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return {best, c.index_to_bits[best]};
}

Complex modulo_tau(const Constellation& c, Complex y) {
    const double re = y.real() - c.tau * std::round(y.real() / c.tau);
    const double im = y.imag() - c.tau * std::round(y.imag() / c.tau);
    return {re, im};
}

}  // namespace vpp
