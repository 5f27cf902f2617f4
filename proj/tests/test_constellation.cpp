#include <cmath>
#include <set>

#include "doctest.h"
#include "vpp/constellation.hpp"
#include "vpp/rng.hpp"

using namespace vpp;

TEST_CASE("constellation construction") {
    const Constellation q4 = make_constellation(4);
    CHECK(q4.symbols.size() == 4);
    std::set<std::pair<double, double>> pts;
    for (const auto& s : q4.symbols) {
        CHECK(std::abs(s.real()) == 1.0);
        CHECK(std::abs(s.imag()) == 1.0);
        pts.insert({s.real(), s.imag()});
    }
    CHECK(pts.size() == 4);
    // tau from first principles: 2*(c_max + delta/2), delta = 2
    CHECK(q4.c_max == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(q4.tau == doctest::Approx(2.0 * (std::sqrt(2.0) + 1.0)).epsilon(1e-14));
    CHECK(q4.tau == doctest::Approx(4.8284271247).epsilon(1e-9));

    const Constellation q16 = make_constellation(16);
    for (const auto& s : q16.symbols) {
        CHECK((std::abs(s.real()) == 1.0 || std::abs(s.real()) == 3.0));
        CHECK((std::abs(s.imag()) == 1.0 || std::abs(s.imag()) == 3.0));
    }
    CHECK(q16.c_max == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(q16.tau == doctest::Approx(10.4852813742).epsilon(1e-9));

    const Constellation q64 = make_constellation(64);
    CHECK(q64.symbols.size() == 64);
    CHECK(q64.c_max == doctest::Approx(7.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(q64.tau == doctest::Approx(21.7989898732).epsilon(1e-9));

    for (int order : {4, 16, 64}) {
        const Constellation c = make_constellation(order);
        CHECK(c.tau > 2.0 * c.c_max);  // strict non-overlap
    }

    CHECK_THROWS_AS(make_constellation(8), std::invalid_argument);
    CHECK_THROWS_AS(make_constellation(0), std::invalid_argument);
}

TEST_CASE("gray mapping is a bijection and round-trips") {
    for (int order : {4, 16, 64}) {
        const Constellation c = make_constellation(order);
        std::set<std::pair<double, double>> seen;
        for (int pattern = 0; pattern < order; ++pattern) {
            Bits bits(c.bits_per_symbol);
            for (int t = 0; t < c.bits_per_symbol; ++t)
                bits[t] = static_cast<std::uint8_t>((pattern >> (c.bits_per_symbol - 1 - t)) & 1);
            const Complex s = bits_to_symbol(c, bits);
            seen.insert({s.real(), s.imag()});
            const auto [idx, back] = nearest_symbol(c, s);
            CHECK(back == bits);
            CHECK(symbol_to_bits(c, idx) == bits);
        }
        CHECK(static_cast<int>(seen.size()) == order);
    }
    const Constellation c = make_constellation(4);
    CHECK_THROWS_AS(bits_to_symbol(c, Bits{1, 0, 1}), std::invalid_argument);
}

TEST_CASE("gray property on the 16-QAM grid") {
    const Constellation c = make_constellation(16);
    // horizontally adjacent (same real level, neighboring imaginary level)
    // symbols differ in exactly one bit, and same along the real axis
    auto bit_distance = [](const Bits& a, const Bits& b) {
        int d = 0;
        for (std::size_t t = 0; t < a.size(); ++t) d += a[t] != b[t];
        return d;
    };
    for (int rk = 0; rk < c.side; ++rk)
        for (int ik = 0; ik + 1 < c.side; ++ik)
            CHECK(bit_distance(c.index_to_bits[rk * c.side + ik],
                               c.index_to_bits[rk * c.side + ik + 1]) == 1);
    for (int ik = 0; ik < c.side; ++ik)
        for (int rk = 0; rk + 1 < c.side; ++rk)
            CHECK(bit_distance(c.index_to_bits[rk * c.side + ik],
                               c.index_to_bits[(rk + 1) * c.side + ik]) == 1);
}

TEST_CASE("nearest symbol demap") {
    const Constellation c = make_constellation(4);
    const auto [idx, bits] = nearest_symbol(c, Complex{0.1, 0.2});
    CHECK(c.symbols[idx] == Complex{1.0, 1.0});
    (void)bits;

    // brute-force scan oracle on random points
    RngStream rng = RngStream::derive(21, {1});
    for (int order : {4, 16, 64}) {
        const Constellation cc = make_constellation(order);
        for (int trial = 0; trial < 200; ++trial) {
            const Complex y(8.0 * rng.normal(), 8.0 * rng.normal());
            int best = 0;
            double best_d = std::norm(y - cc.symbols[0]);
            for (int i = 1; i < cc.order; ++i) {
                const double d = std::norm(y - cc.symbols[i]);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            CHECK(nearest_symbol(cc, y).first == best);
        }
    }
}

TEST_CASE("modulo fold") {
    const Constellation c = make_constellation(4);
    CHECK(std::abs(modulo_tau(c, Complex{c.tau, 0.0})) < 1e-12);

    for (const auto& s : c.symbols) {
        const Complex shifted = s + c.tau * Complex{1.0, -1.0};
        CHECK(std::abs(modulo_tau(c, shifted) - s) < 1e-12);
    }

    const Complex f = modulo_tau(c, Complex{0.6 * c.tau, 0.0});
    CHECK(f.real() == doctest::Approx(-0.4 * c.tau).epsilon(1e-12));
    CHECK(f.imag() == 0.0);

    // every symbol under every Gaussian-integer shift up to 3
    for (int order : {4, 16, 64}) {
        const Constellation cc = make_constellation(order);
        for (const auto& s : cc.symbols)
            for (int gr = -3; gr <= 3; ++gr)
                for (int gi = -3; gi <= 3; ++gi)
                    CHECK(std::abs(modulo_tau(cc, s + cc.tau * Complex(gr, gi)) - s) < 1e-12);
    }
}
