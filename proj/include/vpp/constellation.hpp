#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vpp/linalg.hpp"

namespace vpp {

using Bits = std::vector<std::uint8_t>;  // one 0/1 value per entry

// Square Gray-coded QAM on the unnormalized odd-integer lattice
// (component values +-1, +-3, ...), spacing delta = 2. The modulo period
// tau = 2*(c_max + delta/2) produces non-overlapping shifted copies of the
// constellation, where c_max is the modulus of the largest symbol.
struct Constellation {
    int order = 0;                       // 4, 16, or 64
    int side = 0;                        // sqrt(order) levels per axis
    int bits_per_symbol = 0;
    double delta = 2.0;
    double c_max = 0.0;
    double tau = 0.0;
    std::vector<Complex> symbols;        // index = re_level * side + im_level
    std::vector<Bits> index_to_bits;     // per symbol index
    std::vector<int> bits_to_index;      // keyed by the bit pattern as an integer, MSB first
};

Constellation make_constellation(int order);

// Gray map: first half of the bits selects the real axis level, second half
// the imaginary axis level. Inverse of symbol_to_bits on exact symbols.
Complex bits_to_symbol(const Constellation& c, const Bits& bits);

const Bits& symbol_to_bits(const Constellation& c, int symbol_index);

// Minimum-distance demap; ties resolve to the lowest symbol index.
std::pair<int, Bits> nearest_symbol(const Constellation& c, Complex y);

// Fold both components by the modulo period:
//   y - tau*round(Re(y)/tau) - i*tau*round(Im(y)/tau)
// round() is half-away-from-zero.
Complex modulo_tau(const Constellation& c, Complex y);

}  // namespace vpp
