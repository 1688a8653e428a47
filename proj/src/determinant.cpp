// determinant.cpp
#include "pinscf/determinant.hpp"

namespace pinscf {

std::vector<Determinant> all_determinants(int d, int n) {
    if (d < 0 || d > kMaxOrbitals || n < 0 || n > d) {
        throw std::invalid_argument("invalid determinant space (d=" + std::to_string(d) +
                                    ", n=" + std::to_string(n) + ")");
    }
    std::vector<Determinant> out;
    if (n == 0) {
        out.push_back(Determinant{});
        return out;
    }
    // Gosper-style iteration over masks with n bits below bit d.
    std::uint32_t mask = (1u << n) - 1u;
    std::uint32_t limit = (d == 32) ? 0u : (1u << d);
    while (mask < limit) {
        out.push_back(Determinant{mask});
        std::uint32_t c = mask & (0u - mask);
        std::uint32_t r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    return out;
}

}  // namespace pinscf
