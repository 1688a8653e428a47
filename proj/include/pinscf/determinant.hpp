// determinant.hpp
// Slater determinants over a finite spin-orbital basis, stored as occupation
// bit patterns.  Orbital indices are 1-based in the public interface; bit i
// of the mask corresponds to orbital i+1.
#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinscf {

inline constexpr int kMaxOrbitals = 31;

struct Determinant {
    std::uint32_t mask = 0;

    static Determinant from_orbitals(const std::vector<int>& orbitals) {
        Determinant det;
        for (int orb : orbitals) {
            if (orb < 1 || orb > kMaxOrbitals)
                throw std::invalid_argument("orbital index out of range: " + std::to_string(orb));
            std::uint32_t bit = 1u << (orb - 1);
            if (det.mask & bit)
                throw std::invalid_argument("duplicate orbital index: " + std::to_string(orb));
            det.mask |= bit;
        }
        return det;
    }

    static Determinant from_orbitals(std::initializer_list<int> orbitals) {
        return from_orbitals(std::vector<int>(orbitals));
    }

    int count() const { return std::popcount(mask); }

    bool occupied(int orb) const { return (mask >> (orb - 1)) & 1u; }

    // Ascending 1-based occupied orbital indices.
    std::vector<int> orbitals() const {
        std::vector<int> occ;
        occ.reserve(count());
        for (std::uint32_t m = mask; m != 0; m &= m - 1)
            occ.push_back(std::countr_zero(m) + 1);
        return occ;
    }

    // Number of occupied orbitals with index strictly below orb.
    int occupied_below(int orb) const {
        std::uint32_t below = mask & ((1u << (orb - 1)) - 1u);
        return std::popcount(below);
    }

    std::string str() const {
        std::string s = "|";
        bool first = true;
        for (int orb : orbitals()) {
            if (!first) s += ",";
            s += std::to_string(orb);
            first = false;
        }
        return s + ">";
    }

    auto operator<=>(const Determinant&) const = default;
};

// All C(d, n) determinants of n particles in d orbitals, in mask order.
std::vector<Determinant> all_determinants(int d, int n);

}  // namespace pinscf
