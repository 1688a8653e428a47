// wavefunction.cpp
#include "pinscf/wavefunction.hpp"

#include <json.hpp>

namespace pinscf {

std::string Wavefunction::json() const {
    nlohmann::json j;
    j["d"] = d;
    j["n"] = n;
    auto terms = nlohmann::json::array();
    for (const auto& [det, amp] : amplitudes) {
        terms.push_back({{"orbitals", det.orbitals()},
                         {"re", amp.real()},
                         {"im", amp.imag()}});
    }
    j["amplitudes"] = terms;
    return j.dump();
}

Wavefunction Wavefunction::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Wavefunction psi(j.at("d").get<int>(), j.at("n").get<int>());
    for (const auto& t : j.at("amplitudes")) {
        psi.set(Determinant::from_orbitals(t.at("orbitals").get<std::vector<int>>()),
                cplx{t.at("re").get<double>(), t.at("im").get<double>()});
    }
    return psi;
}

}  // namespace pinscf
