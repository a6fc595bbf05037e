// Copyright 2026 The splnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded random inputs for property tests.

#ifndef SPLNOISE_TESTS_GENERATORS_HPP
#define SPLNOISE_TESTS_GENERATORS_HPP

#include <map>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "splnoise/splnoise.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline splnoise::PauliString pauli(Rng &rng, size_t n) {
    static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
    std::uniform_int_distribution<int> d(0, 3);
    std::string s(n, 'I');
    for (auto &c : s) c = kLetters[d(rng)];
    return splnoise::PauliString::from_text(s);
}

inline splnoise::PauliString nonidentity_pauli(Rng &rng, size_t n) {
    while (true) {
        auto p = pauli(rng, n);
        if (!p.is_identity()) return p;
    }
}

/// Model with `count` distinct random terms and rates in [lo, hi].
inline splnoise::NoiseModel model(Rng &rng, size_t n, size_t count, double lo = 0.0, double hi = 0.05) {
    std::vector<splnoise::PauliString> terms;
    while (terms.size() < count) {
        auto p = nonidentity_pauli(rng, n);
        if (std::find(terms.begin(), terms.end(), p) == terms.end()) terms.push_back(p);
    }
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> rates;
    for (size_t k = 0; k < count; k++) rates.push_back(u(rng));
    return splnoise::NoiseModel(n, terms, rates);
}

/// Every two-qubit Clifford tableau (signs included), in breadth-first order
/// from the identity under H, S on each qubit and CZ.
inline const std::vector<splnoise::CliffordTableau> &all_two_qubit_cliffords() {
    static const std::vector<splnoise::CliffordTableau> all = [] {
        using namespace splnoise;
        std::vector<CliffordTableau> gens = {standard_gate("h", {0}, 2), standard_gate("h", {1}, 2),
                                             standard_gate("s", {0}, 2), standard_gate("s", {1}, 2),
                                             standard_gate("cz", {0, 1}, 2)};
        std::vector<CliffordTableau> out;
        std::map<std::string, bool> seen;
        std::queue<CliffordTableau> q;
        q.push(CliffordTableau(2));
        seen[CliffordTableau(2).str()] = true;
        while (!q.empty()) {
            auto t = q.front();
            q.pop();
            out.push_back(t);
            for (const auto &g : gens) {
                auto next = compose(g, t);
                auto key = next.str();
                if (!seen.count(key)) {
                    seen[key] = true;
                    q.push(next);
                }
            }
        }
        return out;
    }();
    return all;
}

/// Hermitian members of all_two_qubit_cliffords().
inline const std::vector<splnoise::CliffordTableau> &hermitian_two_qubit_cliffords() {
    static const std::vector<splnoise::CliffordTableau> herm = [] {
        std::vector<splnoise::CliffordTableau> out;
        for (const auto &t : all_two_qubit_cliffords()) {
            if (splnoise::is_hermitian(t)) out.push_back(t);
        }
        return out;
    }();
    return herm;
}

/// First Hermitian Clifford (breadth-first order) of the given class.
inline splnoise::CliffordTableau class_representative(int cls) {
    for (const auto &t : hermitian_two_qubit_cliffords()) {
        if (splnoise::classify_two_qubit(t).class_id == cls) {
            return t;
        }
    }
    throw std::logic_error("no representative");
}

/// Inverse of a Clifford tableau by search over the group.
inline splnoise::CliffordTableau inverse(const splnoise::CliffordTableau &c) {
    splnoise::CliffordTableau id(c.num_qubits());
    for (const auto &t : all_two_qubit_cliffords()) {
        if (splnoise::compose(t, c) == id) return t;
    }
    throw std::logic_error("no inverse");
}

}  // namespace gen

#endif  // SPLNOISE_TESTS_GENERATORS_HPP
