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

#ifndef SPLNOISE_TESTS_TWIRL_ORACLE_HPP
#define SPLNOISE_TESTS_TWIRL_ORACLE_HPP

// Dense helpers shared by the twirl tests and the acceptance binary.

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dense_oracle.hpp"
#include "generators.hpp"
#include "splnoise/twirl.hpp"

namespace twirl_oracle {

using namespace splnoise;

inline oracle::Mat dense_rotation(const Rotation &r, size_t n) {
    return oracle::embed(oracle::rotation(std::string(1, r.letter), r.theta.radians()), {r.qubit}, n);
}

inline oracle::Mat dense_rotations(const std::vector<Rotation> &rs, size_t n) {
    oracle::Mat u = oracle::Mat::Identity(Eigen::Index(1) << n, Eigen::Index(1) << n);
    for (const auto &r : rs) u = dense_rotation(r, n) * u;
    return u;
}

// A unitary with the same conjugation action as a two-qubit tableau, found by
// breadth-first search over products of H, S and CZ.
inline oracle::Mat dense_of_tableau(const CliffordTableau &t) {
    static const std::vector<std::pair<CliffordTableau, oracle::Mat>> group = [] {
        std::vector<std::pair<CliffordTableau, oracle::Mat>> out;
        std::vector<std::pair<CliffordTableau, oracle::Mat>> gens;
        for (size_t q : {0u, 1u}) {
            for (const char *g : {"h", "s"}) {
                gens.push_back({standard_gate(g, {q}, 2), oracle::embed(oracle::gate1(g), {q}, 2)});
            }
        }
        gens.push_back({standard_gate("cz", {0, 1}, 2), oracle::gate2("cz")});
        std::map<std::string, bool> seen;
        std::vector<std::pair<CliffordTableau, oracle::Mat>> frontier = {{CliffordTableau(2), oracle::Mat::Identity(4, 4)}};
        seen[CliffordTableau(2).str()] = true;
        while (!frontier.empty()) {
            std::vector<std::pair<CliffordTableau, oracle::Mat>> next;
            for (const auto &[t, u] : frontier) {
                out.push_back({t, u});
                for (const auto &[gt, gu] : gens) {
                    auto nt = compose(gt, t);
                    if (seen.emplace(nt.str(), true).second) next.push_back({nt, gu * u});
                }
            }
            frontier = std::move(next);
        }
        return out;
    }();
    for (const auto &[gt, gu] : group) {
        if (gt == t) return gu;
    }
    throw std::logic_error("tableau not in group");
}

inline oracle::Mat ptm_matrix(const oracle::Channel &ch, size_t n) {
    auto labels = oracle::all_labels(n);
    oracle::Mat m(Eigen::Index(labels.size()), Eigen::Index(labels.size()));
    for (size_t a = 0; a < labels.size(); a++) {
        for (size_t b = 0; b < labels.size(); b++) {
            m(Eigen::Index(a), Eigen::Index(b)) = oracle::ptm(ch, labels[a], labels[b]);
        }
    }
    return m;
}

// A random two-qubit Pauli channel as dense probabilities and a DensePauliChannel.
inline std::pair<oracle::Channel, DensePauliChannel> random_pauli_channel(gen::Rng &rng) {
    auto labels = oracle::all_labels(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> probs(16);
    double total = 0;
    for (auto &p : probs) total += (p = u(rng));
    probs[0] += 4 * total;  // mostly identity
    total *= 5;
    std::vector<double> alpha(16);
    for (size_t i = 0; i < 16; i++) {
        probs[i] /= total;
        alpha[DensePauliChannel::index_of(splnoise::PauliString::from_text(labels[i]))] = probs[i];
    }
    auto f = DensePauliChannel::fidelities_from_probabilities(2, alpha);
    return {oracle::pauli_channel(labels, probs), DensePauliChannel::from_fidelities(2, f)};
}

inline std::vector<std::pair<std::string, CliffordTableau>> representatives() {
    auto hh = compose(standard_gate("h", {0}, 2), standard_gate("h", {1}, 2));
    return {{"HH", hh},
            {"SWAP", local_gate("swap")},
            {"CZ", local_gate("cz")},
            {"CX", local_gate("cx")},
            {"class4", gen::class_representative(4)}};
}

inline const std::vector<std::string> kTwoLetterBases = {"XX", "XY", "XZ", "YX", "YY", "YZ", "ZX", "ZY", "ZZ"};

}  // namespace twirl_oracle

#endif  // SPLNOISE_TESTS_TWIRL_ORACLE_HPP
