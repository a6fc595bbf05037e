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

#ifndef SPLNOISE_MODEL_HPP
#define SPLNOISE_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "splnoise/pauli.hpp"

namespace splnoise {

/// Qubit count and generator support sets of a sparse model.
struct ModelSpec {
    size_t n = 0;
    std::vector<std::vector<size_t>> supports;

    size_t locality() const {
        size_t l = 0;
        for (const auto &s : supports) {
            l = std::max(l, s.size());
        }
        return l;
    }

    void validate() const {
        if (n == 0) {
            throw std::invalid_argument("model spec: n must be positive");
        }
        if (supports.empty()) {
            throw std::invalid_argument("model spec: no supports");
        }
        for (const auto &s : supports) {
            if (s.empty()) {
                throw std::invalid_argument("model spec: empty support");
            }
            std::set<size_t> distinct(s.begin(), s.end());
            if (distinct.size() != s.size()) {
                throw std::invalid_argument("model spec: repeated index in support");
            }
            for (size_t q : s) {
                if (q >= n) {
                    throw std::out_of_range("model spec: qubit " + std::to_string(q) + " out of range");
                }
            }
        }
    }
};

/// All connected vertex subsets of size at most `locality` in the graph on
/// n vertices with the given edges, sorted. Every vertex is its own support.
inline std::vector<std::vector<size_t>> connected_supports(size_t n, const std::vector<std::pair<size_t, size_t>> &edges,
                                                           size_t locality) {
    if (locality == 0) {
        throw std::invalid_argument("locality must be at least 1");
    }
    std::vector<std::vector<size_t>> adj(n);
    for (auto [a, b] : edges) {
        if (a >= n || b >= n) {
            throw std::out_of_range("edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
        }
        if (a == b) {
            throw std::invalid_argument("self-loop edge on qubit " + std::to_string(a));
        }
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::set<std::vector<size_t>> found;
    std::vector<std::vector<size_t>> frontier;
    for (size_t q = 0; q < n; q++) {
        frontier.push_back({q});
        found.insert({q});
    }
    for (size_t size = 2; size <= locality; size++) {
        std::vector<std::vector<size_t>> next;
        for (const auto &s : frontier) {
            for (size_t v : s) {
                for (size_t w : adj[v]) {
                    if (std::find(s.begin(), s.end(), w) != s.end()) {
                        continue;
                    }
                    auto grown = s;
                    grown.insert(std::upper_bound(grown.begin(), grown.end(), w), w);
                    if (found.insert(grown).second) {
                        next.push_back(std::move(grown));
                    }
                }
            }
        }
        frontier = std::move(next);
    }
    std::vector<std::vector<size_t>> out(found.begin(), found.end());
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return out;
}

/// Union of all non-identity Paulis on each support, deduplicated, in term order.
inline std::vector<PauliString> generate_terms(const ModelSpec &spec) {
    spec.validate();
    std::vector<PauliString> terms;
    for (const auto &s : spec.supports) {
        std::vector<size_t> sorted = s;
        std::sort(sorted.begin(), sorted.end());
        auto local = enumerate_nonidentity(sorted, spec.n);
        terms.insert(terms.end(), local.begin(), local.end());
    }
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

/// A sparse Pauli-Lindblad channel: the product over k of
/// w_k rho + (1 - w_k) P_k rho P_k with w_k = (1 + exp(-2 lambda_k)) / 2.
class NoiseModel {
   public:
    NoiseModel() = default;

    NoiseModel(size_t n, std::vector<PauliString> terms, std::vector<double> rates)
        : n_(n), terms_(std::move(terms)), rates_(std::move(rates)) {
        if (terms_.size() != rates_.size()) {
            throw std::invalid_argument("noise model: " + std::to_string(terms_.size()) + " terms but " +
                                        std::to_string(rates_.size()) + " rates");
        }
        std::vector<PauliString> sorted = terms_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument("noise model: duplicate term");
        }
        for (size_t k = 0; k < terms_.size(); k++) {
            if (terms_[k].num_qubits() != n_) {
                throw std::invalid_argument("noise model: term " + terms_[k].str() + " has wrong length");
            }
            if (terms_[k].is_identity()) {
                throw std::invalid_argument("noise model: identity term");
            }
            if (!(rates_[k] >= 0.0) || !std::isfinite(rates_[k])) {
                throw std::invalid_argument("noise model: rate for " + terms_[k].str() + " must be finite and >= 0");
            }
        }
    }

    size_t num_qubits() const {
        return n_;
    }
    const std::vector<PauliString> &terms() const {
        return terms_;
    }
    const std::vector<double> &rates() const {
        return rates_;
    }

    /// exp(-2 * sum of rates of terms anticommuting with b).
    double fidelity(const PauliString &b) const {
        if (b.num_qubits() != n_) {
            throw std::invalid_argument("fidelity: length mismatch");
        }
        double s = 0.0;
        for (size_t k = 0; k < terms_.size(); k++) {
            if (sp_inner(b, terms_[k])) {
                s += rates_[k];
            }
        }
        return std::exp(-2.0 * s);
    }

    /// Probability 1 - w_k that term k fires.
    double flip_probability(size_t k) const {
        return -0.5 * std::expm1(-2.0 * rates_.at(k));
    }

    /// Draws one Pauli error. Each factor fires when a Poisson(lambda_k) count
    /// is odd, which happens with probability 1 - w_k; the total count is
    /// drawn once and events are assigned to terms proportionally to rate.
    template <class Rng>
    PauliString sample_error(Rng &rng) const {
        PauliString e(n_);
        double total = total_rate();
        if (total <= 0.0) {
            return e;
        }
        std::poisson_distribution<int> events(total);
        std::discrete_distribution<size_t> pick(rates_.begin(), rates_.end());
        for (int c = events(rng); c > 0; c--) {
            e *= terms_[pick(rng)];
        }
        return e;
    }

    double total_rate() const {
        double total = 0.0;
        for (double r : rates_) {
            total += r;
        }
        return total;
    }

    /// Concatenated channel (both applied); rates of shared terms add.
    static NoiseModel combine(const NoiseModel &a, const NoiseModel &b) {
        if (a.n_ != b.n_) {
            throw std::invalid_argument("combine: length mismatch");
        }
        std::vector<PauliString> terms = a.terms_;
        std::vector<double> rates = a.rates_;
        for (size_t k = 0; k < b.terms_.size(); k++) {
            auto it = std::find(terms.begin(), terms.end(), b.terms_[k]);
            if (it == terms.end()) {
                terms.push_back(b.terms_[k]);
                rates.push_back(b.rates_[k]);
            } else {
                rates[it - terms.begin()] += b.rates_[k];
            }
        }
        return NoiseModel(a.n_, std::move(terms), std::move(rates));
    }

   private:
    size_t n_ = 0;
    std::vector<PauliString> terms_;
    std::vector<double> rates_;
};

/// Brute-force Pauli channel on at most six qubits. Paulis are indexed by
/// x_mask | (z_mask << n) where bit q of each mask is the qubit-q bit.
struct DensePauliChannel {
    static constexpr size_t kMaxQubits = 6;

    size_t n = 0;
    std::vector<double> fidelities;
    std::vector<double> probabilities;

    static size_t index_of(const PauliString &p) {
        size_t idx = 0;
        for (size_t q = 0; q < p.num_qubits(); q++) {
            idx |= size_t(p.x(q)) << q;
            idx |= size_t(p.z(q)) << (q + p.num_qubits());
        }
        return idx;
    }

    static PauliString pauli_at(size_t n, size_t idx) {
        PauliString p(n);
        for (size_t q = 0; q < n; q++) {
            p.set_bits(q, (idx >> q) & 1, (idx >> (q + n)) & 1);
        }
        return p;
    }

    double fidelity(const PauliString &b) const {
        return fidelities.at(index_of(b));
    }
    double probability(const PauliString &a) const {
        return probabilities.at(index_of(a));
    }

    /// f_b = sum_a alpha_a (-1)^<a,b>.
    static std::vector<double> fidelities_from_probabilities(size_t n, std::vector<double> alpha) {
        walsh_hadamard(alpha);
        return swap_halves(n, alpha);
    }

    /// Inverse of fidelities_from_probabilities.
    static std::vector<double> probabilities_from_fidelities(size_t n, const std::vector<double> &f) {
        auto a = swap_halves(n, f);
        walsh_hadamard(a);
        double scale = 1.0 / double(a.size());
        for (double &v : a) {
            v *= scale;
        }
        return a;
    }

    static DensePauliChannel from_fidelities(size_t n, std::vector<double> f) {
        check_size(n);
        if (f.size() != size_t{1} << (2 * n)) {
            throw std::invalid_argument("dense channel: expected 4^n fidelities");
        }
        DensePauliChannel ch;
        ch.n = n;
        ch.probabilities = probabilities_from_fidelities(n, f);
        ch.fidelities = std::move(f);
        return ch;
    }

    static void check_size(size_t n) {
        if (n > kMaxQubits) {
            throw std::invalid_argument("dense channel limited to " + std::to_string(kMaxQubits) + " qubits, got " +
                                        std::to_string(n));
        }
    }

   private:
    static void walsh_hadamard(std::vector<double> &v) {
        for (size_t h = 1; h < v.size(); h <<= 1) {
            for (size_t i = 0; i < v.size(); i += h << 1) {
                for (size_t j = i; j < i + h; j++) {
                    double a = v[j], b = v[j + h];
                    v[j] = a + b;
                    v[j + h] = a - b;
                }
            }
        }
    }
    // Exchanges the x and z halves of every index.
    static std::vector<double> swap_halves(size_t n, const std::vector<double> &v) {
        std::vector<double> out(v.size());
        size_t mask = (size_t{1} << n) - 1;
        for (size_t i = 0; i < v.size(); i++) {
            out[((i & mask) << n) | (i >> n)] = v[i];
        }
        return out;
    }
};

inline DensePauliChannel to_dense(const NoiseModel &model) {
    size_t n = model.num_qubits();
    DensePauliChannel::check_size(n);
    std::vector<double> f(size_t{1} << (2 * n));
    for (size_t i = 0; i < f.size(); i++) {
        f[i] = model.fidelity(DensePauliChannel::pauli_at(n, i));
    }
    return DensePauliChannel::from_fidelities(n, std::move(f));
}

}  // namespace splnoise

#endif  // SPLNOISE_MODEL_HPP
