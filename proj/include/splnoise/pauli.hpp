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

#ifndef SPLNOISE_PAULI_HPP
#define SPLNOISE_PAULI_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace splnoise {

/// An n-qubit Pauli operator without phase, stored in symplectic form.
///
/// Per-qubit letters are encoded as (x, z) bits: I = (0,0), X = (1,0),
/// Y = (1,1), Z = (0,1). The letter Y stands for i*X*Z. Bits are packed into
/// 64-bit words; qubit q lives in word q / 64, bit q % 64. Text form lists
/// qubit 0 first, e.g. "XIZ" is X on qubit 0 and Z on qubit 2.
class PauliString {
   public:
    PauliString() = default;

    explicit PauliString(size_t num_qubits)
        : num_qubits_(num_qubits), xs_(num_words(num_qubits), 0), zs_(num_words(num_qubits), 0) {
    }

    /// Parses a string over {I, X, Y, Z}.
    static PauliString from_text(std::string_view text) {
        if (text.empty()) {
            throw std::invalid_argument("Pauli string must be non-empty");
        }
        PauliString p(text.size());
        for (size_t q = 0; q < text.size(); q++) {
            p.set_letter(q, text[q]);
        }
        return p;
    }

    /// Single-letter Pauli `letter` on `qubit` of an n-qubit register.
    static PauliString single(size_t num_qubits, size_t qubit, char letter) {
        PauliString p(num_qubits);
        p.set_letter(qubit, letter);
        return p;
    }

    size_t num_qubits() const {
        return num_qubits_;
    }

    bool x(size_t q) const {
        return (xs_[q >> 6] >> (q & 63)) & 1;
    }
    bool z(size_t q) const {
        return (zs_[q >> 6] >> (q & 63)) & 1;
    }

    void set_bits(size_t q, bool x, bool z) {
        check_qubit(q);
        uint64_t mask = uint64_t{1} << (q & 63);
        xs_[q >> 6] = x ? (xs_[q >> 6] | mask) : (xs_[q >> 6] & ~mask);
        zs_[q >> 6] = z ? (zs_[q >> 6] | mask) : (zs_[q >> 6] & ~mask);
    }

    void set_letter(size_t q, char letter) {
        switch (letter) {
            case 'I':
                set_bits(q, false, false);
                break;
            case 'X':
                set_bits(q, true, false);
                break;
            case 'Y':
                set_bits(q, true, true);
                break;
            case 'Z':
                set_bits(q, false, true);
                break;
            default:
                throw std::invalid_argument(std::string("invalid Pauli letter '") + letter + "'");
        }
    }

    char letter(size_t q) const {
        static constexpr char kLetters[4] = {'I', 'Z', 'X', 'Y'};
        check_qubit(q);
        return kLetters[(x(q) << 1) | z(q)];
    }

    bool is_identity() const {
        for (size_t w = 0; w < xs_.size(); w++) {
            if (xs_[w] | zs_[w]) {
                return false;
            }
        }
        return true;
    }

    size_t weight() const {
        size_t total = 0;
        for (size_t w = 0; w < xs_.size(); w++) {
            total += std::popcount(xs_[w] | zs_[w]);
        }
        return total;
    }

    /// Qubit indices with a non-identity letter, ascending.
    std::vector<size_t> support() const {
        std::vector<size_t> result;
        for (size_t w = 0; w < xs_.size(); w++) {
            uint64_t bits = xs_[w] | zs_[w];
            while (bits) {
                result.push_back(w * 64 + std::countr_zero(bits));
                bits &= bits - 1;
            }
        }
        return result;
    }

    /// Bit mask of the support, one word per 64 qubits.
    std::vector<uint64_t> support_mask() const {
        std::vector<uint64_t> mask(xs_.size());
        for (size_t w = 0; w < xs_.size(); w++) {
            mask[w] = xs_[w] | zs_[w];
        }
        return mask;
    }

    /// Copy that keeps only the letters on `qubits`.
    PauliString restricted_to(std::span<const size_t> qubits) const {
        PauliString r(num_qubits_);
        for (size_t q : qubits) {
            r.set_bits(q, x(q), z(q));
        }
        return r;
    }

    /// Letters on `qubits`, in that order, as a |qubits|-qubit string.
    PauliString extract(std::span<const size_t> qubits) const {
        PauliString r(qubits.size());
        for (size_t i = 0; i < qubits.size(); i++) {
            r.set_bits(i, x(qubits[i]), z(qubits[i]));
        }
        return r;
    }

    /// Writes the letters of `local` onto `qubits` (inverse of extract).
    void insert(std::span<const size_t> qubits, const PauliString &local) {
        for (size_t i = 0; i < qubits.size(); i++) {
            set_bits(qubits[i], local.x(i), local.z(i));
        }
    }

    std::string str() const {
        std::string s(num_qubits_, 'I');
        for (size_t q = 0; q < num_qubits_; q++) {
            s[q] = letter(q);
        }
        return s;
    }

    std::span<const uint64_t> x_words() const {
        return xs_;
    }
    std::span<const uint64_t> z_words() const {
        return zs_;
    }

    /// In-place product ignoring phase (bitwise XOR).
    PauliString &operator*=(const PauliString &other) {
        check_same_size(*this, other);
        for (size_t w = 0; w < xs_.size(); w++) {
            xs_[w] ^= other.xs_[w];
            zs_[w] ^= other.zs_[w];
        }
        return *this;
    }

    bool operator==(const PauliString &other) const = default;

    /// Term order: support (as ascending index list) lexicographically, then
    /// letters on the support with X < Y < Z.
    bool operator<(const PauliString &other) const {
        if (num_qubits_ != other.num_qubits_) {
            return num_qubits_ < other.num_qubits_;
        }
        auto a = support();
        auto b = other.support();
        if (a != b) {
            return a < b;
        }
        static constexpr int kRank[4] = {0, 3, 1, 2};  // indexed by (x<<1)|z
        for (size_t q : a) {
            int ra = kRank[(x(q) << 1) | z(q)];
            int rb = kRank[(other.x(q) << 1) | other.z(q)];
            if (ra != rb) {
                return ra < rb;
            }
        }
        return false;
    }

    static void check_same_size(const PauliString &a, const PauliString &b) {
        if (a.num_qubits_ != b.num_qubits_) {
            throw std::invalid_argument("Pauli length mismatch: " + std::to_string(a.num_qubits_) + " vs " +
                                        std::to_string(b.num_qubits_));
        }
    }

   private:
    static size_t num_words(size_t n) {
        return (n + 63) / 64;
    }
    void check_qubit(size_t q) const {
        if (q >= num_qubits_) {
            throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for " +
                                    std::to_string(num_qubits_) + " qubits");
        }
    }

    size_t num_qubits_ = 0;
    std::vector<uint64_t> xs_;
    std::vector<uint64_t> zs_;
};

/// Symplectic inner product: 0 when a and b commute, 1 otherwise.
inline int sp_inner(const PauliString &a, const PauliString &b) {
    PauliString::check_same_size(a, b);
    auto ax = a.x_words(), az = a.z_words(), bx = b.x_words(), bz = b.z_words();
    uint64_t acc = 0;
    for (size_t w = 0; w < ax.size(); w++) {
        acc ^= (ax[w] & bz[w]) ^ (az[w] & bx[w]);
    }
    return std::popcount(acc) & 1;
}

inline bool commutes(const PauliString &a, const PauliString &b) {
    return sp_inner(a, b) == 0;
}

/// A Pauli with a phase i^phase_exp.
struct PhasedPauli {
    PauliString pauli;
    int phase_exp = 0;

    PhasedPauli() = default;
    PhasedPauli(PauliString p, int phase = 0) : pauli(std::move(p)), phase_exp(((phase % 4) + 4) % 4) {
    }

    static PhasedPauli from_text(std::string_view text) {
        int phase = 0;
        if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
            phase = text[0] == '-' ? 2 : 0;
            text.remove_prefix(1);
        }
        return PhasedPauli(PauliString::from_text(text), phase);
    }

    bool is_hermitian() const {
        return (phase_exp & 1) == 0;
    }
    /// +1 or -1 for Hermitian values.
    int sign() const {
        if (!is_hermitian()) {
            throw std::logic_error("sign() on non-Hermitian phased Pauli");
        }
        return phase_exp == 0 ? 1 : -1;
    }

    std::string str() const {
        static constexpr const char *kPrefix[4] = {"+", "+i", "-", "-i"};
        return kPrefix[phase_exp] + pauli.str();
    }

    bool operator==(const PhasedPauli &other) const = default;
};

/// Group product a * b including the power of i.
inline PhasedPauli mul(const PhasedPauli &a, const PhasedPauli &b) {
    PauliString::check_same_size(a.pauli, b.pauli);
    auto ax = a.pauli.x_words(), az = a.pauli.z_words();
    auto bx = b.pauli.x_words(), bz = b.pauli.z_words();
    int phase = a.phase_exp + b.phase_exp;
    for (size_t w = 0; w < ax.size(); w++) {
        uint64_t a_x = ax[w] & ~az[w], a_y = ax[w] & az[w], a_z = ~ax[w] & az[w];
        uint64_t b_x = bx[w] & ~bz[w], b_y = bx[w] & bz[w], b_z = ~bx[w] & bz[w];
        // XY = iZ, YZ = iX, ZX = iY and the reversed products carry -i.
        uint64_t plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x);
        uint64_t minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z);
        phase += std::popcount(plus) - std::popcount(minus);
    }
    PauliString product = a.pauli;
    product *= b.pauli;
    return PhasedPauli(std::move(product), phase);
}

/// All 4^|support| - 1 non-identity Paulis acting only on `support`, in term order.
inline std::vector<PauliString> enumerate_nonidentity(std::span<const size_t> support, size_t num_qubits) {
    if (support.empty()) {
        throw std::invalid_argument("enumerate_nonidentity: empty support");
    }
    for (size_t q : support) {
        if (q >= num_qubits) {
            throw std::out_of_range("enumerate_nonidentity: qubit " + std::to_string(q) + " out of range");
        }
    }
    if (support.size() > 15) {
        throw std::invalid_argument("enumerate_nonidentity: support too large");
    }
    static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
    std::vector<PauliString> result;
    const size_t total = size_t{1} << (2 * support.size());
    result.reserve(total - 1);
    for (size_t code = 1; code < total; code++) {
        PauliString p(num_qubits);
        for (size_t i = 0; i < support.size(); i++) {
            p.set_letter(support[i], kLetters[(code >> (2 * (support.size() - 1 - i))) & 3]);
        }
        result.push_back(std::move(p));
    }
    std::sort(result.begin(), result.end());
    return result;
}

}  // namespace splnoise

template <>
struct std::hash<splnoise::PauliString> {
    size_t operator()(const splnoise::PauliString &p) const noexcept {
        size_t h = std::hash<size_t>{}(p.num_qubits());
        auto mix = [&h](uint64_t w) { h ^= std::hash<uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
        for (uint64_t w : p.x_words()) {
            mix(w);
        }
        for (uint64_t w : p.z_words()) {
            mix(w);
        }
        return h;
    }
};

#endif  // SPLNOISE_PAULI_HPP
