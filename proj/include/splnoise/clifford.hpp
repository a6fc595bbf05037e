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

#ifndef SPLNOISE_CLIFFORD_HPP
#define SPLNOISE_CLIFFORD_HPP

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "splnoise/pauli.hpp"

namespace splnoise {

/// A Clifford operator O represented by the signed images O X_q O^dag and
/// O Z_q O^dag of the single-qubit generators. Global phase is not tracked.
class CliffordTableau {
   public:
    CliffordTableau() = default;

    /// Identity on `num_qubits` qubits.
    explicit CliffordTableau(size_t num_qubits) : num_qubits_(num_qubits) {
        for (size_t q = 0; q < num_qubits; q++) {
            x_images_.emplace_back(PauliString::single(num_qubits, q, 'X'));
            z_images_.emplace_back(PauliString::single(num_qubits, q, 'Z'));
        }
    }

    /// Builds a tableau from generator images; throws unless the images are
    /// Hermitian and satisfy the symplectic commutation relations.
    static CliffordTableau from_images(std::vector<PhasedPauli> x_images, std::vector<PhasedPauli> z_images) {
        CliffordTableau t;
        t.num_qubits_ = x_images.size();
        if (z_images.size() != t.num_qubits_) {
            throw std::invalid_argument("tableau: mismatched image counts");
        }
        for (const auto *images : {&x_images, &z_images}) {
            for (const auto &img : *images) {
                if (img.pauli.num_qubits() != t.num_qubits_) {
                    throw std::invalid_argument("tableau: image has wrong length");
                }
                if (!img.is_hermitian()) {
                    throw std::invalid_argument("tableau: image phase must be a sign");
                }
            }
        }
        t.x_images_ = std::move(x_images);
        t.z_images_ = std::move(z_images);
        if (!t.is_symplectic()) {
            throw std::invalid_argument("tableau: images violate commutation relations");
        }
        return t;
    }

    /// Convenience form: images given as signed text, e.g. {"+XZ", "+ZX"}.
    static CliffordTableau from_text(std::vector<std::string_view> x_images, std::vector<std::string_view> z_images) {
        std::vector<PhasedPauli> xs, zs;
        for (auto s : x_images) {
            xs.push_back(PhasedPauli::from_text(s));
        }
        for (auto s : z_images) {
            zs.push_back(PhasedPauli::from_text(s));
        }
        return from_images(std::move(xs), std::move(zs));
    }

    size_t num_qubits() const {
        return num_qubits_;
    }
    const PhasedPauli &x_image(size_t q) const {
        return x_images_.at(q);
    }
    const PhasedPauli &z_image(size_t q) const {
        return z_images_.at(q);
    }

    bool is_symplectic() const {
        for (size_t a = 0; a < num_qubits_; a++) {
            for (size_t b = 0; b < num_qubits_; b++) {
                if (sp_inner(x_images_[a].pauli, x_images_[b].pauli) != 0 ||
                    sp_inner(z_images_[a].pauli, z_images_[b].pauli) != 0 ||
                    sp_inner(x_images_[a].pauli, z_images_[b].pauli) != (a == b ? 1 : 0)) {
                    return false;
                }
            }
        }
        return true;
    }

    /// O p O^dag with phase.
    PhasedPauli conjugate(const PhasedPauli &p) const {
        if (p.pauli.num_qubits() != num_qubits_) {
            throw std::invalid_argument("conjugate: length mismatch");
        }
        // A letter with bits (x, z) equals i^(x z) X^x Z^z.
        int phase = p.phase_exp;
        PhasedPauli result(PauliString(num_qubits_), 0);
        for (size_t q = 0; q < num_qubits_; q++) {
            bool x = p.pauli.x(q), z = p.pauli.z(q);
            if (x && z) {
                phase += 1;
            }
            if (x) {
                result = mul(result, x_images_[q]);
            }
            if (z) {
                result = mul(result, z_images_[q]);
            }
        }
        result.phase_exp = (result.phase_exp + phase) & 3;
        return result;
    }

    PhasedPauli conjugate(const PauliString &p) const {
        return conjugate(PhasedPauli(p, 0));
    }

    bool operator==(const CliffordTableau &other) const = default;

    std::string str() const {
        std::string s;
        for (size_t q = 0; q < num_qubits_; q++) {
            s += "X" + std::to_string(q) + " -> " + x_images_[q].str() + "\n";
            s += "Z" + std::to_string(q) + " -> " + z_images_[q].str() + "\n";
        }
        return s;
    }

   private:
    size_t num_qubits_ = 0;
    std::vector<PhasedPauli> x_images_;
    std::vector<PhasedPauli> z_images_;
};

/// Operator product a*b: conjugating by the result equals conjugating by b, then by a.
inline CliffordTableau compose(const CliffordTableau &a, const CliffordTableau &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw std::invalid_argument("compose: length mismatch");
    }
    std::vector<PhasedPauli> xs, zs;
    for (size_t q = 0; q < a.num_qubits(); q++) {
        xs.push_back(a.conjugate(b.x_image(q)));
        zs.push_back(a.conjugate(b.z_image(q)));
    }
    return CliffordTableau::from_images(std::move(xs), std::move(zs));
}

/// True iff O^2 acts as the identity under conjugation, signs included.
inline bool is_hermitian(const CliffordTableau &op) {
    return compose(op, op) == CliffordTableau(op.num_qubits());
}

/// Places a k-qubit tableau on `qubits` of an n-qubit register.
inline CliffordTableau embed(const CliffordTableau &local, std::span<const size_t> qubits, size_t num_qubits) {
    if (qubits.size() != local.num_qubits()) {
        throw std::invalid_argument("embed: qubit count does not match gate size");
    }
    std::set<size_t> distinct(qubits.begin(), qubits.end());
    if (distinct.size() != qubits.size()) {
        throw std::invalid_argument("embed: repeated qubit index");
    }
    for (size_t q : qubits) {
        if (q >= num_qubits) {
            throw std::out_of_range("embed: qubit " + std::to_string(q) + " out of range");
        }
    }
    auto lift = [&](const PhasedPauli &p) {
        PauliString full(num_qubits);
        full.insert(qubits, p.pauli);
        return PhasedPauli(std::move(full), p.phase_exp);
    };
    CliffordTableau identity(num_qubits);
    std::vector<PhasedPauli> xs, zs;
    for (size_t q = 0; q < num_qubits; q++) {
        xs.push_back(identity.x_image(q));
        zs.push_back(identity.z_image(q));
    }
    for (size_t i = 0; i < qubits.size(); i++) {
        xs[qubits[i]] = lift(local.x_image(i));
        zs[qubits[i]] = lift(local.z_image(i));
    }
    return CliffordTableau::from_images(std::move(xs), std::move(zs));
}

/// Names accepted by standard_gate, as used in layer files.
inline const std::vector<std::string> &standard_gate_names() {
    static const std::vector<std::string> names = {"id", "x",  "y",    "z",  "h",  "s",
                                                   "sdg", "sx", "sxdg", "cz", "cx", "swap"};
    return names;
}

inline size_t standard_gate_arity(std::string_view name) {
    if (name == "cz" || name == "cx" || name == "swap") {
        return 2;
    }
    auto &names = standard_gate_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
    }
    return 1;
}

/// Tableau of a named gate, local to its own qubits.
inline CliffordTableau local_gate(std::string_view name) {
    using T = CliffordTableau;
    if (name == "id") return T(1);
    if (name == "x") return T::from_text({"+X"}, {"-Z"});
    if (name == "y") return T::from_text({"-X"}, {"-Z"});
    if (name == "z") return T::from_text({"-X"}, {"+Z"});
    if (name == "h") return T::from_text({"+Z"}, {"+X"});
    if (name == "s") return T::from_text({"+Y"}, {"+Z"});
    if (name == "sdg") return T::from_text({"-Y"}, {"+Z"});
    if (name == "sx") return T::from_text({"+X"}, {"-Y"});
    if (name == "sxdg") return T::from_text({"+X"}, {"+Y"});
    if (name == "cz") return T::from_text({"+XZ", "+ZX"}, {"+ZI", "+IZ"});
    if (name == "cx") return T::from_text({"+XX", "+IX"}, {"+ZI", "+ZZ"});
    if (name == "swap") return T::from_text({"+IX", "+XI"}, {"+IZ", "+ZI"});
    throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

/// Named gate acting on `qubits` of an n-qubit register.
inline CliffordTableau standard_gate(std::string_view name, std::span<const size_t> qubits, size_t num_qubits) {
    CliffordTableau local = local_gate(name);
    if (qubits.size() != local.num_qubits()) {
        throw std::invalid_argument("gate '" + std::string(name) + "' expects " +
                                    std::to_string(local.num_qubits()) + " qubit(s)");
    }
    return embed(local, qubits, num_qubits);
}

inline CliffordTableau standard_gate(std::string_view name, std::initializer_list<size_t> qubits, size_t num_qubits) {
    std::vector<size_t> q(qubits);
    return standard_gate(name, std::span<const size_t>(q), num_qubits);
}

/// Conjugation by the Pauli p itself (signs flip on anticommuting generators).
inline CliffordTableau pauli_tableau(const PauliString &p) {
    size_t n = p.num_qubits();
    std::vector<PhasedPauli> xs, zs;
    for (size_t q = 0; q < n; q++) {
        auto x = PauliString::single(n, q, 'X');
        auto z = PauliString::single(n, q, 'Z');
        xs.emplace_back(x, sp_inner(p, x) ? 2 : 0);
        zs.emplace_back(z, sp_inner(p, z) ? 2 : 0);
    }
    return CliffordTableau::from_images(std::move(xs), std::move(zs));
}

// ---------------------------------------------------------------------------
// Classification of two-qubit Hermitian Cliffords by support transitions.
// ---------------------------------------------------------------------------

/// Letter roles: A, B, C is a permutation of X, Y, Z on the first qubit and
/// D, E, F a permutation on the second.
struct LetterRoles {
    char a = 'X', b = 'Y', c = 'Z';
    char d = 'X', e = 'Y', f = 'Z';

    std::string str() const {
        return std::string{a, b, c, d, e, f};
    }
    bool operator==(const LetterRoles &) const = default;
};

struct GateClassification {
    int class_id = 0;
    LetterRoles roles;
    /// Signed image of each of the 15 non-identity two-qubit Paulis, indexed by
    /// 4 * letter(q0) + letter(q1) - 1 with I=0, X=1, Y=2, Z=3.
    std::array<PhasedPauli, 15> images;

    /// Image support pattern: bit 0 set when qubit 0 carries a letter, bit 1 for qubit 1.
    int image_support(const PauliString &p) const {
        const auto &img = images[index_of(p)].pauli;
        return (img.letter(0) != 'I' ? 1 : 0) | (img.letter(1) != 'I' ? 2 : 0);
    }

    const PhasedPauli &image(const PauliString &p) const {
        return images[index_of(p)];
    }

    static size_t index_of(const PauliString &p) {
        if (p.num_qubits() != 2 || p.is_identity()) {
            throw std::invalid_argument("classification lookup needs a non-identity two-qubit Pauli");
        }
        return 4 * letter_code(p.letter(0)) + letter_code(p.letter(1)) - 1;
    }
    static int letter_code(char c) {
        switch (c) {
            case 'X':
                return 1;
            case 'Y':
                return 2;
            case 'Z':
                return 3;
            default:
                return 0;
        }
    }
};

namespace detail {

inline PauliString two(char a, char b) {
    return PauliString::from_text(std::string{a, b});
}

inline bool maps_to(const GateClassification &g, char a, char b, char c, char d) {
    return g.image(two(a, b)).pauli == two(c, d);
}

inline bool maps_into(const GateClassification &g, char a, char b, const std::vector<PauliString> &targets) {
    const auto &img = g.image(two(a, b)).pauli;
    return std::find(targets.begin(), targets.end(), img) != targets.end();
}

}  // namespace detail

/// Whether the support/letter transitions of `g.images` follow the pattern of
/// class `class_id` for the letter roles `r`.
inline bool matches_class(const GateClassification &g, int class_id, const LetterRoles &r) {
    using detail::maps_into;
    using detail::maps_to;
    using detail::two;
    const char I = 'I';
    switch (class_id) {
        case 1: {
            for (char l : {'X', 'Y', 'Z'}) {
                if (g.image_support(two(l, I)) != 1 || g.image_support(two(I, l)) != 2) {
                    return false;
                }
            }
            return maps_to(g, r.c, I, r.c, I) && maps_to(g, I, r.d, I, r.d);
        }
        case 2:
            return maps_to(g, r.a, I, I, r.f) && maps_to(g, r.b, I, I, r.e) && maps_to(g, r.c, I, I, r.d) &&
                   maps_to(g, r.a, r.f, r.a, r.f) && maps_to(g, r.b, r.e, r.b, r.e) && maps_to(g, r.c, r.d, r.c, r.d);
        case 3: {
            std::vector<PauliString> ad_bd = {two(r.a, r.d), two(r.b, r.d)};
            std::vector<PauliString> ce_cf = {two(r.c, r.e), two(r.c, r.f)};
            return maps_to(g, r.c, I, r.c, I) && maps_to(g, I, r.d, I, r.d) && maps_to(g, r.c, r.d, r.c, r.d) &&
                   maps_into(g, r.a, I, ad_bd) && maps_into(g, r.b, I, ad_bd) && maps_into(g, I, r.e, ce_cf) &&
                   maps_into(g, I, r.f, ce_cf);
        }
        case 4:
            return maps_to(g, r.c, I, I, r.d) && maps_to(g, r.a, I, r.c, r.e) && maps_to(g, r.b, I, r.c, r.f) &&
                   maps_to(g, I, r.e, r.a, r.d) && maps_to(g, I, r.f, r.b, r.d) && maps_to(g, r.a, r.f, r.a, r.f) &&
                   maps_to(g, r.b, r.e, r.b, r.e) && maps_to(g, r.c, r.d, r.c, r.d);
        default:
            return false;
    }
}

/// All 36 role assignments in lexicographic order of their "ABCDEF" strings.
inline const std::vector<LetterRoles> &all_letter_roles() {
    static const std::vector<LetterRoles> roles = [] {
        std::vector<LetterRoles> out;
        std::array<char, 3> p1 = {'X', 'Y', 'Z'};
        do {
            std::array<char, 3> p2 = {'X', 'Y', 'Z'};
            do {
                out.push_back(LetterRoles{p1[0], p1[1], p1[2], p2[0], p2[1], p2[2]});
            } while (std::next_permutation(p2.begin(), p2.end()));
        } while (std::next_permutation(p1.begin(), p1.end()));
        return out;
    }();
    return roles;
}

/// Conjugation images of all 15 two-qubit Paulis, without checking anything else.
inline GateClassification two_qubit_images(const CliffordTableau &op) {
    if (op.num_qubits() != 2) {
        throw std::invalid_argument("two-qubit classification requires n = 2");
    }
    GateClassification g;
    static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            if (a == 0 && b == 0) {
                continue;
            }
            auto p = detail::two(kLetters[a], kLetters[b]);
            g.images[4 * a + b - 1] = op.conjugate(p);
        }
    }
    return g;
}

/// Classifies a Hermitian two-qubit Clifford into one of four support-transition
/// classes and returns the lexicographically smallest matching letter roles.
inline GateClassification classify_two_qubit(const CliffordTableau &op) {
    if (op.num_qubits() != 2) {
        throw std::invalid_argument("classify_two_qubit: operator must act on 2 qubits");
    }
    if (!is_hermitian(op)) {
        throw std::invalid_argument("classify_two_qubit: operator is not Hermitian");
    }
    GateClassification g = two_qubit_images(op);
    for (int cls = 1; cls <= 4; cls++) {
        for (const auto &r : all_letter_roles()) {
            if (matches_class(g, cls, r)) {
                g.class_id = cls;
                g.roles = r;
                return g;
            }
        }
    }
    throw std::logic_error("classify_two_qubit: no class matched a Hermitian operator");
}

}  // namespace splnoise

#endif  // SPLNOISE_CLIFFORD_HPP
