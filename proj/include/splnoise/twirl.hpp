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

#ifndef SPLNOISE_TWIRL_HPP
#define SPLNOISE_TWIRL_HPP

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "splnoise/clifford.hpp"
#include "splnoise/model.hpp"
#include "splnoise/pauli.hpp"

namespace splnoise {

/// Rotation angle as an integer multiple of pi/4.
struct Angle {
    int pi_quarters = 2;

    static constexpr Angle pi() {
        return {4};
    }
    static constexpr Angle half_pi() {
        return {2};
    }
    static constexpr Angle quarter_pi() {
        return {1};
    }

    Angle operator-() const {
        return {-pi_quarters};
    }
    bool operator==(const Angle &) const = default;

    bool supported() const {
        int a = pi_quarters < 0 ? -pi_quarters : pi_quarters;
        return a == 1 || a == 2 || a == 4;
    }
    double radians() const {
        return pi_quarters * 0.78539816339744830962;
    }
    std::string str() const {
        static const std::map<int, std::string> names = {{1, "pi/4"},  {2, "pi/2"},  {4, "pi"},
                                                         {-1, "-pi/4"}, {-2, "-pi/2"}, {-4, "-pi"}};
        auto it = names.find(pi_quarters);
        return it == names.end() ? std::to_string(pi_quarters) + "*pi/4" : it->second;
    }
};

/// A single-qubit rotation exp(-i theta/2 P) on `qubit`.
struct Rotation {
    size_t qubit = 0;
    char letter = 'Z';
    Angle theta;

    bool operator==(const Rotation &) const = default;
    std::string str() const {
        return std::string("R") + letter + "(" + theta.str() + ")@" + std::to_string(qubit);
    }
};

/// A rotation together with a basic-gate sequence realizing it up to global
/// phase. The sequence is an operator product: the last gate acts first.
struct RotationSpec {
    Rotation rotation;
    std::vector<std::string> gate_seq;
};

inline std::string adjoint_gate_name(const std::string &g) {
    static const std::map<std::string, std::string> adj = {{"s", "sdg"},   {"sdg", "s"}, {"sx", "sxdg"},
                                                           {"sxdg", "sx"}, {"t", "tdg"}, {"tdg", "t"}};
    auto it = adj.find(g);
    return it == adj.end() ? g : it->second;
}

/// Basic-gate realization of R_letter(theta) for theta in {+-pi, +-pi/2, +-pi/4}.
/// Negative angles use the adjoint of the positive-angle sequence.
inline RotationSpec decompose_rotation(char letter, Angle theta, size_t qubit = 0) {
    if (!theta.supported()) {
        throw std::invalid_argument("decompose_rotation: unsupported angle " + theta.str());
    }
    int a = theta.pi_quarters < 0 ? -theta.pi_quarters : theta.pi_quarters;
    std::vector<std::string> seq;
    switch (letter) {
        case 'X':
            seq = a == 4 ? std::vector<std::string>{"x"} : a == 2 ? std::vector<std::string>{"sx"}
                                                                  : std::vector<std::string>{"h", "t", "h"};
            break;
        case 'Y':
            seq = a == 4 ? std::vector<std::string>{"y"} : a == 2 ? std::vector<std::string>{"h", "z"}
                                                                  : std::vector<std::string>{"sxdg", "t", "sx"};
            break;
        case 'Z':
            seq = a == 4 ? std::vector<std::string>{"z"} : a == 2 ? std::vector<std::string>{"s"}
                                                                  : std::vector<std::string>{"t"};
            break;
        default:
            throw std::invalid_argument(std::string("decompose_rotation: invalid letter '") + letter + "'");
    }
    if (theta.pi_quarters < 0) {
        std::reverse(seq.begin(), seq.end());
        for (auto &g : seq) {
            g = adjoint_gate_name(g);
        }
    }
    return RotationSpec{Rotation{qubit, letter, theta}, std::move(seq)};
}

/// Conjugation tableau of a Clifford rotation (theta a multiple of pi/2).
inline CliffordTableau rotation_tableau(const Rotation &r, size_t num_qubits) {
    if (r.theta.pi_quarters % 2 != 0) {
        throw std::invalid_argument("rotation_tableau: " + r.theta.str() + " rotation is not Clifford");
    }
    PauliString p = PauliString::single(num_qubits, r.qubit, r.letter);
    int turns = ((r.theta.pi_quarters / 2) % 4 + 4) % 4;  // theta in units of pi/2
    auto image = [&](const PauliString &q) {
        if (commutes(p, q) || turns == 0) {
            return PhasedPauli(q, 0);
        }
        if (turns == 2) {
            return PhasedPauli(q, 2);
        }
        // R Q R^dag = Q (cos theta + i sin theta P) for anticommuting Q.
        return mul(PhasedPauli(q, 0), PhasedPauli(p, turns == 1 ? 1 : 3));
    };
    std::vector<PhasedPauli> xs, zs;
    for (size_t q = 0; q < num_qubits; q++) {
        xs.push_back(image(PauliString::single(num_qubits, q, 'X')));
        zs.push_back(image(PauliString::single(num_qubits, q, 'Z')));
    }
    return CliffordTableau::from_images(std::move(xs), std::move(zs));
}

/// Product of rotations (first in the list acts first).
inline CliffordTableau rotations_tableau(const std::vector<Rotation> &rs, size_t num_qubits) {
    CliffordTableau t(num_qubits);
    for (const auto &r : rs) {
        t = compose(rotation_tableau(r, num_qubits), t);
    }
    return t;
}

/// Letter-level action of a pi/2 rotation sequence (signs dropped).
inline PauliString rotate_letters(PauliString p, const std::vector<Rotation> &rs) {
    for (const auto &r : rs) {
        if (r.theta.pi_quarters % 4 == 0) {
            continue;
        }
        auto rp = PauliString::single(p.num_qubits(), r.qubit, r.letter);
        if (!commutes(p, rp)) {
            p *= rp;
        }
    }
    return p;
}

/// A nested rotation twirl set: the twirl is the product of one independent
/// uniform draw from each factor. An element is a Pauli string whose
/// non-identity letters each denote a single-qubit rotation by theta.
struct TwirlSet {
    std::vector<std::vector<PauliString>> factors;
    Angle theta = Angle::half_pi();

    size_t size() const {
        size_t s = 1;
        for (const auto &f : factors) {
            s *= f.size();
        }
        return s;
    }

    /// All product elements, enumerated with the last factor varying fastest.
    std::vector<PauliString> elements() const {
        if (factors.empty()) {
            return {};
        }
        std::vector<PauliString> out = {PauliString(factors[0].front().num_qubits())};
        for (const auto &f : factors) {
            std::vector<PauliString> next;
            for (const auto &base : out) {
                for (const auto &e : f) {
                    auto p = base;
                    p *= e;
                    next.push_back(std::move(p));
                }
            }
            out = std::move(next);
        }
        return out;
    }
};

/// Rotations (pre) and compensating rotations (post) for one twirl element
/// on the local operator `op`, such that post * op * pre = op exactly.
struct TwirlGates {
    std::vector<Rotation> pre;
    std::vector<Rotation> post;
};

/// Throws if an element letter maps to a weight-two Pauli under `op`.
inline TwirlGates twirl_gates(const CliffordTableau &op, const PauliString &element, Angle theta) {
    TwirlGates g;
    size_t n = op.num_qubits();
    for (size_t q : element.support()) {
        char l = element.letter(q);
        auto img = op.conjugate(PauliString::single(n, q, l));
        auto supp = img.pauli.support();
        if (supp.size() != 1) {
            throw std::invalid_argument("twirl element " + element.str() + " is not single-qubit implementable");
        }
        g.pre.push_back(Rotation{q, l, theta});
        // op R_P(theta) op^dag = R_Q(sigma theta), so R_Q(-sigma theta) undoes it.
        g.post.push_back(Rotation{supp[0], img.pauli.letter(supp[0]), Angle{img.sign() * -theta.pi_quarters}});
    }
    return g;
}

inline CliffordTableau tableau_from_classification(const GateClassification &cls) {
    auto two = [](const char *s) { return PauliString::from_text(s); };
    return CliffordTableau::from_images({cls.image(two("XI")), cls.image(two("IX"))},
                                        {cls.image(two("ZI")), cls.image(two("IZ"))});
}

/// Weight-one rotation twirls that stay single-qubit implementable.
inline TwirlSet feasible_rotation_twirls(const GateClassification &cls) {
    auto one = [](char a, char b) { return PauliString::from_text(std::string{a, b}); };
    TwirlSet tw;
    switch (cls.class_id) {
        case 1:
        case 2:
            tw.factors = {{one('X', 'I'), one('Y', 'I'), one('Z', 'I')}, {one('I', 'X'), one('I', 'Y'), one('I', 'Z')}};
            break;
        case 3:
        case 4:
            tw.factors = {{one('I', 'I'), one(cls.roles.c, 'I')}, {one('I', 'I'), one('I', cls.roles.d)}};
            break;
        default:
            throw std::invalid_argument("feasible_rotation_twirls: gate is not classified");
    }
    return tw;
}

/// Twirl for single-qubit gates and idle qubits.
inline TwirlSet single_qubit_twirls() {
    TwirlSet tw;
    tw.factors = {{PauliString::from_text("X"), PauliString::from_text("Y"), PauliString::from_text("Z")}};
    return tw;
}

/// Groups of two-qubit Paulis whose fidelities the twirl makes equal.
struct AveragingPartition {
    std::vector<std::vector<PauliString>> groups;

    /// Index of the group holding p, or -1.
    int group_of(const PauliString &p) const {
        for (size_t g = 0; g < groups.size(); g++) {
            if (std::find(groups[g].begin(), groups[g].end(), p) != groups[g].end()) {
                return int(g);
            }
        }
        return -1;
    }

    /// Checks that the groups partition all 4^n - 1 non-identity Paulis on n qubits.
    void validate(size_t n) const {
        size_t total = 0;
        std::vector<PauliString> seen;
        for (const auto &g : groups) {
            for (const auto &p : g) {
                if (p.num_qubits() != n || p.is_identity()) {
                    throw std::invalid_argument("averaging partition: bad member " + p.str());
                }
                seen.push_back(p);
                total++;
            }
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end() || total != (size_t{1} << (2 * n)) - 1) {
            throw std::invalid_argument("averaging partition: groups do not partition the Paulis");
        }
    }
};

inline AveragingPartition singleton_partition(size_t n) {
    AveragingPartition part;
    std::vector<size_t> all(n);
    for (size_t q = 0; q < n; q++) {
        all[q] = q;
    }
    for (auto &p : enumerate_nonidentity(all, n)) {
        part.groups.push_back({p});
    }
    return part;
}

/// Fidelity groups induced by `tw` on a classified gate.
inline AveragingPartition averaging_partition(const GateClassification &cls, const TwirlSet &tw) {
    auto expected = feasible_rotation_twirls(cls);
    if (tw.factors != expected.factors) {
        throw std::invalid_argument("averaging_partition: twirl set does not match the gate class");
    }
    auto two = [](char a, char b) { return PauliString::from_text(std::string{a, b}); };
    const auto &r = cls.roles;
    const char I = 'I';
    AveragingPartition part;
    if (cls.class_id == 1 || cls.class_id == 2) {
        std::vector<PauliString> left, right, both;
        for (char a : {'X', 'Y', 'Z'}) {
            left.push_back(two(a, I));
            right.push_back(two(I, a));
            for (char b : {'X', 'Y', 'Z'}) {
                both.push_back(two(a, b));
            }
        }
        part.groups = {left, right, both};
    } else {
        part.groups = {
            {two(r.a, I), two(r.b, I)},
            {two(r.c, I)},
            {two(I, r.e), two(I, r.f)},
            {two(I, r.d)},
            {two(r.a, r.d), two(r.b, r.d)},
            {two(r.c, r.e), two(r.c, r.f)},
            {two(r.a, r.e), two(r.a, r.f), two(r.b, r.e), two(r.b, r.f)},
            {two(r.c, r.d)},
        };
    }
    for (auto &g : part.groups) {
        std::sort(g.begin(), g.end());
    }
    std::sort(part.groups.begin(), part.groups.end());
    return part;
}

/// Replaces every fidelity by the mean over its group.
inline DensePauliChannel twirl_dense(const DensePauliChannel &ch, const AveragingPartition &part) {
    part.validate(ch.n);
    std::vector<double> f = ch.fidelities;
    for (const auto &g : part.groups) {
        double mean = 0.0;
        for (const auto &p : g) {
            mean += ch.fidelity(p);
        }
        mean /= double(g.size());
        for (const auto &p : g) {
            f[DensePauliChannel::index_of(p)] = mean;
        }
    }
    return DensePauliChannel::from_fidelities(ch.n, std::move(f));
}

/// Single-qubit rotations inserted around every second application of a gate
/// so that the measured basis is mapped back onto itself.
struct CorrectionSchedule {
    PauliString basis;
    std::vector<Rotation> pre;
    std::vector<Rotation> post;

    bool empty() const {
        return pre.empty();
    }
};

namespace detail {

// Per-qubit candidate rotations, "no rotation" first.
inline std::vector<std::vector<Rotation>> rotation_options(size_t qubit, const std::string &letters) {
    std::vector<std::vector<Rotation>> opts = {{}};
    for (char l : letters) {
        opts.push_back({Rotation{qubit, l, Angle::half_pi()}});
        opts.push_back({Rotation{qubit, l, -Angle::half_pi()}});
    }
    return opts;
}

// Finds pre-rotations mapping op(basis) back to basis, or an empty schedule
// when the basis image has a different support or already equals the basis.
inline CorrectionSchedule find_correction(const CliffordTableau &op, const PauliString &basis,
                                          const std::vector<std::vector<std::vector<Rotation>>> &options) {
    CorrectionSchedule sched;
    sched.basis = basis;
    auto img = op.conjugate(basis);
    if (img.pauli == basis || img.pauli.support() != basis.support()) {
        return sched;
    }
    // Enumerate the cartesian product of per-qubit options; prefer a + sign.
    std::vector<std::vector<Rotation>> candidates = {{}};
    for (const auto &per_qubit : options) {
        std::vector<std::vector<Rotation>> next;
        for (const auto &c : candidates) {
            for (const auto &o : per_qubit) {
                auto merged = c;
                merged.insert(merged.end(), o.begin(), o.end());
                next.push_back(std::move(merged));
            }
        }
        candidates = std::move(next);
    }
    const std::vector<Rotation> *chosen = nullptr;
    for (int pass = 0; pass < 2 && chosen == nullptr; pass++) {
        for (const auto &c : candidates) {
            auto mapped = rotations_tableau(c, op.num_qubits()).conjugate(img);
            if (mapped.pauli == basis && (pass == 1 || mapped.phase_exp == 0)) {
                chosen = &c;
                break;
            }
        }
    }
    if (chosen == nullptr) {
        throw std::logic_error("no correction maps " + img.str() + " back to " + basis.str());
    }
    sched.pre = *chosen;
    for (const auto &r : sched.pre) {
        auto tg = twirl_gates(op, PauliString::single(op.num_qubits(), r.qubit, r.letter), r.theta);
        sched.post.insert(sched.post.end(), tg.post.begin(), tg.post.end());
    }
    return sched;
}

}  // namespace detail

/// Correction options for a classified two-qubit gate: C and D rotations
/// for classes 3 and 4, any single-qubit rotation for classes 1 and 2.
inline std::vector<std::vector<std::vector<Rotation>>> correction_options(const GateClassification &cls) {
    if (cls.class_id == 3 || cls.class_id == 4) {
        return {detail::rotation_options(0, std::string(1, cls.roles.c)),
                detail::rotation_options(1, std::string(1, cls.roles.d))};
    }
    return {detail::rotation_options(0, "XYZ"), detail::rotation_options(1, "XYZ")};
}

inline CorrectionSchedule correction_schedule(const GateClassification &cls, const PauliString &basis) {
    if (basis.num_qubits() != 2 || basis.weight() != 2) {
        throw std::invalid_argument("correction_schedule: basis must be two letters from {X,Y,Z}");
    }
    return detail::find_correction(tableau_from_classification(cls), basis, correction_options(cls));
}

/// Correction for a single-qubit gate measured in a one-letter basis.
inline CorrectionSchedule single_qubit_correction(const CliffordTableau &op, const PauliString &basis) {
    if (op.num_qubits() != 1 || basis.num_qubits() != 1 || basis.is_identity()) {
        throw std::invalid_argument("single_qubit_correction: expects one qubit");
    }
    return detail::find_correction(op, basis, {detail::rotation_options(0, "XYZ")});
}

/// A fidelity pair observable from one measured sub-pattern.
struct MeasuredPair {
    PauliString first;
    PauliString second;
    bool support_changed = false;

    bool operator==(const MeasuredPair &) const = default;
};

/// Pair (m, partner) for a sub-pattern m: without corrections the partner is
/// op(m); with corrections it is the pre-rotated image.
inline MeasuredPair pair_for(const CliffordTableau &op, const CorrectionSchedule &sched, const PauliString &m) {
    auto partner = rotate_letters(op.conjugate(m).pauli, sched.pre);
    bool changed = partner.support() != m.support();
    return MeasuredPair{m, std::move(partner), changed};
}

/// Pairs for the three sub-patterns SI, IT and ST of a two-letter basis.
inline std::vector<MeasuredPair> measurable_pairs(const GateClassification &cls, const PauliString &basis,
                                                  const CorrectionSchedule &sched) {
    if (basis.num_qubits() != 2 || basis.weight() != 2) {
        throw std::invalid_argument("measurable_pairs: basis must be two letters from {X,Y,Z}");
    }
    auto op = tableau_from_classification(cls);
    std::vector<MeasuredPair> out;
    for (auto m : {basis.restricted_to(std::vector<size_t>{0}), basis.restricted_to(std::vector<size_t>{1}), basis}) {
        out.push_back(pair_for(op, sched, m));
    }
    return out;
}

}  // namespace splnoise

#endif  // SPLNOISE_TWIRL_HPP
