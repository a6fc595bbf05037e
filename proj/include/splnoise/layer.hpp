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

#ifndef SPLNOISE_LAYER_HPP
#define SPLNOISE_LAYER_HPP

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "splnoise/clifford.hpp"
#include "splnoise/model.hpp"
#include "splnoise/twirl.hpp"

namespace splnoise {

/// A gate in a layer: a library name, or "custom" with explicit images.
struct Gate {
    std::string name;
    std::vector<size_t> qubits;
    std::optional<CliffordTableau> custom;

    CliffordTableau local() const {
        if (custom) {
            if (custom->num_qubits() != qubits.size()) {
                throw std::invalid_argument("custom gate acts on " + std::to_string(custom->num_qubits()) +
                                            " qubits but lists " + std::to_string(qubits.size()));
            }
            return *custom;
        }
        return local_gate(name);
    }
};

enum class ElementKind { idle, single, two };

/// One gate of a layer (idle qubits are explicit identity elements).
struct LayerElement {
    ElementKind kind = ElementKind::idle;
    std::string name;
    std::vector<size_t> qubits;
    CliffordTableau local;
    std::optional<GateClassification> cls;

    /// Twirl set used in rotation mode.
    TwirlSet twirls() const {
        return kind == ElementKind::two ? feasible_rotation_twirls(*cls) : single_qubit_twirls();
    }

    /// Local fidelity-averaging groups in rotation mode.
    AveragingPartition averaging() const {
        if (kind == ElementKind::two) {
            return averaging_partition(*cls, twirls());
        }
        AveragingPartition p;
        p.groups = {{PauliString::from_text("X"), PauliString::from_text("Y"), PauliString::from_text("Z")}};
        return p;
    }

    /// Correction for the local letters of a basis.
    CorrectionSchedule correction(const PauliString &local_basis) const {
        if (kind == ElementKind::two) {
            return correction_schedule(*cls, local_basis);
        }
        return single_qubit_correction(local, local_basis);
    }
};

/// A layer of Hermitian Cliffords on disjoint qubits.
class Layer {
   public:
    Layer() = default;

    Layer(size_t n, std::vector<Gate> gates) : n_(n), gates_(std::move(gates)) {
        if (n_ == 0) {
            throw std::invalid_argument("layer: n must be positive");
        }
        std::vector<int> owner(n_, -1);
        for (size_t g = 0; g < gates_.size(); g++) {
            const auto &gate = gates_[g];
            auto local = gate.local();
            if (local.num_qubits() != gate.qubits.size()) {
                throw std::invalid_argument("gate '" + gate.name + "' expects " + std::to_string(local.num_qubits()) +
                                            " qubit(s), got " + std::to_string(gate.qubits.size()));
            }
            if (local.num_qubits() > 2) {
                throw std::invalid_argument("gate '" + gate.name + "': only one- and two-qubit gates are supported");
            }
            for (size_t q : gate.qubits) {
                if (q >= n_) {
                    throw std::out_of_range("gate '" + gate.name + "' uses qubit " + std::to_string(q) +
                                            " outside 0.." + std::to_string(n_ - 1));
                }
                if (owner[q] >= 0) {
                    throw std::invalid_argument("gates overlap on qubit " + std::to_string(q));
                }
                owner[q] = int(g);
            }
            if (!is_hermitian(local)) {
                throw std::invalid_argument("gate '" + gate.name + "' is not Hermitian");
            }
            LayerElement e;
            e.name = gate.name;
            e.qubits = gate.qubits;
            e.local = local;
            if (local.num_qubits() == 2) {
                e.kind = ElementKind::two;
                e.cls = classify_two_qubit(local);
            } else {
                e.kind = ElementKind::single;
            }
            elements_.push_back(std::move(e));
        }
        for (size_t q = 0; q < n_; q++) {
            if (owner[q] < 0) {
                LayerElement e;
                e.kind = ElementKind::idle;
                e.name = "id";
                e.qubits = {q};
                e.local = CliffordTableau(1);
                elements_.push_back(std::move(e));
            }
        }
        element_of_.assign(n_, 0);
        for (size_t i = 0; i < elements_.size(); i++) {
            for (size_t q : elements_[i].qubits) {
                element_of_[q] = i;
            }
        }
        tableau_ = CliffordTableau(n_);
        for (const auto &e : elements_) {
            tableau_ = compose(embed(e.local, e.qubits, n_), tableau_);
        }
    }

    size_t num_qubits() const {
        return n_;
    }
    const std::vector<Gate> &gates() const {
        return gates_;
    }
    const std::vector<LayerElement> &elements() const {
        return elements_;
    }
    size_t element_of(size_t q) const {
        return element_of_.at(q);
    }
    const CliffordTableau &tableau() const {
        return tableau_;
    }

    PhasedPauli conjugate(const PauliString &p) const {
        return tableau_.conjugate(p);
    }

    /// Elements whose qubits intersect the support of p.
    std::vector<size_t> touching(const PauliString &p) const {
        std::vector<size_t> out;
        for (size_t q : p.support()) {
            size_t e = element_of_[q];
            if (std::find(out.begin(), out.end(), e) == out.end()) {
                out.push_back(e);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

   private:
    size_t n_ = 0;
    std::vector<Gate> gates_;
    std::vector<LayerElement> elements_;
    std::vector<size_t> element_of_;
    CliffordTableau tableau_;
};

/// Corrections for a full-width basis: the union over elements.
struct LayerCorrection {
    PauliString basis;
    std::vector<Rotation> pre;
    std::vector<Rotation> post;

    bool empty() const {
        return pre.empty();
    }
};

inline LayerCorrection layer_correction(const Layer &layer, const PauliString &basis) {
    if (basis.num_qubits() != layer.num_qubits() || basis.weight() != layer.num_qubits()) {
        throw std::invalid_argument("basis " + basis.str() + " must assign X, Y or Z to every qubit");
    }
    LayerCorrection c;
    c.basis = basis;
    for (const auto &e : layer.elements()) {
        if (e.kind == ElementKind::idle) {
            continue;
        }
        auto local = e.correction(basis.extract(e.qubits));
        for (auto r : local.pre) {
            r.qubit = e.qubits[r.qubit];
            c.pre.push_back(r);
        }
        for (auto r : local.post) {
            r.qubit = e.qubits[r.qubit];
            c.post.push_back(r);
        }
    }
    return c;
}

/// Partner of a measured sub-pattern m under the layer and its corrections.
inline PauliString partner_of(const Layer &layer, const LayerCorrection &corr, const PauliString &m) {
    return rotate_letters(layer.conjugate(m).pauli, corr.pre);
}

/// Pair observed from sub-pattern m of a basis.
inline MeasuredPair layer_pair(const Layer &layer, const LayerCorrection &corr, const PauliString &m) {
    auto p = partner_of(layer, corr, m);
    bool changed = p.support() != m.support();
    return MeasuredPair{m, std::move(p), changed};
}

/// Rotation-mode equivalence: two Paulis are equivalent when their local
/// restrictions lie in the same averaging group on every element.
class LayerAveraging {
   public:
    explicit LayerAveraging(const Layer &layer) : layer_(&layer) {
        for (const auto &e : layer.elements()) {
            parts_.push_back(e.averaging());
        }
    }

    /// Canonical representative: the smallest member of each local group.
    PauliString canonical(const PauliString &p) const {
        PauliString out(p.num_qubits());
        for (size_t i = 0; i < layer_->elements().size(); i++) {
            const auto &e = layer_->elements()[i];
            auto local = p.extract(e.qubits);
            if (local.is_identity()) {
                continue;
            }
            int g = parts_[i].group_of(local);
            out.insert(e.qubits, parts_[i].groups[g].front());
        }
        return out;
    }

    bool equivalent(const PauliString &a, const PauliString &b) const {
        return canonical(a) == canonical(b);
    }

   private:
    const Layer *layer_;
    std::vector<AveragingPartition> parts_;
};

/// Rotation-twirled fidelity of p: the mean over all twirl elements of the
/// elements touching p of the fidelity of the rotated Pauli.
inline double twirled_fidelity(const Layer &layer, const NoiseModel &model, const PauliString &p) {
    std::vector<PauliString> rotated = {p};
    for (size_t ei : layer.touching(p)) {
        const auto &e = layer.elements()[ei];
        std::vector<PauliString> next;
        for (const auto &el : e.twirls().elements()) {
            std::vector<Rotation> rs;
            for (size_t q : el.support()) {
                rs.push_back(Rotation{e.qubits[q], el.letter(q), Angle::half_pi()});
            }
            for (const auto &base : rotated) {
                next.push_back(rotate_letters(base, rs));
            }
        }
        rotated = std::move(next);
    }
    double sum = 0.0;
    for (const auto &r : rotated) {
        sum += model.fidelity(r);
    }
    return sum / double(rotated.size());
}

}  // namespace splnoise

#endif  // SPLNOISE_LAYER_HPP
