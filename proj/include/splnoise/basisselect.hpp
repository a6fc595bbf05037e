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

#ifndef SPLNOISE_BASISSELECT_HPP
#define SPLNOISE_BASISSELECT_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "splnoise/coverarray.hpp"
#include "splnoise/layer.hpp"
#include "splnoise/model.hpp"

namespace splnoise {

enum class TwirlMode { pauli, rotation };

inline std::string to_string(TwirlMode m) {
    return m == TwirlMode::pauli ? "pauli" : "rotation";
}

inline TwirlMode twirl_mode_from_string(const std::string &s) {
    if (s == "pauli" || s == "plain") {
        return TwirlMode::pauli;
    }
    if (s == "rotation") {
        return TwirlMode::rotation;
    }
    throw std::invalid_argument("unknown mode '" + s + "' (expected pauli or rotation)");
}

/// Device topology, presumed crosstalk and the layer to be learned.
struct Topology {
    size_t n = 0;
    std::vector<std::pair<size_t, size_t>> edges;
    std::vector<std::pair<size_t, size_t>> crosstalk;
    std::vector<Gate> gates;
    size_t locality = 2;

    /// Model supports: connected qubit sets of size <= locality over edges and crosstalk.
    ModelSpec model_spec() const {
        auto all = edges;
        all.insert(all.end(), crosstalk.begin(), crosstalk.end());
        return ModelSpec{n, connected_supports(n, all, locality)};
    }

    Layer layer() const {
        return Layer(n, gates);
    }
};

struct LearningVertex {
    std::vector<size_t> qubits;
    int symbols = 3;
    /// Layer element for merged vertices, -1 otherwise.
    int element = -1;
};

/// Graph whose proper colorings assign covering-array columns to vertices.
struct LearningGraph {
    size_t n = 0;
    std::vector<LearningVertex> vertices;
    std::vector<std::pair<size_t, size_t>> edges;
    /// Vertex holding each qubit, or -1 if that vertex was deleted.
    std::vector<int> vertex_of_qubit;

    std::vector<std::vector<size_t>> adjacency() const {
        std::vector<std::vector<size_t>> adj(vertices.size());
        for (auto [a, b] : edges) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        for (auto &a : adj) {
            std::sort(a.begin(), a.end());
        }
        return adj;
    }

    bool has_edge(size_t a, size_t b) const {
        auto e = std::minmax(a, b);
        return std::find(edges.begin(), edges.end(), std::pair<size_t, size_t>(e.first, e.second)) != edges.end();
    }
};

namespace detail {

inline void add_edge(std::set<std::pair<size_t, size_t>> &edges, size_t a, size_t b) {
    if (a != b) {
        edges.insert(std::minmax(a, b));
    }
}

}  // namespace detail

/// One vertex per qubit and a clique on every support (model and crosstalk).
inline LearningGraph build_graph(const ModelSpec &spec, const std::vector<std::vector<size_t>> &crosstalk = {}) {
    spec.validate();
    LearningGraph g;
    g.n = spec.n;
    for (size_t q = 0; q < spec.n; q++) {
        g.vertices.push_back(LearningVertex{{q}, 3, -1});
        g.vertex_of_qubit.push_back(int(q));
    }
    std::set<std::pair<size_t, size_t>> edges;
    auto clique = [&](const std::vector<size_t> &s) {
        for (size_t q : s) {
            if (q >= spec.n) {
                throw std::out_of_range("support index " + std::to_string(q) + " out of range");
            }
        }
        for (size_t i = 0; i < s.size(); i++) {
            for (size_t j = i + 1; j < s.size(); j++) {
                detail::add_edge(edges, s[i], s[j]);
            }
        }
    };
    for (const auto &s : spec.supports) {
        clique(s);
    }
    for (const auto &s : crosstalk) {
        clique(s);
    }
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

/// Merges the two vertices of every two-qubit gate and deletes every vertex
/// that carries a single measurement symbol. Classes 3 and 4 keep two symbols.
inline LearningGraph reduce_graph(const LearningGraph &g, const Layer &layer) {
    if (layer.num_qubits() != g.n) {
        throw std::invalid_argument("reduce_graph: layer and graph sizes differ");
    }
    for (const auto &v : g.vertices) {
        if (v.qubits.size() != 1) {
            throw std::invalid_argument("reduce_graph: graph is already reduced");
        }
    }
    // Merged vertex per element, in element order.
    std::vector<LearningVertex> merged;
    std::vector<int> merged_of_qubit(g.n, -1);
    for (size_t i = 0; i < layer.elements().size(); i++) {
        const auto &e = layer.elements()[i];
        int symbols = 1;
        if (e.kind == ElementKind::two && (e.cls->class_id == 3 || e.cls->class_id == 4)) {
            symbols = 2;
        }
        LearningVertex v{e.qubits, symbols, int(i)};
        std::sort(v.qubits.begin(), v.qubits.end());
        for (size_t q : e.qubits) {
            merged_of_qubit[q] = int(merged.size());
        }
        merged.push_back(std::move(v));
    }
    // Keep vertices ordered by their smallest qubit.
    std::vector<size_t> order(merged.size());
    for (size_t i = 0; i < order.size(); i++) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return merged[a].qubits < merged[b].qubits; });
    LearningGraph out;
    out.n = g.n;
    out.vertex_of_qubit.assign(g.n, -1);
    std::vector<int> new_id(merged.size(), -1);
    for (size_t i : order) {
        if (merged[i].symbols > 1) {
            new_id[i] = int(out.vertices.size());
            for (size_t q : merged[i].qubits) {
                out.vertex_of_qubit[q] = new_id[i];
            }
            out.vertices.push_back(merged[i]);
        }
    }
    std::set<std::pair<size_t, size_t>> edges;
    for (auto [a, b] : g.edges) {
        int va = new_id[merged_of_qubit[g.vertices[a].qubits[0]]];
        int vb = new_id[merged_of_qubit[g.vertices[b].qubits[0]]];
        if (va >= 0 && vb >= 0) {
            detail::add_edge(edges, size_t(va), size_t(vb));
        }
    }
    out.edges.assign(edges.begin(), edges.end());
    return out;
}

struct Coloring {
    std::vector<int> color;
    int num_colors = 0;
};

inline bool is_proper(const LearningGraph &g, const Coloring &c) {
    if (c.color.size() != g.vertices.size()) {
        return false;
    }
    for (auto [a, b] : g.edges) {
        if (c.color[a] == c.color[b]) {
            return false;
        }
    }
    std::set<int> used(c.color.begin(), c.color.end());
    return int(used.size()) == c.num_colors &&
           (used.empty() || (*used.begin() == 0 && *used.rbegin() == c.num_colors - 1));
}

namespace detail {

inline Coloring dsatur(const LearningGraph &g) {
    auto adj = g.adjacency();
    size_t nv = g.vertices.size();
    Coloring c;
    c.color.assign(nv, -1);
    std::vector<std::set<int>> neighbor_colors(nv);
    for (size_t step = 0; step < nv; step++) {
        size_t pick = nv;
        for (size_t v = 0; v < nv; v++) {
            if (c.color[v] >= 0) {
                continue;
            }
            if (pick == nv || neighbor_colors[v].size() > neighbor_colors[pick].size() ||
                (neighbor_colors[v].size() == neighbor_colors[pick].size() && adj[v].size() > adj[pick].size())) {
                pick = v;
            }
        }
        int col = 0;
        while (neighbor_colors[pick].count(col)) {
            col++;
        }
        c.color[pick] = col;
        c.num_colors = std::max(c.num_colors, col + 1);
        for (size_t w : adj[pick]) {
            neighbor_colors[w].insert(col);
        }
    }
    return c;
}

// Backtracking search for a coloring with at most k colors.
inline bool color_with(const std::vector<std::vector<size_t>> &adj, std::vector<int> &color, size_t v, int k) {
    if (v == color.size()) {
        return true;
    }
    // A vertex may open at most one new color.
    int max_used = -1;
    for (size_t u = 0; u < v; u++) {
        max_used = std::max(max_used, color[u]);
    }
    int limit = std::min(k, max_used + 2);
    for (int col = 0; col < limit; col++) {
        bool ok = true;
        for (size_t w : adj[v]) {
            if (w < v && color[w] == col) {
                ok = false;
                break;
            }
        }
        if (ok) {
            color[v] = col;
            if (color_with(adj, color, v + 1, k)) {
                return true;
            }
        }
    }
    color[v] = -1;
    return false;
}

}  // namespace detail

/// Largest graph for which color(g, true) runs the exact search.
inline constexpr size_t kExactColoringLimit = 24;

/// DSATUR coloring with ties broken by lowest vertex id. With `exact`, graphs
/// of up to kExactColoringLimit vertices are then colored optimally.
inline Coloring color(const LearningGraph &g, bool exact = false) {
    Coloring best = detail::dsatur(g);
    if (!exact || g.vertices.size() > kExactColoringLimit) {
        return best;
    }
    auto adj = g.adjacency();
    for (int k = 1; k < best.num_colors; k++) {
        std::vector<int> col(g.vertices.size(), -1);
        if (detail::color_with(adj, col, 0, k)) {
            Coloring c;
            c.color = col;
            c.num_colors = 0;
            for (int x : col) {
                c.num_colors = std::max(c.num_colors, x + 1);
            }
            return c;
        }
    }
    return best;
}

/// Fill letter for qubits whose vertex was deleted.
inline constexpr char kFillLetter = 'Z';

struct BasisSet {
    TwirlMode mode = TwirlMode::pauli;
    std::vector<PauliString> bases;
    Coloring coloring;
    CoveringArray ca;
    /// Per-vertex letter strings for each symbol, e.g. {"X","Y","Z"} or {"ZZ","XY"}.
    std::vector<std::vector<std::string>> symbol_maps;
};

/// Letters of a class-3/4 merged vertex for symbols 0 (C, D) and 1 (A, F),
/// ordered by the vertex's qubit list.
inline std::vector<std::string> merged_symbol_letters(const Layer &layer, const LearningVertex &v) {
    const auto &e = layer.elements().at(size_t(v.element));
    const auto &r = e.cls->roles;
    std::vector<std::string> maps;
    for (auto [l0, l1] : {std::pair{r.c, r.d}, std::pair{r.a, r.f}}) {
        std::string s(v.qubits.size(), 'I');
        for (size_t i = 0; i < v.qubits.size(); i++) {
            s[i] = v.qubits[i] == e.qubits[0] ? l0 : l1;
        }
        maps.push_back(s);
    }
    return maps;
}

/// Maps each covering-array row to a basis, using column color(v) for vertex v.
inline BasisSet emit_bases(const LearningGraph &g, const Coloring &coloring, const CoveringArray &ca,
                           const Layer &layer, TwirlMode mode) {
    if (!is_proper(g, coloring)) {
        throw std::invalid_argument("emit_bases: coloring is not proper");
    }
    if (coloring.num_colors > ca.k) {
        throw std::invalid_argument("emit_bases: " + std::to_string(coloring.num_colors) + " colors exceed " +
                                    std::to_string(ca.k) + " covering-array columns");
    }
    int want_v = mode == TwirlMode::pauli ? 3 : 2;
    if (ca.v != want_v) {
        throw std::invalid_argument("emit_bases: " + to_string(mode) + " mode needs alphabet " +
                                    std::to_string(want_v));
    }
    BasisSet bs;
    bs.mode = mode;
    bs.coloring = coloring;
    bs.ca = ca;
    for (const auto &v : g.vertices) {
        if (mode == TwirlMode::pauli) {
            if (v.qubits.size() != 1) {
                throw std::invalid_argument("emit_bases: pauli mode expects an unreduced graph");
            }
            bs.symbol_maps.push_back({"X", "Y", "Z"});
        } else {
            if (v.element < 0) {
                throw std::invalid_argument("emit_bases: rotation mode expects a reduced graph");
            }
            bs.symbol_maps.push_back(merged_symbol_letters(layer, v));
        }
    }
    for (const auto &row : ca.rows) {
        PauliString basis(g.n);
        for (size_t q = 0; q < g.n; q++) {
            basis.set_letter(q, kFillLetter);
        }
        for (size_t vi = 0; vi < g.vertices.size(); vi++) {
            const auto &v = g.vertices[vi];
            const auto &letters = bs.symbol_maps[vi][size_t(row[size_t(coloring.color[vi])])];
            for (size_t i = 0; i < v.qubits.size(); i++) {
                basis.set_letter(v.qubits[i], letters[i]);
            }
        }
        bs.bases.push_back(std::move(basis));
    }
    return bs;
}

/// Result of the full selection pipeline, kept for reporting.
struct SelectionTrace {
    LearningGraph graph;
    LearningGraph reduced;
    BasisSet bases;
};

/// graph -> (rotation: reduce) -> color -> covering array -> bases.
inline SelectionTrace select_bases(const Topology &topo, TwirlMode mode, bool exact_coloring = true) {
    auto spec = topo.model_spec();
    std::vector<std::vector<size_t>> xt;
    for (auto [a, b] : topo.crosstalk) {
        xt.push_back({a, b});
    }
    SelectionTrace trace;
    trace.graph = build_graph(spec, xt);
    Layer layer = topo.layer();
    trace.reduced = mode == TwirlMode::rotation ? reduce_graph(trace.graph, layer) : trace.graph;
    auto col = color(trace.reduced, exact_coloring);
    int v = mode == TwirlMode::pauli ? 3 : 2;
    CoveringArray ca;
    if (col.num_colors == 0) {
        ca = CoveringArray{1, 0, v, {std::vector<int>{}}};
    } else {
        if (col.num_colors > kMaxColumns) {
            throw std::invalid_argument("coloring needs " + std::to_string(col.num_colors) +
                                        " columns, more than the supported " + std::to_string(kMaxColumns));
        }
        int t = int(std::min<size_t>(std::max<size_t>(spec.locality(), 1), size_t(col.num_colors)));
        ca = construct(t, col.num_colors, v);
    }
    trace.bases = emit_bases(trace.reduced, col, ca, layer, mode);
    return trace;
}

/// One measured sub-pattern of a basis and the pair it reveals.
struct PlannedMeasurement {
    size_t basis = 0;
    MeasuredPair pair;
};

/// A target's access to a measurement.
struct TargetLink {
    size_t measurement = 0;
    /// True when the target is (equivalent to) the measured sub-pattern
    /// rather than its partner.
    bool via_first = true;
};

/// All distinct sub-patterns needed to reach the targets, per basis.
struct MeasurementPlan {
    std::vector<PauliString> bases;
    std::vector<LayerCorrection> corrections;
    std::vector<PlannedMeasurement> measurements;
    std::vector<std::vector<TargetLink>> links;  // per target
};

inline MeasurementPlan plan_measurements(const Layer &layer, const std::vector<PauliString> &bases,
                                         const std::vector<PauliString> &targets, TwirlMode mode) {
    MeasurementPlan plan;
    plan.bases = bases;
    plan.links.resize(targets.size());
    std::optional<LayerAveraging> avg;
    if (mode == TwirlMode::rotation) {
        avg.emplace(layer);
    }
    auto same = [&](const PauliString &a, const PauliString &b) { return avg ? avg->equivalent(a, b) : a == b; };
    for (size_t bi = 0; bi < bases.size(); bi++) {
        plan.corrections.push_back(layer_correction(layer, bases[bi]));
        const auto &corr = plan.corrections.back();
        std::map<std::string, size_t> index;
        for (size_t t = 0; t < targets.size(); t++) {
            const auto &b = targets[t];
            auto image = layer.conjugate(b).pauli;
            for (const auto &supp : {b.support(), image.support()}) {
                auto m = bases[bi].restricted_to(supp);
                auto key = m.str();
                auto it = index.find(key);
                size_t mi;
                if (it == index.end()) {
                    mi = plan.measurements.size();
                    plan.measurements.push_back(PlannedMeasurement{bi, layer_pair(layer, corr, m)});
                    index.emplace(key, mi);
                } else {
                    mi = it->second;
                }
                const auto &pair = plan.measurements[mi].pair;
                bool first = same(pair.first, b), second = same(pair.second, b);
                if (!first && !second) {
                    continue;
                }
                auto &links = plan.links[t];
                bool seen = std::any_of(links.begin(), links.end(),
                                        [&](const TargetLink &l) { return l.measurement == mi; });
                if (!seen) {
                    links.push_back(TargetLink{mi, first});
                }
            }
        }
    }
    return plan;
}

struct CoverageResult {
    bool ok = true;
    std::vector<PauliString> uncovered;
};

/// Checks that every target is reachable from some sub-pattern of some basis.
inline CoverageResult verify_coverage(const std::vector<PauliString> &bases, const std::vector<PauliString> &targets,
                                      const Layer &layer, TwirlMode mode) {
    auto plan = plan_measurements(layer, bases, targets, mode);
    CoverageResult r;
    for (size_t t = 0; t < targets.size(); t++) {
        if (plan.links[t].empty()) {
            r.ok = false;
            r.uncovered.push_back(targets[t]);
        }
    }
    return r;
}

}  // namespace splnoise

#endif  // SPLNOISE_BASISSELECT_HPP
