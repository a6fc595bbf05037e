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

#ifndef SPLNOISE_IO_HPP
#define SPLNOISE_IO_HPP

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "splnoise/basisselect.hpp"
#include "splnoise/clifford.hpp"
#include "splnoise/learn.hpp"
#include "splnoise/model.hpp"

namespace splnoise::io {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent input document.
class InputError : public std::invalid_argument {
   public:
    explicit InputError(const std::string &what) : std::invalid_argument(what) {}
};

inline json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw InputError(path + ": " + e.what());
    }
}

inline std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

namespace detail {

inline const json &field(const json &j, const char *key, const std::string &where) {
    if (!j.is_object() || !j.contains(key)) {
        throw InputError(where + ": missing field '" + key + "'");
    }
    return j.at(key);
}

template <class T>
T get(const json &j, const char *key, const std::string &where) {
    try {
        return field(j, key, where).get<T>();
    } catch (const json::exception &e) {
        throw InputError(where + "." + key + ": " + e.what());
    }
}

template <class T>
T get_or(const json &j, const char *key, T fallback, const std::string &where) {
    return j.contains(key) ? get<T>(j, key, where) : fallback;
}

inline std::vector<std::pair<size_t, size_t>> pairs(const json &j, const char *key, const std::string &where) {
    std::vector<std::pair<size_t, size_t>> out;
    if (!j.contains(key)) {
        return out;
    }
    for (const auto &e : j.at(key)) {
        if (!e.is_array() || e.size() != 2) {
            throw InputError(where + "." + key + ": expected [a, b] pairs");
        }
        out.emplace_back(e[0].get<size_t>(), e[1].get<size_t>());
    }
    return out;
}

inline PauliString pauli(const json &j, size_t n, const std::string &where) {
    if (!j.is_string()) {
        throw InputError(where + ": expected a Pauli string");
    }
    try {
        auto p = PauliString::from_text(j.get<std::string>());
        if (n != 0 && p.num_qubits() != n) {
            throw InputError(where + ": " + p.str() + " does not have length " + std::to_string(n));
        }
        return p;
    } catch (const InputError &) {
        throw;
    } catch (const std::exception &e) {
        throw InputError(where + ": " + e.what());
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gates and topology
// ---------------------------------------------------------------------------

/// {"name": "cz", "qubits": [0, 1]} or a custom gate with signed images,
/// {"name": "custom", "qubits": [...], "x_images": ["+XZ", ...], "z_images": [...]}.
inline Gate gate_from_json(const json &j) {
    const std::string where = "gate";
    Gate g;
    g.name = detail::get<std::string>(j, "name", where);
    g.qubits = detail::get<std::vector<size_t>>(j, "qubits", where);
    if (j.contains("x_images") || j.contains("z_images")) {
        auto xs = detail::get<std::vector<std::string>>(j, "x_images", where);
        auto zs = detail::get<std::vector<std::string>>(j, "z_images", where);
        std::vector<PhasedPauli> xi, zi;
        try {
            for (const auto &s : xs) xi.push_back(PhasedPauli::from_text(s));
            for (const auto &s : zs) zi.push_back(PhasedPauli::from_text(s));
            g.custom = CliffordTableau::from_images(xi, zi);
        } catch (const std::exception &e) {
            throw InputError("gate '" + g.name + "': " + e.what());
        }
    } else {
        try {
            if (standard_gate_arity(g.name) != g.qubits.size()) {
                throw InputError("gate '" + g.name + "' expects " + std::to_string(standard_gate_arity(g.name)) +
                                 " qubit(s)");
            }
        } catch (const InputError &) {
            throw;
        } catch (const std::exception &e) {
            throw InputError(e.what());
        }
    }
    return g;
}

inline json to_json(const Gate &g) {
    json j;
    j["name"] = g.name;
    j["qubits"] = g.qubits;
    if (g.custom) {
        std::vector<std::string> xs, zs;
        for (size_t q = 0; q < g.custom->num_qubits(); q++) {
            xs.push_back(g.custom->x_image(q).str());
            zs.push_back(g.custom->z_image(q).str());
        }
        j["x_images"] = xs;
        j["z_images"] = zs;
    }
    return j;
}

/// {"n", "edges", "crosstalk", "gates", "locality"}; qubits are 0-indexed.
inline Topology topology_from_json(const json &j) {
    const std::string where = "topology";
    Topology t;
    t.n = detail::get<size_t>(j, "n", where);
    if (t.n == 0 || t.n > 64) {
        throw InputError("topology.n must be in 1..64");
    }
    t.edges = detail::pairs(j, "edges", where);
    t.crosstalk = detail::pairs(j, "crosstalk", where);
    t.locality = detail::get_or<size_t>(j, "locality", 2, where);
    if (t.locality == 0) {
        throw InputError("topology.locality must be positive");
    }
    if (j.contains("gates")) {
        for (const auto &g : j.at("gates")) {
            t.gates.push_back(gate_from_json(g));
        }
    }
    for (auto [a, b] : t.edges) {
        if (a >= t.n || b >= t.n) throw InputError("topology: edge outside 0..n-1");
    }
    for (auto [a, b] : t.crosstalk) {
        if (a >= t.n || b >= t.n) throw InputError("topology: crosstalk pair outside 0..n-1");
    }
    try {
        (void)t.layer();
    } catch (const std::exception &e) {
        throw InputError(std::string("topology: ") + e.what());
    }
    return t;
}

inline json to_json(const Topology &t) {
    json j;
    j["n"] = t.n;
    j["edges"] = json::array();
    for (auto [a, b] : t.edges) j["edges"].push_back({a, b});
    j["crosstalk"] = json::array();
    for (auto [a, b] : t.crosstalk) j["crosstalk"].push_back({a, b});
    j["gates"] = json::array();
    for (const auto &g : t.gates) j["gates"].push_back(to_json(g));
    j["locality"] = t.locality;
    return j;
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

inline ModelSpec model_spec_from_json(const json &j) {
    ModelSpec s;
    s.n = detail::get<size_t>(j, "n", "spec");
    s.supports = detail::get<std::vector<std::vector<size_t>>>(j, "supports", "spec");
    try {
        s.validate();
    } catch (const std::exception &e) {
        throw InputError(e.what());
    }
    return s;
}

inline json to_json(const ModelSpec &s) {
    return json{{"n", s.n}, {"supports", s.supports}};
}

/// Rates drawn independently and uniformly from [low, high].
inline NoiseModel random_model(size_t n, const std::vector<PauliString> &terms, double low, double high,
                               uint64_t seed) {
    if (!(low >= 0.0) || !(high >= low)) {
        throw InputError("random model: need 0 <= low <= high");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(low, high);
    std::vector<double> rates;
    for (size_t k = 0; k < terms.size(); k++) {
        rates.push_back(u(rng));
    }
    return NoiseModel(n, terms, std::move(rates));
}

/// {"n", "terms": ["XI", ...], "lambda": [...]}.
inline NoiseModel model_from_json(const json &j) {
    const std::string where = "model";
    size_t n = detail::get<size_t>(j, "n", where);
    std::vector<PauliString> terms;
    for (const auto &t : detail::field(j, "terms", where)) {
        terms.push_back(detail::pauli(t, n, where + ".terms"));
    }
    auto rates = detail::get<std::vector<double>>(j, "lambda", where);
    try {
        return NoiseModel(n, std::move(terms), std::move(rates));
    } catch (const std::exception &e) {
        throw InputError(e.what());
    }
}

inline json to_json(const NoiseModel &m) {
    json j;
    j["n"] = m.num_qubits();
    j["terms"] = json::array();
    for (const auto &t : m.terms()) j["terms"].push_back(t.str());
    j["lambda"] = m.rates();
    return j;
}

// ---------------------------------------------------------------------------
// Learning configuration
// ---------------------------------------------------------------------------

/// Learning run description. "planted" is either a model document or
/// {"random": {"low", "high", "seed"}} over the topology's model terms.
inline LearnConfig learn_config_from_json(const json &j) {
    const std::string where = "config";
    LearnConfig cfg;
    cfg.topology = topology_from_json(detail::field(j, "topology", where));
    size_t n = cfg.topology.n;
    const auto &planted = detail::field(j, "planted", where);
    if (planted.contains("random")) {
        const auto &r = planted.at("random");
        std::vector<PauliString> terms;
        try {
            terms = generate_terms(cfg.topology.model_spec());
        } catch (const std::exception &e) {
            throw InputError(e.what());
        }
        cfg.planted = random_model(n, terms, detail::get<double>(r, "low", "planted.random"),
                                   detail::get<double>(r, "high", "planted.random"),
                                   detail::get<uint64_t>(r, "seed", "planted.random"));
    } else {
        cfg.planted = model_from_json(planted);
        if (cfg.planted.num_qubits() != n) {
            throw InputError("planted model size differs from the topology");
        }
    }
    try {
        cfg.mode = twirl_mode_from_string(detail::get_or<std::string>(j, "mode", "pauli", where));
    } catch (const std::exception &e) {
        throw InputError(e.what());
    }
    cfg.depths = detail::get_or<std::vector<int>>(j, "depths", cfg.depths, where);
    cfg.shots = detail::get_or<size_t>(j, "shots", cfg.shots, where);
    cfg.twirl_samples = detail::get_or<size_t>(j, "twirl_samples", cfg.twirl_samples, where);
    cfg.seed = detail::get_or<uint64_t>(j, "seed", cfg.seed, where);
    cfg.exact = detail::get_or<bool>(j, "exact", cfg.exact, where);
    cfg.threads = detail::get_or<unsigned>(j, "threads", cfg.threads, where);
    if (j.contains("spam")) {
        const auto &s = j.at("spam");
        cfg.spam.prep_flip = detail::get_or<std::vector<double>>(s, "prep_flip", {}, "spam");
        cfg.spam.readout_flip = detail::get_or<std::vector<double>>(s, "readout_flip", {}, "spam");
        for (const auto *v : {&cfg.spam.prep_flip, &cfg.spam.readout_flip}) {
            if (v->size() > n) throw InputError("spam: more entries than qubits");
            for (double p : *v) {
                if (!(p >= 0.0 && p < 0.5)) throw InputError("spam: flip probabilities must lie in [0, 0.5)");
            }
        }
    }
    if (j.contains("benchmarks")) {
        for (const auto &b : j.at("benchmarks")) {
            cfg.benchmarks.push_back(detail::pauli(b, n, "config.benchmarks"));
        }
    }
    return cfg;
}

inline json to_json(const LearnConfig &cfg) {
    json j;
    j["topology"] = to_json(cfg.topology);
    j["planted"] = to_json(cfg.planted);
    j["mode"] = to_string(cfg.mode);
    j["depths"] = cfg.depths;
    j["shots"] = cfg.shots;
    j["twirl_samples"] = cfg.twirl_samples;
    j["seed"] = cfg.seed;
    j["exact"] = cfg.exact;
    j["spam"] = json{{"prep_flip", cfg.spam.prep_flip}, {"readout_flip", cfg.spam.readout_flip}};
    j["benchmarks"] = json::array();
    for (const auto &b : cfg.benchmarks) j["benchmarks"].push_back(b.str());
    return j;
}

// ---------------------------------------------------------------------------
// Basis selection
// ---------------------------------------------------------------------------

inline json to_json(const CoveringArray &ca) {
    json j;
    j["t"] = ca.t;
    j["k"] = ca.k;
    j["v"] = ca.v;
    j["N"] = ca.rows.size();
    j["rows"] = json::array();
    for (const auto &row : ca.rows) {
        std::string s;
        for (int x : row) s.push_back(char('0' + x));
        j["rows"].push_back(s);
    }
    return j;
}

inline json to_json(const LearningGraph &g) {
    json j;
    j["vertices"] = json::array();
    for (const auto &v : g.vertices) {
        j["vertices"].push_back(json{{"qubits", v.qubits}, {"symbols", v.symbols}});
    }
    j["edges"] = json::array();
    for (auto [a, b] : g.edges) j["edges"].push_back({a, b});
    return j;
}

inline json to_json(const SelectionTrace &t) {
    const auto &bs = t.bases;
    json j;
    j["mode"] = to_string(bs.mode);
    j["bases"] = json::array();
    for (const auto &b : bs.bases) j["bases"].push_back(b.str());
    j["coloring"] = json{{"colors", bs.coloring.color}, {"num_colors", bs.coloring.num_colors}};
    j["ca"] = to_json(bs.ca);
    j["symbol_maps"] = bs.symbol_maps;
    j["graph"] = to_json(t.graph);
    j["reduced"] = to_json(t.reduced);
    return j;
}

/// Bases from a bases document (only the "bases" list is needed).
inline std::vector<PauliString> bases_from_json(const json &j, size_t n) {
    std::vector<PauliString> out;
    for (const auto &b : detail::field(j, "bases", "bases")) {
        out.push_back(detail::pauli(b, n, "bases"));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

inline const char *tier_name(Tier t) {
    switch (t) {
        case Tier::individual:
            return "individual";
        case Tier::original_pair:
            return "original_pair";
        case Tier::other_pair:
            return "other_pair";
    }
    return "unknown";
}

inline double max_of(const std::vector<double> &v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

/// {"lambda", "fidelities", "residual", "diagnostics"}. Deterministic for a
/// given result: no timestamps or host data.
inline json results_json(const LearnConfig &cfg, const LearnResult &r) {
    json j;
    j["lambda"] = json::object();
    for (size_t k = 0; k < r.fit.terms.size(); k++) {
        j["lambda"][r.fit.terms[k].str()] = r.fit.lambda[k];
    }
    j["fidelities"] = json::object();
    for (size_t i = 0; i < r.estimates.entries.size(); i++) {
        const auto &e = r.estimates.entries[i];
        json f;
        f["value"] = e.value;
        f["std_error"] = std::sqrt(e.variance);
        f["fitted"] = r.fit.reconstruction_error.empty() ? e.value
                                                         : NoiseModel(cfg.planted.num_qubits(), r.fit.terms,
                                                                      r.fit.lambda)
                                                               .fidelity(e.pauli);
        f["tier"] = tier_name(e.tier);
        f["symmetry_resolved"] = e.symmetry_resolved;
        f["averaged_group"] = e.averaged_group;
        f["strong_assumption"] = e.strong_assumption;
        f["sources"] = json::array();
        for (const auto &s : e.sources) {
            f["sources"].push_back(json{{"basis", r.plan.bases[s.basis].str()},
                                        {"measured", s.measured.str()},
                                        {"partner", s.partner.str()}});
        }
        j["fidelities"][e.pauli.str()] = f;
    }
    j["residual"] = r.fit.residual;
    json d;
    d["mode"] = to_string(cfg.mode);
    d["exact"] = cfg.exact;
    d["seed"] = cfg.seed;
    d["depths"] = cfg.depths;
    d["shots"] = cfg.exact ? 0 : cfg.shots;
    d["bases"] = json::array();
    for (const auto &b : r.plan.bases) d["bases"].push_back(b.str());
    d["measurements"] = r.plan.measurements.size();
    d["resolved_residual"] = r.fit.resolved_residual;
    d["kkt_residual"] = r.fit.kkt_residual;
    d["iterations"] = r.fit.iterations;
    d["objective_history"] = r.fit.objective_history;
    d["pair_rank"] = r.fit.pair_rank;
    d["rank"] = json{{"full_rank", r.fit.rank.full_rank},
                     {"rank", r.fit.rank.rank},
                     {"columns", r.fit.rank.columns},
                     {"null_witness", r.fit.rank.null_witness}};
    d["max_reconstruction_error"] = max_of(r.fit.reconstruction_error);
    d["max_pair_reconstruction_error"] = max_of(r.fit.pair_reconstruction_error);
    d["warnings"] = r.warnings;
    j["diagnostics"] = d;
    return j;
}

/// One line per (measurement, depth) for external plotting.
inline std::string decay_csv(const LearnResult &r) {
    std::ostringstream out;
    out.precision(17);
    out << "measurement,basis,measured,partner,depth,estimate,shots,pair_fidelity,amplitude\n";
    for (size_t mi = 0; mi < r.series.size(); mi++) {
        const auto &s = r.series[mi];
        const auto &m = r.plan.measurements[mi];
        const auto &fit = r.fits[mi];
        for (size_t i = 0; i < s.depths.size(); i++) {
            out << mi << ',' << r.plan.bases[m.basis].str() << ',' << m.pair.first.str() << ','
                << m.pair.second.str() << ',' << s.depths[i] << ',' << s.estimates[i] << ',' << s.shots[i] << ',';
            if (fit) {
                out << fit->pair_fidelity << ',' << fit->amplitude;
            } else {
                out << ',';
            }
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace splnoise::io

#endif  // SPLNOISE_IO_HPP
