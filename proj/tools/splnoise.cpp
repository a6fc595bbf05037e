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

// Command-line front end: classify, terms, select-bases, coverarray,
// verify-ca and learn.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splnoise/io.hpp"
#include "splnoise/splnoise.hpp"

namespace fs = std::filesystem;
using namespace splnoise;
using io::json;

namespace {

constexpr const char *kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitFailure = 3;

std::string sha256_hex(const std::string &data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX *ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    std::ostringstream out;
    for (unsigned int i = 0; i < len; i++) {
        out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    }
    return out.str();
}

std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path &path, const std::string &data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw io::InputError("cannot write " + path.string());
    }
    out << data;
}

std::string dump(const json &j) {
    return j.dump(2) + "\n";
}

// Accepts a gate name ("cz") or a path to a gate JSON document.
CliffordTableau gate_argument(const std::string &arg) {
    if (fs::exists(arg)) {
        auto j = io::read_json_file(arg);
        auto g = io::gate_from_json(j);
        return g.local();
    }
    try {
        return local_gate(arg);
    } catch (const std::exception &e) {
        throw io::InputError(e.what());
    }
}

std::string support_label(int s) {
    switch (s) {
        case 1:
            return "q0";
        case 2:
            return "q1";
        default:
            return "q0q1";
    }
}

int cmd_classify(const std::string &gate_arg) {
    auto op = gate_argument(gate_arg);
    if (!is_hermitian(op)) {
        throw io::InputError("gate '" + gate_arg + "' is not Hermitian");
    }
    if (op.num_qubits() == 1) {
        std::cout << "gate: " << gate_arg << "\nsingle-qubit Hermitian Clifford\n";
        for (char l : {'X', 'Y', 'Z'}) {
            std::cout << "  " << l << " -> " << op.conjugate(PauliString::from_text(std::string(1, l))).str() << "\n";
        }
        return kExitOk;
    }
    if (op.num_qubits() != 2) {
        throw io::InputError("classification is defined for one- and two-qubit gates");
    }
    auto cls = classify_two_qubit(op);
    const auto &r = cls.roles;
    std::cout << "gate: " << gate_arg << "\nclass: " << cls.class_id << "\nroles: A=" << r.a << " B=" << r.b
              << " C=" << r.c << " D=" << r.d << " E=" << r.e << " F=" << r.f << "\n";
    std::cout << "pauli  image   support\n";
    for (size_t i = 1; i < 16; i++) {
        PauliString p(2);
        const char letters[] = {'I', 'X', 'Y', 'Z'};
        p.set_letter(0, letters[i / 4]);
        p.set_letter(1, letters[i % 4]);
        int from = (p.letter(0) != 'I' ? 1 : 0) | (p.letter(1) != 'I' ? 2 : 0);
        int to = cls.image_support(p);
        std::cout << p.str() << "     " << std::left << std::setw(6) << cls.image(p).str() << "  "
                  << support_label(from) << " -> " << support_label(to) << (from != to ? "  *" : "") << "\n";
    }
    return kExitOk;
}

Topology load_topology(const std::string &path, size_t locality) {
    auto t = io::topology_from_json(io::read_json_file(path));
    if (locality > 0) {
        t.locality = locality;
    }
    return t;
}

int cmd_terms(const std::string &path, size_t locality, const std::string &out) {
    auto j = io::read_json_file(path);
    ModelSpec spec;
    if (j.contains("supports")) {
        spec = io::model_spec_from_json(j);
    } else {
        spec = io::topology_from_json(j).model_spec();
        if (locality > 0) {
            auto t = io::topology_from_json(j);
            t.locality = locality;
            spec = t.model_spec();
        }
    }
    auto terms = generate_terms(spec);
    json r;
    r["n"] = spec.n;
    r["supports"] = spec.supports;
    r["terms"] = json::array();
    for (const auto &t : terms) r["terms"].push_back(t.str());
    if (out.empty()) {
        std::cout << dump(r);
    } else {
        write_file(out, dump(r));
    }
    return kExitOk;
}

std::string format_graph(const LearningGraph &g) {
    std::ostringstream s;
    for (size_t i = 0; i < g.vertices.size(); i++) {
        s << "  v" << i << " qubits {";
        for (size_t k = 0; k < g.vertices[i].qubits.size(); k++) {
            s << (k ? "," : "") << g.vertices[i].qubits[k];
        }
        s << "} symbols " << g.vertices[i].symbols << "\n";
    }
    s << "  edges:";
    for (auto [a, b] : g.edges) {
        s << " v" << a << "-v" << b;
    }
    s << "\n";
    return s.str();
}

// Pipeline trace in the order of the worked example: graph, reduction,
// coloring, covering array, bases.
std::string format_trace(const SelectionTrace &t) {
    std::ostringstream s;
    const auto &bs = t.bases;
    s << "mode: " << to_string(bs.mode) << "\n";
    s << "graph (" << t.graph.vertices.size() << " vertices, " << t.graph.edges.size() << " edges)\n"
      << format_graph(t.graph);
    if (bs.mode == TwirlMode::rotation) {
        s << "reduced graph (" << t.reduced.vertices.size() << " vertices, " << t.reduced.edges.size() << " edges)\n"
          << format_graph(t.reduced);
    }
    s << "coloring: " << bs.coloring.num_colors << " colors\n ";
    for (size_t i = 0; i < bs.coloring.color.size(); i++) {
        s << " v" << i << ":" << bs.coloring.color[i];
    }
    s << "\ncovering array CA(" << bs.ca.rows.size() << "; " << bs.ca.t << ", " << bs.ca.k << ", " << bs.ca.v
      << ")\n";
    for (size_t r = 0; r < bs.ca.rows.size(); r++) {
        s << "  ";
        for (int x : bs.ca.rows[r]) s << x;
        s << "  ->  " << bs.bases[r].str() << "\n";
    }
    s << "bases: " << bs.bases.size() << "\n";
    return s.str();
}

int cmd_select_bases(const std::string &path, const std::string &mode, size_t locality, const std::string &out) {
    auto topo = load_topology(path, locality);
    TwirlMode m;
    try {
        m = twirl_mode_from_string(mode);
    } catch (const std::exception &e) {
        throw io::InputError(e.what());
    }
    auto trace = select_bases(topo, m);
    auto j = io::to_json(trace);
    auto coverage = verify_coverage(trace.bases.bases, generate_terms(topo.model_spec()), topo.layer(), m);
    j["coverage_ok"] = coverage.ok;
    if (out.empty()) {
        std::cout << dump(j);
    } else {
        fs::create_directories(out);
        write_file(fs::path(out) / "bases.json", dump(j));
        auto text = format_trace(trace);
        write_file(fs::path(out) / "report.txt", text);
        std::cout << text;
    }
    if (!coverage.ok) {
        std::cerr << "coverage: " << coverage.uncovered.size() << " model term(s) unreachable, first "
                  << coverage.uncovered.front().str() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_coverarray(int t, int k, int v, const std::string &out) {
    CoveringArray ca;
    try {
        ca = construct(t, k, v);
    } catch (const std::invalid_argument &e) {
        throw io::InputError(e.what());
    }
    if (out.empty()) {
        std::cout << to_text(ca);
    } else {
        write_file(out, to_text(ca));
    }
    return kExitOk;
}

int cmd_verify_ca(const std::string &path) {
    CoveringArray ca;
    try {
        ca = from_text(io::read_text_file(path));
    } catch (const io::InputError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        throw io::InputError(e.what());
    }
    auto rep = verify(ca);
    std::cout << "CA(" << ca.rows.size() << "; " << ca.t << ", " << ca.k << ", " << ca.v << "): ";
    if (rep.ok) {
        std::cout << "ok\n";
        return kExitOk;
    }
    std::cout << "missing tuple (";
    for (size_t i = 0; i < rep.missing_tuple.size(); i++) std::cout << (i ? "," : "") << rep.missing_tuple[i];
    std::cout << ") on columns (";
    for (size_t i = 0; i < rep.missing_columns.size(); i++) std::cout << (i ? "," : "") << rep.missing_columns[i];
    std::cout << ")\n";
    return kExitFailure;
}

struct LearnOverrides {
    std::string mode;
    size_t locality = 0;
    std::vector<int> depths;
    size_t shots = 0;
    int64_t seed = -1;
    bool exact = false;
    unsigned threads = 0;
    bool threads_set = false;
};

std::string format_learn_report(const LearnConfig &cfg, const LearnResult &r) {
    std::ostringstream s;
    s << format_trace(r.selection);
    s << "measurements: " << r.plan.measurements.size() << "\n";
    s << "fit: residual " << r.fit.residual << ", resolved residual " << r.fit.resolved_residual << ", kkt "
      << r.fit.kkt_residual << ", " << r.fit.iterations << " iterations\n";
    s << "design rank " << r.fit.rank.rank << " of " << r.fit.rank.columns;
    if (cfg.mode == TwirlMode::pauli) {
        s << ", pair rank " << r.fit.pair_rank;
    }
    s << "\n";
    const int w = int(cfg.planted.num_qubits()) + 2;
    s << std::left << std::setw(w) << "term" << "lambda\n";
    for (size_t k = 0; k < r.fit.terms.size(); k++) {
        s << std::setw(w) << r.fit.terms[k].str() << r.fit.lambda[k] << "\n";
    }
    s << std::setw(w) << "pauli" << std::setw(14) << "fidelity" << std::setw(14) << "std_error" << "tier\n";
    for (const auto &e : r.estimates.entries) {
        s << std::setw(w) << e.pauli.str() << std::setw(14) << e.value << std::setw(14) << std::sqrt(e.variance)
          << io::tier_name(e.tier) << "\n";
    }
    for (const auto &w : r.warnings) {
        s << "warning: " << w << "\n";
    }
    return s.str();
}

int cmd_learn(const std::string &path, const LearnOverrides &o, const std::string &out) {
    std::string started = utc_now();
    std::string config_text = io::read_text_file(path);
    json j;
    try {
        j = json::parse(config_text);
    } catch (const json::parse_error &e) {
        throw io::InputError(path + ": " + e.what());
    }
    auto cfg = io::learn_config_from_json(j);
    if (!o.mode.empty()) {
        try {
            cfg.mode = twirl_mode_from_string(o.mode);
        } catch (const std::exception &e) {
            throw io::InputError(e.what());
        }
    }
    if (o.locality > 0) {
        cfg.topology.locality = o.locality;
        if (j.at("planted").contains("random")) {
            const auto &rj = j.at("planted").at("random");
            cfg.planted = io::random_model(cfg.topology.n, generate_terms(cfg.topology.model_spec()),
                                           rj.at("low").get<double>(), rj.at("high").get<double>(),
                                           rj.at("seed").get<uint64_t>());
        }
    }
    if (!o.depths.empty()) cfg.depths = o.depths;
    if (o.shots > 0) cfg.shots = o.shots;
    if (o.seed >= 0) cfg.seed = uint64_t(o.seed);
    if (o.exact) cfg.exact = true;
    if (o.threads_set) cfg.threads = o.threads;

    auto result = learn_end_to_end(cfg);
    auto results = dump(io::results_json(cfg, result));
    auto csv = io::decay_csv(result);
    auto report = format_learn_report(cfg, result);

    fs::create_directories(out);
    std::vector<std::pair<std::string, std::string>> outputs = {
        {"results.json", results}, {"decay.csv", csv}, {"report.txt", report}};
    json manifest;
    manifest["tool"] = "splnoise";
    manifest["version"] = kVersion;
    manifest["command"] = "learn";
    manifest["inputs"] = json::array({json{{"path", path}, {"sha256", sha256_hex(config_text)}}});
    manifest["effective_config"] = io::to_json(cfg);
    manifest["seed"] = cfg.seed;
    manifest["started_at"] = started;
    manifest["outputs"] = json::array();
    for (const auto &[name, data] : outputs) {
        write_file(fs::path(out) / name, data);
        manifest["outputs"].push_back(json{{"path", name}, {"sha256", sha256_hex(data)}});
    }
    manifest["finished_at"] = utc_now();
    write_file(fs::path(out) / "manifest.json", dump(manifest));
    std::cout << "residual " << result.fit.residual << "\n";
    std::cout << "wrote " << (fs::path(out) / "results.json").string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Sparse Pauli-Lindblad noise learning tools"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string gate_arg;
    auto *classify = app.add_subcommand("classify", "Classify a Hermitian Clifford gate");
    classify->add_option("gate", gate_arg, "Gate name (cz, cx, swap, h, ...) or gate JSON file")->required();

    std::string terms_path, terms_out;
    size_t terms_locality = 0;
    auto *terms = app.add_subcommand("terms", "List model terms for a topology or support spec");
    terms->add_option("config", terms_path, "Topology or spec JSON")->required()->check(CLI::ExistingFile);
    terms->add_option("--locality", terms_locality, "Override the topology locality");
    terms->add_option("--out", terms_out, "Output file (default stdout)");

    std::string sel_path, sel_mode = "pauli", sel_out;
    size_t sel_locality = 0;
    auto *select = app.add_subcommand("select-bases", "Choose learning bases for a layer");
    select->add_option("topology", sel_path, "Topology JSON")->required()->check(CLI::ExistingFile);
    select->add_option("--mode", sel_mode, "pauli or rotation");
    select->add_option("--locality", sel_locality, "Override the topology locality");
    select->add_option("--out", sel_out, "Output directory for bases.json and report.txt");

    int ca_t = 0, ca_k = 0, ca_v = 0;
    std::string ca_out;
    auto *cover = app.add_subcommand("coverarray", "Emit a verified covering array");
    cover->add_option("t", ca_t, "Strength")->required();
    cover->add_option("k", ca_k, "Columns")->required();
    cover->add_option("v", ca_v, "Alphabet size")->required();
    cover->add_option("--out", ca_out, "Output file (default stdout)");

    std::string verify_path;
    auto *verify_ca = app.add_subcommand("verify-ca", "Check a covering array file");
    verify_ca->add_option("file", verify_path, "Covering array text")->required()->check(CLI::ExistingFile);

    std::string learn_path, learn_out = "splnoise-out";
    LearnOverrides lo;
    auto *learn = app.add_subcommand("learn", "Run a simulated learning experiment");
    learn->add_option("config", learn_path, "Learning config JSON")->required()->check(CLI::ExistingFile);
    learn->add_option("--mode", lo.mode, "pauli or rotation");
    learn->add_option("--locality", lo.locality, "Override the topology locality");
    learn->add_option("--depths", lo.depths, "Even circuit depths")->delimiter(',');
    learn->add_option("--shots", lo.shots, "Shots per circuit");
    learn->add_option("--seed", lo.seed, "Simulation seed");
    learn->add_flag("--exact", lo.exact, "Infinite-shot expectations");
    learn->add_option("--threads", lo.threads, "Worker threads (0 = all cores)")->each([&](const std::string &) {
        lo.threads_set = true;
    });
    learn->add_option("--out", learn_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*classify) return cmd_classify(gate_arg);
        if (*terms) return cmd_terms(terms_path, terms_locality, terms_out);
        if (*select) return cmd_select_bases(sel_path, sel_mode, sel_locality, sel_out);
        if (*cover) return cmd_coverarray(ca_t, ca_k, ca_v, ca_out);
        if (*verify_ca) return cmd_verify_ca(verify_path);
        if (*learn) return cmd_learn(learn_path, lo, learn_out);
    } catch (const StageError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.stage() == "config" ? kExitInput : kExitFailure;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::out_of_range &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitInput;
}
