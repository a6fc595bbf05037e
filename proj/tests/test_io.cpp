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

#include <gtest/gtest.h>

#include "splnoise/io.hpp"

using namespace splnoise;
using io::json;

namespace {

json example_topology() {
    return json::parse(R"({
        "n": 4,
        "edges": [[0, 1], [1, 2], [2, 3]],
        "crosstalk": [[0, 2]],
        "gates": [{"name": "cz", "qubits": [0, 1]}, {"name": "h", "qubits": [3]}],
        "locality": 2
    })");
}

json small_learn_config() {
    json j;
    j["topology"] = json::parse(R"({"n": 2, "edges": [[0, 1]], "gates": [{"name": "cz", "qubits": [0, 1]}]})");
    j["planted"] = json{{"random", {{"low", 0.001}, {"high", 0.01}, {"seed", 5}}}};
    j["depths"] = {2, 4};
    j["exact"] = true;
    return j;
}

}  // namespace

TEST(Io, TopologyRoundTrip) {
    auto t = io::topology_from_json(example_topology());
    EXPECT_EQ(t.n, 4u);
    EXPECT_EQ(t.crosstalk.size(), 1u);
    EXPECT_EQ(t.gates.size(), 2u);
    auto again = io::topology_from_json(io::to_json(t));
    EXPECT_EQ(io::to_json(again), io::to_json(t));
}

TEST(Io, TopologyRejectsBadInput) {
    auto j = example_topology();
    j["edges"].push_back({3, 9});
    EXPECT_THROW(io::topology_from_json(j), io::InputError);
    j = example_topology();
    j["gates"].push_back({{"name", "cz"}, {"qubits", {1, 2}}});  // overlaps the first gate
    EXPECT_THROW(io::topology_from_json(j), io::InputError);
    j = example_topology();
    j["gates"][0]["qubits"] = {0};
    EXPECT_THROW(io::topology_from_json(j), io::InputError);
    j = example_topology();
    j.erase("n");
    EXPECT_THROW(io::topology_from_json(j), io::InputError);
    j = example_topology();
    j["locality"] = 0;
    EXPECT_THROW(io::topology_from_json(j), io::InputError);
}

TEST(Io, CustomGateRoundTrip) {
    json g = json::parse(R"({"name": "mine", "qubits": [0, 1], "x_images": ["+XZ", "+ZX"], "z_images": ["+ZI", "+IZ"]})");
    auto gate = io::gate_from_json(g);
    ASSERT_TRUE(gate.custom.has_value());
    EXPECT_EQ(gate.local(), local_gate("cz"));
    EXPECT_EQ(io::to_json(gate), g);
    g["z_images"] = {"+XI", "+IZ"};  // does not commute correctly
    EXPECT_THROW(io::gate_from_json(g), io::InputError);
}

TEST(Io, ModelRoundTripAndValidation) {
    auto terms = generate_terms(ModelSpec{3, {{0, 1}, {1, 2}}});
    auto m = io::random_model(3, terms, 0.001, 0.02, 9);
    for (double r : m.rates()) {
        EXPECT_GE(r, 0.001);
        EXPECT_LE(r, 0.02);
    }
    auto back = io::model_from_json(io::to_json(m));
    EXPECT_EQ(back.terms(), m.terms());
    EXPECT_EQ(back.rates(), m.rates());
    EXPECT_EQ(io::random_model(3, terms, 0.001, 0.02, 9).rates(), m.rates());
    EXPECT_THROW(io::random_model(3, terms, 0.02, 0.001, 9), io::InputError);

    auto j = io::to_json(m);
    j["lambda"].push_back(0.1);
    EXPECT_THROW(io::model_from_json(j), io::InputError);
    j = io::to_json(m);
    j["terms"][0] = "XX";
    EXPECT_THROW(io::model_from_json(j), io::InputError);
    j = io::to_json(m);
    j["terms"][0] = "XQZ";
    EXPECT_THROW(io::model_from_json(j), io::InputError);
}

TEST(Io, LearnConfigRoundTrip) {
    auto cfg = io::learn_config_from_json(small_learn_config());
    EXPECT_EQ(cfg.depths, (std::vector<int>{2, 4}));
    EXPECT_TRUE(cfg.exact);
    EXPECT_EQ(cfg.planted.terms().size(), 15u);
    auto again = io::learn_config_from_json(io::to_json(cfg));
    EXPECT_EQ(io::to_json(again), io::to_json(cfg));
}

TEST(Io, LearnConfigRejectsBadInput) {
    auto j = small_learn_config();
    j["mode"] = "clifford";
    EXPECT_THROW(io::learn_config_from_json(j), io::InputError);
    j = small_learn_config();
    j["spam"] = {{"readout_flip", {0.6, 0.0}}};
    EXPECT_THROW(io::learn_config_from_json(j), io::InputError);
    j = small_learn_config();
    j["spam"] = {{"prep_flip", {0.0, 0.0, 0.0}}};
    EXPECT_THROW(io::learn_config_from_json(j), io::InputError);
    j = small_learn_config();
    j["benchmarks"] = {"XYZ"};
    EXPECT_THROW(io::learn_config_from_json(j), io::InputError);
    j = small_learn_config();
    j["shots"] = "many";
    EXPECT_THROW(io::learn_config_from_json(j), io::InputError);
    j = small_learn_config();
    j.erase("planted");
    EXPECT_THROW(io::learn_config_from_json(j), io::InputError);
}

TEST(Io, MissingFileAndBadJson) {
    EXPECT_THROW(io::read_json_file("/nonexistent/file.json"), io::InputError);
    EXPECT_THROW(io::read_text_file("/nonexistent/file.txt"), io::InputError);
}

TEST(Io, BasesDocumentRoundTrip) {
    auto trace = select_bases(io::topology_from_json(example_topology()), TwirlMode::pauli);
    auto doc = io::to_json(trace);
    auto bases = io::bases_from_json(doc, 4);
    EXPECT_EQ(bases, trace.bases.bases);
    EXPECT_THROW(io::bases_from_json(doc, 5), io::InputError);
}

TEST(Io, ResultsAreDeterministicAndCsvIsWellFormed) {
    auto cfg = io::learn_config_from_json(small_learn_config());
    auto a = learn_end_to_end(cfg);
    auto b = learn_end_to_end(cfg);
    EXPECT_EQ(io::results_json(cfg, a).dump(), io::results_json(cfg, b).dump());
    auto res = io::results_json(cfg, a);
    EXPECT_EQ(res["lambda"].size(), a.fit.terms.size());
    EXPECT_EQ(res["fidelities"].size(), a.estimates.entries.size());

    auto csv = io::decay_csv(a);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "measurement,basis,measured,partner,depth,estimate,shots,pair_fidelity,amplitude");
    size_t rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
        rows++;
    }
    EXPECT_EQ(rows, a.plan.measurements.size() * cfg.depths.size());
}
