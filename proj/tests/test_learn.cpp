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

#include "dense_oracle.hpp"
#include "generators.hpp"
#include "splnoise/learn.hpp"
#include "twirl_oracle.hpp"

using namespace splnoise;

namespace {

std::vector<std::pair<size_t, size_t>> line_edges(size_t n) {
    std::vector<std::pair<size_t, size_t>> e;
    for (size_t q = 0; q + 1 < n; q++) e.push_back({q, q + 1});
    return e;
}

oracle::Channel dense_model_channel(const NoiseModel &m) {
    std::vector<oracle::Channel> factors;
    size_t n = m.num_qubits();
    for (size_t k = 0; k < m.terms().size(); k++) {
        double p = m.flip_probability(k);
        factors.push_back(oracle::pauli_channel({std::string(n, 'I'), m.terms()[k].str()}, {1.0 - p, p}));
    }
    return [factors](const oracle::Mat &rho) {
        oracle::Mat out = rho;
        for (const auto &f : factors) out = f(out);
        return out;
    };
}

oracle::Mat dense_layer(const Layer &layer) {
    size_t n = layer.num_qubits();
    oracle::Mat u = oracle::Mat::Identity(Eigen::Index(1) << n, Eigen::Index(1) << n);
    for (const auto &g : layer.gates()) {
        auto local = g.qubits.size() == 2 ? oracle::gate2(g.name) : oracle::gate1(g.name);
        u = oracle::embed(local, g.qubits, n) * u;
    }
    return u;
}

// Density-matrix run of the learning circuit: prepare the +1 eigenstate of
// the basis, apply depth steps of [pre] noise layer [post] with corrections
// on even steps, and return <sub>.
double dense_expectation(const Layer &layer, const NoiseModel &model, const LayerCorrection &corr,
                         const PauliString &sub, int depth) {
    size_t n = layer.num_qubits();
    auto dim = Eigen::Index(1) << n;
    oracle::Mat rho = oracle::Mat::Identity(dim, dim) / double(dim);
    for (size_t q = 0; q < n; q++) {
        std::string s(n, 'I');
        s[q] = corr.basis.letter(q);
        rho = (oracle::Mat::Identity(dim, dim) + oracle::pauli(s)) * rho;
    }
    auto noise = dense_model_channel(model);
    auto u = dense_layer(layer);
    for (int k = 1; k <= depth; k++) {
        bool even = k % 2 == 0;
        if (even) {
            for (const auto &r : corr.pre) {
                auto g = twirl_oracle::dense_rotation(r, n);
                rho = g * rho * g.adjoint();
            }
        }
        rho = noise(rho);
        rho = u * rho * u.adjoint();
        if (even) {
            for (const auto &r : corr.post) {
                auto g = twirl_oracle::dense_rotation(r, n);
                rho = g * rho * g.adjoint();
            }
        }
    }
    return (oracle::pauli(sub.str()) * rho).trace().real();
}

std::vector<PauliString> all_full_bases(size_t n) {
    std::vector<PauliString> out;
    size_t total = 1;
    for (size_t q = 0; q < n; q++) total *= 3;
    for (size_t idx = 0; idx < total; idx++) {
        PauliString b(n);
        for (size_t q = 0, v = idx; q < n; q++, v /= 3) b.set_letter(q, "XYZ"[v % 3]);
        out.push_back(b);
    }
    return out;
}

std::vector<PauliString> sub_patterns(const PauliString &basis) {
    std::vector<PauliString> out;
    size_t n = basis.num_qubits();
    for (size_t mask = 1; mask < (size_t{1} << n); mask++) {
        std::vector<size_t> s;
        for (size_t q = 0; q < n; q++) {
            if (mask >> q & 1) s.push_back(q);
        }
        out.push_back(basis.restricted_to(s));
    }
    return out;
}

LearnConfig small_config(bool exact) {
    LearnConfig cfg;
    cfg.topology.n = 4;
    cfg.topology.edges = line_edges(4);
    cfg.topology.gates = {{"cz", {0, 1}, {}}, {"cx", {2, 3}, {}}};
    auto terms = generate_terms(cfg.topology.model_spec());
    gen::Rng rng(3);
    std::uniform_real_distribution<double> u(0.001, 0.02);
    std::vector<double> lam;
    for (size_t k = 0; k < terms.size(); k++) lam.push_back(u(rng));
    cfg.planted = NoiseModel(4, terms, lam);
    cfg.exact = exact;
    cfg.shots = 2000;
    cfg.twirl_samples = 4;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST(Learn, DesignMatrixHoldsAnticommutationIndicators) {
    std::vector<PauliString> b = {PauliString::from_text("XI"), PauliString::from_text("ZZ")};
    std::vector<PauliString> k = {PauliString::from_text("ZI"), PauliString::from_text("XX"),
                                  PauliString::from_text("IY")};
    auto d = design_matrix(b, k);
    Eigen::MatrixXd want(2, 3);
    want << 1, 0, 0, 0, 0, 1;
    EXPECT_EQ(d.m, want);
}

TEST(Learn, RankCheckReportsWitness) {
    // XI commutes with itself, so its column is zero.
    std::vector<PauliString> b = {PauliString::from_text("XI")};
    std::vector<PauliString> k = {PauliString::from_text("XI"), PauliString::from_text("YI")};
    auto r = rank_check(design_matrix(b, k));
    EXPECT_FALSE(r.full_rank);
    EXPECT_EQ(r.rank, 1u);
    ASSERT_EQ(r.null_witness.size(), 2u);
    EXPECT_DOUBLE_EQ(r.null_witness[0], 1.0);
    EXPECT_DOUBLE_EQ(r.null_witness[1], 0.0);
}

TEST(Learn, TermBenchmarksGiveFullRankOnSmallLines) {
    for (size_t n = 2; n <= 5; n++) {
        for (size_t ell = 1; ell <= 3; ell++) {
            auto terms = generate_terms(ModelSpec{n, connected_supports(n, line_edges(n), ell)});
            auto r = rank_check(design_matrix(terms, terms));
            EXPECT_TRUE(r.full_rank) << "n=" << n << " l=" << ell;
            EXPECT_EQ(r.rank, terms.size());
        }
    }
}

TEST(Learn, NnlsMatchesExhaustiveActiveSetSearch) {
    gen::Rng rng(19);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; trial++) {
        Eigen::Index m = 6 + Eigen::Index(rng() % 4), n = 2 + Eigen::Index(rng() % 4);
        Eigen::MatrixXd a(m, n);
        Eigen::VectorXd y(m);
        for (Eigen::Index i = 0; i < m; i++) {
            y(i) = g(rng);
            for (Eigen::Index j = 0; j < n; j++) a(i, j) = g(rng);
        }
        auto sol = nnls_solve(a, y);
        // Exhaustive: the optimum is the best feasible unconstrained solve over some support.
        double best = 0.5 * y.squaredNorm();
        for (uint32_t mask = 1; mask < (1u << n); mask++) {
            std::vector<Eigen::Index> idx;
            for (Eigen::Index j = 0; j < n; j++) {
                if (mask >> j & 1) idx.push_back(j);
            }
            Eigen::MatrixXd sub(m, Eigen::Index(idx.size()));
            for (size_t c = 0; c < idx.size(); c++) sub.col(Eigen::Index(c)) = a.col(idx[c]);
            Eigen::VectorXd z = sub.colPivHouseholderQr().solve(y);
            if (z.minCoeff() < 0) continue;
            best = std::min(best, 0.5 * (sub * z - y).squaredNorm());
        }
        ASSERT_GE(sol.x.minCoeff(), 0.0);
        ASSERT_NEAR(sol.objective, best, 1e-10 * std::max(1.0, best));
        ASSERT_LT(sol.kkt_residual, 1e-9);
        for (size_t i = 1; i < sol.objective_history.size(); i++) {
            ASSERT_LE(sol.objective_history[i], sol.objective_history[i - 1] + 1e-12);
        }
    }
    EXPECT_THROW(nnls_solve(Eigen::MatrixXd::Ones(2, 2), Eigen::VectorXd::Ones(3)), std::invalid_argument);
}

TEST(Learn, NnlsRecoversNonnegativeSolution) {
    gen::Rng rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd a(8, 5);
    for (Eigen::Index i = 0; i < 8; i++) {
        for (Eigen::Index j = 0; j < 5; j++) a(i, j) = u(rng);
    }
    Eigen::VectorXd x(5);
    x << 0.1, 0.0, 0.3, 0.02, 0.0;
    auto sol = nnls_solve(a, a * x);
    EXPECT_LT((sol.x - x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Learn, ExactExpectationsMatchDensityMatrixRuns) {
    gen::Rng rng(29);
    std::vector<std::pair<size_t, std::vector<Gate>>> layers = {
        {2, {{"cz", {0, 1}, {}}}},
        {2, {{"cx", {1, 0}, {}}}},
        {2, {{"swap", {0, 1}, {}}}},
        {2, {{"h", {0}, {}}, {"x", {1}, {}}}},
        {3, {{"cz", {0, 1}, {}}, {"h", {2}, {}}}},
        {3, {{"cx", {0, 2}, {}}}},
    };
    for (const auto &[n, gates] : layers) {
        Layer layer(n, gates);
        auto model = gen::model(rng, n, 6, 0.0, 0.1);
        CircuitSimulator sim(layer, model, TwirlMode::pauli, {});
        for (const auto &basis : all_full_bases(n)) {
            for (bool corrected : {false, true}) {
                auto corr = corrected ? layer_correction(layer, basis) : LayerCorrection{basis, {}, {}};
                auto subs = sub_patterns(basis);
                for (int depth : {2, 4}) {
                    auto got = sim.exact(corr, subs, depth);
                    for (size_t i = 0; i < subs.size(); i++) {
                        double want = dense_expectation(layer, model, corr, subs[i], depth);
                        ASSERT_NEAR(got[i], want, 1e-12)
                            << layer.tableau().str() << " basis " << basis.str() << " sub " << subs[i].str()
                            << " corrected " << corrected << " depth " << depth;
                    }
                }
            }
        }
    }
}

TEST(Learn, CorrectionTurnsCzPairIntoSingleFidelity) {
    Layer layer(2, {{"cz", {0, 1}, {}}});
    NoiseModel m(2, {PauliString::from_text("XI"), PauliString::from_text("IZ"), PauliString::from_text("YY")},
                 {0.01, 0.02, 0.03});
    CircuitSimulator sim(layer, m, TwirlMode::pauli, {});
    auto xx = PauliString::from_text("XX"), yy = PauliString::from_text("YY");
    double plain = sim.exact(LayerCorrection{xx, {}, {}}, {xx}, 4)[0];
    EXPECT_NEAR(plain, std::pow(m.fidelity(xx) * m.fidelity(yy), 2), 1e-15);
    double fixed = sim.exact(layer_correction(layer, xx), {xx}, 4)[0];
    EXPECT_NEAR(fixed, std::pow(m.fidelity(xx), 4), 1e-15);
}

TEST(Learn, SampledMeansAgreeWithExactValues) {
    gen::Rng rng(37);
    Layer layer(3, {{"cz", {0, 1}, {}}, {"h", {2}, {}}});
    auto model = gen::model(rng, 3, 8, 0.01, 0.05);
    SpamSpec spam{{0.01, 0.02, 0.0}, {0.03, 0.0, 0.01}};
    for (auto mode : {TwirlMode::pauli, TwirlMode::rotation}) {
        CircuitSimulator sim(layer, model, mode, spam);
        for (const char *b : {"XXZ", "ZYX", "YYY"}) {
            auto basis = PauliString::from_text(b);
            auto corr = layer_correction(layer, basis);
            auto subs = sub_patterns(basis);
            const int depth = 6;
            const size_t circuits = 64, shots = 4000;
            // Rotation twirl draws move the per-circuit expectation, so the
            // standard error comes from the spread across circuits.
            std::vector<double> sum(subs.size(), 0.0), sum_sq(subs.size(), 0.0);
            for (size_t c = 0; c < circuits; c++) {
                auto s = sim.sample(corr, subs, depth, shots, stream_seed(99, c));
                for (size_t i = 0; i < s.size(); i++) {
                    double x = double(s[i]) / double(shots);
                    sum[i] += x;
                    sum_sq[i] += x * x;
                }
            }
            auto want = sim.exact(corr, subs, depth);
            double nc = double(circuits);
            for (size_t i = 0; i < subs.size(); i++) {
                double mean = sum[i] / nc;
                double var = std::max((sum_sq[i] - nc * mean * mean) / (nc - 1), 1e-8);
                double sd = std::sqrt(var / nc);
                EXPECT_NEAR(mean, want[i], 5 * sd) << to_string(mode) << " " << b << " " << subs[i].str();
            }
        }
    }
}

TEST(Learn, SamplerRejectsOddDepth) {
    Layer layer(2, {{"cz", {0, 1}, {}}});
    NoiseModel m(2, {PauliString::from_text("XI")}, {0.01});
    CircuitSimulator sim(layer, m, TwirlMode::pauli, {});
    auto b = PauliString::from_text("XX");
    EXPECT_THROW(sim.sample(LayerCorrection{b, {}, {}}, {b}, 3, 10, 1), StageError);
    EXPECT_THROW(sim.exact(LayerCorrection{b, {}, {}}, {b}, 0), StageError);
}

TEST(Learn, DecayFitIsExactOnNoiselessSeries) {
    DecaySeries s{0, {2, 4, 8, 16}, {}, {0, 0, 0, 0}};
    for (int d : s.depths) s.estimates.push_back(0.93 * std::pow(0.97, d / 2));
    auto fit = fit_decay(s);
    EXPECT_NEAR(fit.pair_fidelity, 0.97, 1e-13);
    EXPECT_NEAR(fit.amplitude, 0.93, 1e-13);
    EXPECT_EQ(fit.variance, 0.0);
    EXPECT_EQ(fit.depths_used, 4u);
}

TEST(Learn, DecayFitErrorBarsAreCalibrated) {
    gen::Rng rng(43);
    const double f = 0.96, a = 0.9;
    const size_t shots = 20000;
    int within = 0;
    const int trials = 400;
    for (int t = 0; t < trials; t++) {
        DecaySeries s{0, {2, 4, 8, 16}, {}, {}};
        for (int d : s.depths) {
            double e = a * std::pow(f, d / 2);
            std::binomial_distribution<size_t> bin(shots, (1 + e) / 2);
            s.estimates.push_back(2.0 * double(bin(rng)) / double(shots) - 1.0);
            s.shots.push_back(shots);
        }
        auto fit = fit_decay(s);
        if (std::abs(fit.pair_fidelity - f) <= 2 * std::sqrt(fit.variance)) within++;
    }
    // 2-sigma coverage near 95%.
    EXPECT_GT(within, int(0.91 * trials));
    EXPECT_LT(within, int(0.99 * trials));
}

TEST(Learn, DecayFitEdgeCases) {
    DecaySeries few{3, {2, 4}, {0.5, -0.1}, {100, 100}};
    EXPECT_THROW(fit_decay(few), StageError);
    DecaySeries growing{0, {2, 4}, {0.5, 0.6}, {0, 0}};
    auto fit = fit_decay(growing);
    EXPECT_TRUE(fit.clamped);
    EXPECT_EQ(fit.pair_fidelity, 1.0);
    DecaySeries ragged{0, {2, 4}, {0.5}, {0, 0}};
    EXPECT_THROW(fit_decay(ragged), StageError);
}

TEST(Learn, ExactPipelineReproducesMeasuredPairs) {
    auto cfg = small_config(true);
    auto r = learn_end_to_end(cfg);
    NoiseModel fitted(4, r.fit.terms, r.fit.lambda);
    for (const auto &m : r.plan.measurements) {
        double want = cfg.planted.fidelity(m.pair.first) * cfg.planted.fidelity(m.pair.second);
        double got = fitted.fidelity(m.pair.first) * fitted.fidelity(m.pair.second);
        ASSERT_NEAR(got, want, 1e-10) << m.pair.first.str() << " / " << m.pair.second.str();
    }
    for (const auto &e : r.estimates.entries) {
        if (e.tier == Tier::individual) {
            EXPECT_NEAR(e.value, cfg.planted.fidelity(e.pauli), 1e-12) << e.pauli.str();
        }
        EXPECT_EQ(e.symmetry_resolved, e.tier != Tier::individual);
        EXPECT_FALSE(e.sources.empty());
    }
    EXPECT_TRUE(r.fit.rank.full_rank);
    EXPECT_LT(r.fit.residual, 1e-8);
}

TEST(Learn, SpamDoesNotMoveExactFidelities) {
    auto clean = small_config(true);
    auto noisy = clean;
    noisy.spam.prep_flip.assign(4, 0.01);
    noisy.spam.readout_flip.assign(4, 0.02);
    auto a = learn_end_to_end(clean);
    auto b = learn_end_to_end(noisy);
    ASSERT_EQ(a.estimates.entries.size(), b.estimates.entries.size());
    for (size_t i = 0; i < a.estimates.entries.size(); i++) {
        EXPECT_NEAR(a.estimates.entries[i].value, b.estimates.entries[i].value, 1e-12);
    }
    for (size_t k = 0; k < a.fit.lambda.size(); k++) {
        EXPECT_NEAR(a.fit.lambda[k], b.fit.lambda[k], 1e-12);
    }
    for (size_t mi = 0; mi < a.fits.size(); mi++) {
        EXPECT_LT(b.fits[mi]->amplitude, a.fits[mi]->amplitude);
    }
}

TEST(Learn, FiniteShotRunsAreDeterministicAcrossThreadCounts) {
    auto cfg = small_config(false);
    auto one = learn_end_to_end(cfg);
    cfg.threads = 3;
    auto three = learn_end_to_end(cfg);
    ASSERT_EQ(one.series.size(), three.series.size());
    for (size_t i = 0; i < one.series.size(); i++) {
        ASSERT_EQ(one.series[i].estimates, three.series[i].estimates);
    }
    EXPECT_EQ(one.fit.lambda, three.fit.lambda);
    cfg.seed = 2;
    auto other = learn_end_to_end(cfg);
    EXPECT_NE(one.series[0].estimates, other.series[0].estimates);
}

TEST(Learn, FiniteShotEstimatesTrackPlantedModel) {
    auto cfg = small_config(false);
    cfg.shots = 10000;
    cfg.twirl_samples = 8;
    auto r = learn_end_to_end(cfg);
    int within = 0;
    for (const auto &e : r.estimates.entries) {
        double want = 0;
        for (const auto &s : e.sources) {
            want += std::sqrt(cfg.planted.fidelity(s.measured) * cfg.planted.fidelity(s.partner));
        }
        want /= double(e.sources.size());
        EXPECT_LT(std::abs(e.value - want), 0.01) << e.pauli.str();
        if (std::abs(e.value - want) <= 3 * std::sqrt(e.variance)) within++;
    }
    EXPECT_GE(within, int(0.9 * double(r.estimates.entries.size())));
}

TEST(Learn, RotationModeRunsEndToEnd) {
    auto cfg = small_config(true);
    cfg.mode = TwirlMode::rotation;
    auto r = learn_end_to_end(cfg);
    auto layer = cfg.topology.layer();
    CircuitSimulator sim(layer, cfg.planted, TwirlMode::rotation, {});
    for (const auto &e : r.estimates.entries) {
        EXPECT_GT(e.value, 0.0);
        EXPECT_LE(e.value, 1.0);
        if (e.tier == Tier::individual) {
            EXPECT_NEAR(e.value, sim.step_fidelity(e.pauli), 1e-12) << e.pauli.str();
        }
    }
    EXPECT_EQ(r.fit.pair_rank, 0u);
}

TEST(Learn, RankDeficientBenchmarksWarn) {
    auto cfg = small_config(true);
    auto terms = generate_terms(cfg.topology.model_spec());
    cfg.benchmarks.assign(terms.begin(), terms.begin() + 3);
    auto r = learn_end_to_end(cfg);
    EXPECT_FALSE(r.fit.rank.full_rank);
    EXPECT_EQ(r.fit.rank.null_witness.size(), terms.size());
    Eigen::Map<const Eigen::VectorXd> w(r.fit.rank.null_witness.data(), Eigen::Index(terms.size()));
    EXPECT_LT((r.design.m * w).norm(), 1e-9);
    EXPECT_TRUE(std::any_of(r.warnings.begin(), r.warnings.end(),
                            [](const std::string &s) { return s.find("rank deficient") != std::string::npos; }));
}

TEST(Learn, ConfigValidationNamesTheStage) {
    auto cfg = small_config(true);
    cfg.depths = {2, 3};
    try {
        learn_end_to_end(cfg);
        FAIL() << "odd depth accepted";
    } catch (const StageError &e) {
        EXPECT_EQ(e.stage(), "config");
    }
    cfg = small_config(true);
    cfg.spam.readout_flip = {0.1};
    EXPECT_THROW(learn_end_to_end(cfg), StageError);
    cfg = small_config(true);
    cfg.depths = {4, 2};
    EXPECT_THROW(learn_end_to_end(cfg), StageError);
}

TEST(Learn, StreamSeedsAreDistinct) {
    std::set<uint64_t> seen;
    for (uint64_t i = 0; i < 1000; i++) seen.insert(stream_seed(5, i));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_NE(stream_seed(5, 0), stream_seed(6, 0));
}
