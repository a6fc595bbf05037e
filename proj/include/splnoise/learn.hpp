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

#ifndef SPLNOISE_LEARN_HPP
#define SPLNOISE_LEARN_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "splnoise/basisselect.hpp"
#include "splnoise/layer.hpp"
#include "splnoise/model.hpp"
#include "splnoise/twirl.hpp"

namespace splnoise {

/// Error raised by a pipeline stage; `stage` names it for reporting.
class StageError : public std::runtime_error {
   public:
    StageError(std::string stage, const std::string &what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {
    }
    const std::string &stage() const {
        return stage_;
    }

   private:
    std::string stage_;
};

// ---------------------------------------------------------------------------
// Design matrix and rank
// ---------------------------------------------------------------------------

struct DesignMatrix {
    std::vector<PauliString> rows;  // benchmark Paulis B
    std::vector<PauliString> cols;  // model terms K
    Eigen::MatrixXd m;
};

inline DesignMatrix design_matrix(const std::vector<PauliString> &benchmarks, const std::vector<PauliString> &terms) {
    DesignMatrix d{benchmarks, terms, Eigen::MatrixXd::Zero(Eigen::Index(benchmarks.size()), Eigen::Index(terms.size()))};
    for (size_t i = 0; i < benchmarks.size(); i++) {
        for (size_t k = 0; k < terms.size(); k++) {
            d.m(Eigen::Index(i), Eigen::Index(k)) = sp_inner(benchmarks[i], terms[k]);
        }
    }
    return d;
}

struct RankReport {
    bool full_rank = true;
    size_t rank = 0;
    size_t columns = 0;
    /// Nonzero w with M w = 0 when the columns are dependent; largest |w_k| = 1.
    std::vector<double> null_witness;
};

namespace detail {

// Rank modulo a prime; a lower bound on the rank over the rationals.
inline size_t rank_mod_prime(const Eigen::MatrixXd &m) {
    constexpr int64_t p = 2147483647;
    size_t rows = size_t(m.rows()), cols = size_t(m.cols());
    std::vector<std::vector<int64_t>> a(rows, std::vector<int64_t>(cols));
    for (size_t i = 0; i < rows; i++) {
        for (size_t j = 0; j < cols; j++) {
            int64_t v = int64_t(std::llround(m(Eigen::Index(i), Eigen::Index(j))));
            a[i][j] = ((v % p) + p) % p;
        }
    }
    auto power = [](int64_t b, int64_t e) {
        int64_t r = 1;
        b %= p;
        while (e) {
            if (e & 1) r = r * b % p;
            b = b * b % p;
            e >>= 1;
        }
        return r;
    };
    size_t rank = 0;
    for (size_t c = 0; c < cols && rank < rows; c++) {
        size_t pivot = rank;
        while (pivot < rows && a[pivot][c] == 0) {
            pivot++;
        }
        if (pivot == rows) {
            continue;
        }
        std::swap(a[pivot], a[rank]);
        int64_t inv = power(a[rank][c], p - 2);
        for (size_t i = 0; i < rows; i++) {
            if (i == rank || a[i][c] == 0) {
                continue;
            }
            int64_t f = a[i][c] * inv % p;
            for (size_t j = c; j < cols; j++) {
                a[i][j] = ((a[i][j] - f * a[rank][j]) % p + p) % p;
            }
        }
        rank++;
    }
    return rank;
}

}  // namespace detail

/// Exact column-rank test; falls back to a pivoted LU over the reals for
/// the rank value and a null-space witness when the modular rank is short.
inline RankReport rank_check(const DesignMatrix &d) {
    RankReport r;
    r.columns = size_t(d.m.cols());
    r.rank = detail::rank_mod_prime(d.m);
    if (r.rank == r.columns) {
        r.full_rank = true;
        return r;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(d.m);
    r.rank = size_t(lu.rank());
    r.full_rank = r.rank == r.columns;
    if (!r.full_rank) {
        Eigen::MatrixXd kernel = lu.kernel();
        Eigen::VectorXd w = kernel.col(0);
        Eigen::Index arg = 0;
        w.cwiseAbs().maxCoeff(&arg);
        w /= w(arg);
        for (Eigen::Index i = 0; i < w.size(); i++) {
            if (std::abs(w(i)) > 1e-12) {
                if (w(i) < 0) {
                    w = -w;
                }
                break;
            }
        }
        r.null_witness.assign(w.data(), w.data() + w.size());
    }
    return r;
}

// ---------------------------------------------------------------------------
// Nonnegative least squares
// ---------------------------------------------------------------------------

struct NnlsResult {
    Eigen::VectorXd x;
    double objective = 0.0;  // 0.5 * ||A x - y||^2
    double kkt_residual = 0.0;  // relative to max |A^T y|
    int iterations = 0;
    std::vector<double> objective_history;
};

/// Lawson-Hanson active-set solver for min 0.5 ||A x - y||^2 subject to x >= 0.
inline NnlsResult nnls_solve(const Eigen::MatrixXd &a, const Eigen::VectorXd &y, int max_iterations = -1,
                             double tolerance = 1e-12) {
    const Eigen::Index n = a.cols();
    if (a.rows() != y.size()) {
        throw std::invalid_argument("nnls: dimension mismatch");
    }
    if (max_iterations < 0) {
        max_iterations = int(std::max<Eigen::Index>(30, 3 * n));
    }
    NnlsResult res;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(size_t(n), false);
    auto objective = [&](const Eigen::VectorXd &v) { return 0.5 * (a * v - y).squaredNorm(); };
    auto solve_passive = [&]() {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < n; j++) {
            if (passive[size_t(j)]) idx.push_back(j);
        }
        Eigen::MatrixXd sub(a.rows(), Eigen::Index(idx.size()));
        for (size_t c = 0; c < idx.size(); c++) {
            sub.col(Eigen::Index(c)) = a.col(idx[c]);
        }
        Eigen::VectorXd zs = sub.colPivHouseholderQr().solve(y);
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        for (size_t c = 0; c < idx.size(); c++) {
            z(idx[c]) = zs(Eigen::Index(c));
        }
        return z;
    };
    res.objective_history.push_back(objective(x));
    const double scale = std::max(1.0, (a.transpose() * y).cwiseAbs().maxCoeff());
    while (true) {
        Eigen::VectorXd w = a.transpose() * (y - a * x);
        Eigen::Index best = -1;
        for (Eigen::Index j = 0; j < n; j++) {
            if (!passive[size_t(j)] && w(j) > tolerance * scale && (best < 0 || w(j) > w(best))) {
                best = j;
            }
        }
        if (best < 0) {
            break;
        }
        if (res.iterations++ >= max_iterations) {
            throw StageError("nnls", "no convergence after " + std::to_string(max_iterations) + " iterations");
        }
        passive[size_t(best)] = true;
        Eigen::VectorXd z = solve_passive();
        while (true) {
            bool feasible = true;
            for (Eigen::Index j = 0; j < n; j++) {
                if (passive[size_t(j)] && z(j) <= 0.0) {
                    feasible = false;
                }
            }
            if (feasible) {
                break;
            }
            double alpha = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < n; j++) {
                if (passive[size_t(j)] && z(j) <= 0.0) {
                    alpha = std::min(alpha, x(j) / (x(j) - z(j)));
                }
            }
            x += alpha * (z - x);
            for (Eigen::Index j = 0; j < n; j++) {
                if (passive[size_t(j)] && x(j) <= 1e-15) {
                    passive[size_t(j)] = false;
                    x(j) = 0.0;
                }
            }
            z = solve_passive();
        }
        x = z;
        res.objective_history.push_back(objective(x));
    }
    Eigen::VectorXd w = a.transpose() * (y - a * x);
    double kkt = 0.0;
    for (Eigen::Index j = 0; j < n; j++) {
        kkt = std::max(kkt, x(j) > 0.0 ? std::abs(w(j)) : std::max(w(j), 0.0));
    }
    res.x = x;
    res.objective = objective(x);
    res.kkt_residual = kkt / scale;
    return res;
}

// ---------------------------------------------------------------------------
// Learning configuration and simulation
// ---------------------------------------------------------------------------

struct SpamSpec {
    std::vector<double> prep_flip;     // per qubit
    std::vector<double> readout_flip;  // per qubit

    double amplitude(const PauliString &m) const {
        double a = 1.0;
        for (size_t q : m.support()) {
            double pp = q < prep_flip.size() ? prep_flip[q] : 0.0;
            double pr = q < readout_flip.size() ? readout_flip[q] : 0.0;
            a *= (1.0 - 2.0 * pp) * (1.0 - 2.0 * pr);
        }
        return a;
    }
};

struct LearnConfig {
    Topology topology;
    NoiseModel planted;
    TwirlMode mode = TwirlMode::pauli;
    std::vector<int> depths = {2, 4, 8, 16};
    size_t shots = 10000;         // per circuit
    size_t twirl_samples = 16;    // circuits per basis and depth
    SpamSpec spam;
    uint64_t seed = 1;
    bool exact = false;
    /// Benchmark Paulis B; the model terms when empty.
    std::vector<PauliString> benchmarks;
    /// Worker threads for simulation; 0 picks the hardware concurrency.
    unsigned threads = 0;

    void validate() const {
        if (shots < 1) {
            throw StageError("config", "shots must be at least 1");
        }
        if (twirl_samples < 1) {
            throw StageError("config", "twirl_samples must be at least 1");
        }
        if (depths.size() < 2) {
            throw StageError("config", "at least two depths are required");
        }
        for (size_t i = 0; i < depths.size(); i++) {
            if (depths[i] <= 0 || depths[i] % 2 != 0) {
                throw StageError("config", "depth " + std::to_string(depths[i]) + " is not a positive even number");
            }
            if (i > 0 && depths[i] <= depths[i - 1]) {
                throw StageError("config", "depths must be strictly increasing");
            }
        }
        for (const auto *v : {&spam.prep_flip, &spam.readout_flip}) {
            if (!v->empty() && v->size() != topology.n) {
                throw StageError("config", "SPAM vectors need one entry per qubit");
            }
            for (double p : *v) {
                if (!(p >= 0.0 && p < 0.5)) {
                    throw StageError("config", "SPAM flip probabilities must lie in [0, 0.5)");
                }
            }
        }
        if (planted.num_qubits() != topology.n) {
            throw StageError("config", "planted model size does not match topology");
        }
        if (topology.n > 64) {
            throw StageError("config", "simulation supports at most 64 qubits");
        }
    }
};

/// Deterministic stream seed for circuit `index` of a run seeded with `seed`.
inline uint64_t stream_seed(uint64_t seed, uint64_t index) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace detail {

// Letter-level action of a Clifford on a Pauli frame of at most 64 qubits.
// Signs are dropped.
struct FrameMap {
    std::vector<uint64_t> xx, xz, zx, zz;  // images of X_q and Z_q as (x, z) words

    FrameMap() = default;

    /// Identity on n qubits.
    explicit FrameMap(size_t n) : xx(n), xz(n, 0), zx(n, 0), zz(n) {
        for (size_t q = 0; q < n; q++) {
            xx[q] = uint64_t{1} << q;
            zz[q] = uint64_t{1} << q;
        }
    }

    explicit FrameMap(const CliffordTableau &t) {
        for (size_t q = 0; q < t.num_qubits(); q++) {
            xx.push_back(t.x_image(q).pauli.x_words()[0]);
            xz.push_back(t.x_image(q).pauli.z_words()[0]);
            zx.push_back(t.z_image(q).pauli.x_words()[0]);
            zz.push_back(t.z_image(q).pauli.z_words()[0]);
        }
    }

    void apply(uint64_t &x, uint64_t &z) const {
        uint64_t nx = 0, nz = 0;
        for (uint64_t b = x; b; b &= b - 1) {
            int q = std::countr_zero(b);
            nx ^= xx[size_t(q)];
            nz ^= xz[size_t(q)];
        }
        for (uint64_t b = z; b; b &= b - 1) {
            int q = std::countr_zero(b);
            nx ^= zx[size_t(q)];
            nz ^= zz[size_t(q)];
        }
        x = nx;
        z = nz;
    }

    /// Replaces this map by `outer` applied after it.
    void then(const FrameMap &outer) {
        for (size_t q = 0; q < xx.size(); q++) {
            outer.apply(xx[q], xz[q]);
            outer.apply(zx[q], zz[q]);
        }
    }
};

struct Step {
    FrameMap before;  // rotations ahead of the noise
    FrameMap after;   // layer and trailing rotations
};

inline uint64_t word(const PauliString &p, bool x) {
    return x ? p.x_words()[0] : p.z_words()[0];
}

}  // namespace detail

/// Runs learning circuits for one basis. Exact mode evaluates expectations
/// analytically; otherwise shots are sampled as Pauli-frame trajectories.
class CircuitSimulator {
   public:
    // Holds references; temporaries would dangle.
    CircuitSimulator(Layer &&, const NoiseModel &, TwirlMode, SpamSpec) = delete;
    CircuitSimulator(const Layer &, NoiseModel &&, TwirlMode, SpamSpec) = delete;
    CircuitSimulator(const Layer &layer, const NoiseModel &model, TwirlMode mode, SpamSpec spam)
        : layer_(&layer), model_(&model), mode_(mode), spam_(std::move(spam)) {
        if (layer.num_qubits() != model.num_qubits()) {
            throw std::invalid_argument("simulator: layer and model sizes differ");
        }
        for (const auto &t : model.terms()) {
            term_x_.push_back(detail::word(t, true));
            term_z_.push_back(detail::word(t, false));
        }
        total_rate_ = model.total_rate();
        build_alias(model.rates());
        size_t n = layer.num_qubits();
        layer_map_ = detail::FrameMap(layer.tableau());
        for (size_t q = 0; q < n; q++) {
            for (char l : {'X', 'Y', 'Z'}) {
                for (int quarters : {2, -2, 4}) {
                    rotation_maps_.emplace_back(rotation_tableau(Rotation{q, l, Angle{quarters}}, n));
                }
            }
        }
        if (mode == TwirlMode::rotation) {
            for (const auto &e : layer.elements()) {
                std::vector<TwirlGates> gates;
                for (const auto &el : e.twirls().elements()) {
                    auto g = twirl_gates(e.local, el, Angle::half_pi());
                    for (auto &r : g.pre) r.qubit = e.qubits[r.qubit];
                    for (auto &r : g.post) r.qubit = e.qubits[r.qubit];
                    gates.push_back(std::move(g));
                }
                twirl_options_.push_back(std::move(gates));
            }
        }
    }

    /// Per-step fidelity seen by Pauli p (twirl-averaged in rotation mode).
    double step_fidelity(const PauliString &p) const {
        return mode_ == TwirlMode::rotation ? twirled_fidelity(*layer_, *model_, p) : model_->fidelity(p);
    }

    /// Exact expectation A (f_m f_partner)^(depth/2) for each sub-pattern.
    std::vector<double> exact(const LayerCorrection &corr, const std::vector<PauliString> &subpatterns,
                              int depth) const {
        check_depth(depth);
        std::vector<double> out;
        for (const auto &m : subpatterns) {
            auto partner = partner_of(*layer_, corr, m);
            double pair = step_fidelity(m) * step_fidelity(partner);
            out.push_back(spam_.amplitude(m) * std::pow(pair, depth / 2));
        }
        return out;
    }

    /// Sums of +-1 outcomes for each sub-pattern over `shots` trajectories
    /// of one circuit (one twirl draw). A sampled error flips a sub-pattern
    /// when it anticommutes with that sub-pattern's Pauli at the same point
    /// of the trajectory.
    std::vector<int64_t> sample(const LayerCorrection &corr, const std::vector<PauliString> &subpatterns, int depth,
                                size_t shots, uint64_t stream) const {
        check_depth(depth);
        std::mt19937_64 rng(stream);
        auto steps = build_steps(corr, depth, rng);
        size_t n = layer_->num_qubits();
        uint64_t bx = detail::word(corr.basis, true), bz = detail::word(corr.basis, false);
        std::vector<uint64_t> masks;
        for (const auto &m : subpatterns) {
            masks.push_back(m.support_mask()[0]);
        }
        // flip_table[s * K + k]: per-qubit outcome flips caused by term k
        // firing at step s, found by carrying the term to the end.
        const size_t num_terms = term_x_.size();
        const size_t num_steps = steps.size();
        std::vector<uint64_t> flip_table(num_steps * num_terms);
        detail::FrameMap tail(n);
        for (size_t s = num_steps; s-- > 0;) {
            detail::FrameMap to_end = steps[s].after;
            to_end.then(tail);
            for (size_t k = 0; k < num_terms; k++) {
                uint64_t fx = term_x_[k], fz = term_z_[k];
                to_end.apply(fx, fz);
                flip_table[s * num_terms + k] = (fx & bz) ^ (fz & bx);
            }
            tail = steps[s].before;
            tail.then(to_end);
        }
        // Errors over the whole circuit form one Poisson process; each event
        // lands on a uniform step and a rate-weighted term.
        const double circuit_rate = total_rate_ * double(num_steps);
        std::vector<double> count_cdf;
        if (circuit_rate > 0) {
            double pk = std::exp(-circuit_rate), acc = pk;
            count_cdf.push_back(acc);
            for (int k = 1; double(k) <= circuit_rate || pk > 1e-17; k++) {
                pk *= circuit_rate / k;
                acc += pk;
                count_cdf.push_back(acc);
            }
        }
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::poisson_distribution<int> tail_events(circuit_rate > 0 ? circuit_rate : 1.0);
        auto draw_count = [&]() {
            double u = unif(rng);
            auto it = std::upper_bound(count_cdf.begin(), count_cdf.end(), u);
            return it == count_cdf.end() ? tail_events(rng) : int(it - count_cdf.begin());
        };
        std::vector<int64_t> sums(subpatterns.size(), 0);
        for (size_t shot = 0; shot < shots; shot++) {
            uint64_t flips = 0;
            for (size_t q = 0; q < n; q++) {
                if (q < spam_.prep_flip.size() && spam_.prep_flip[q] > 0 && unif(rng) < spam_.prep_flip[q]) {
                    flips ^= uint64_t{1} << q;
                }
            }
            if (circuit_rate > 0) {
                for (int c = draw_count(); c > 0; c--) {
                    // Low half picks the step, high half drives the alias draw.
                    uint64_t r = rng();
                    uint64_t st = ((r & 0xffffffffULL) * num_steps) >> 32;
                    uint64_t scaled = (r >> 32) * num_terms;
                    uint64_t cell = scaled >> 32;
                    uint32_t frac = uint32_t(scaled);
                    size_t k = frac < alias_threshold_[cell] ? size_t(cell) : alias_[cell];
                    flips ^= flip_table[st * num_terms + k];
                }
            }
            for (size_t q = 0; q < n; q++) {
                if (q < spam_.readout_flip.size() && spam_.readout_flip[q] > 0 && unif(rng) < spam_.readout_flip[q]) {
                    flips ^= uint64_t{1} << q;
                }
            }
            for (size_t i = 0; i < masks.size(); i++) {
                sums[i] += (std::popcount(flips & masks[i]) & 1) ? -1 : 1;
            }
        }
        return sums;
    }

   private:
    static void check_depth(int depth) {
        if (depth <= 0 || depth % 2 != 0) {
            throw StageError("simulate", "depth " + std::to_string(depth) + " must be positive and even");
        }
    }

    // Vose alias table over the term rates with 32-bit acceptance thresholds.
    void build_alias(const std::vector<double> &rates) {
        const size_t k = rates.size();
        alias_threshold_.assign(k, 0);
        alias_.assign(k, 0);
        if (k == 0 || total_rate_ <= 0) {
            return;
        }
        std::vector<double> scaled(k);
        std::vector<size_t> small, large;
        for (size_t i = 0; i < k; i++) {
            scaled[i] = rates[i] * double(k) / total_rate_;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            size_t s = small.back(), l = large.back();
            small.pop_back();
            alias_threshold_[s] = uint64_t(std::ldexp(scaled[s], 32));
            alias_[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (size_t i : small) alias_threshold_[i] = uint64_t{1} << 32;
        for (size_t i : large) alias_threshold_[i] = uint64_t{1} << 32;
        for (size_t i = 0; i < k; i++) {
            if (alias_threshold_[i] == uint64_t{1} << 32) alias_[i] = i;
        }
    }

    const detail::FrameMap &rotation_map(const Rotation &r) const {
        int l = r.letter == 'X' ? 0 : r.letter == 'Y' ? 1 : 2;
        int a = r.theta.pi_quarters == 2 ? 0 : r.theta.pi_quarters == -2 ? 1 : 2;
        if (r.theta.pi_quarters % 2 != 0) {
            throw std::invalid_argument("simulator: rotation " + r.str() + " is not Clifford");
        }
        return rotation_maps_[(r.qubit * 3 + size_t(l)) * 3 + size_t(a)];
    }

    // Each step: [pre correction] [twirl pre] noise layer [twirl post] [post correction],
    // with corrections only on even steps.
    std::vector<detail::Step> build_steps(const LayerCorrection &corr, int depth, std::mt19937_64 &rng) const {
        size_t n = layer_->num_qubits();
        std::vector<detail::Step> steps;
        for (int k = 1; k <= depth; k++) {
            detail::Step st{detail::FrameMap(n), layer_map_};
            bool even = k % 2 == 0;
            if (even) {
                for (const auto &r : corr.pre) st.before.then(rotation_map(r));
            }
            std::vector<const Rotation *> after;
            if (mode_ == TwirlMode::rotation) {
                for (const auto &opts : twirl_options_) {
                    const auto &g = opts[std::uniform_int_distribution<size_t>(0, opts.size() - 1)(rng)];
                    for (const auto &r : g.pre) st.before.then(rotation_map(r));
                    for (const auto &r : g.post) after.push_back(&r);
                }
            }
            if (even) {
                for (const auto &r : corr.post) after.push_back(&r);
            }
            for (const auto *r : after) st.after.then(rotation_map(*r));
            steps.push_back(std::move(st));
        }
        return steps;
    }

    const Layer *layer_;
    const NoiseModel *model_;
    TwirlMode mode_;
    SpamSpec spam_;
    std::vector<uint64_t> term_x_, term_z_;
    std::vector<uint64_t> alias_threshold_;
    std::vector<size_t> alias_;
    double total_rate_ = 0.0;
    detail::FrameMap layer_map_;
    std::vector<detail::FrameMap> rotation_maps_;
    std::vector<std::vector<TwirlGates>> twirl_options_;
};

// ---------------------------------------------------------------------------
// Decay fitting
// ---------------------------------------------------------------------------

/// Expectation estimates of one measured sub-pattern across depths.
/// shots[i] == 0 marks an exact (noise-free) value.
struct DecaySeries {
    size_t measurement = 0;
    std::vector<int> depths;
    std::vector<double> estimates;
    std::vector<size_t> shots;
};

struct DecayFit {
    double pair_fidelity = 1.0;
    double amplitude = 1.0;
    double variance = 0.0;  // of pair_fidelity
    size_t depths_used = 0;
    bool clamped = false;
    std::vector<std::string> warnings;
};

namespace detail {

/// Gauss-Newton refinement of E = exp(a + x b) on the linear scale, with
/// binomial weights taken from the current model instead of the estimates.
/// Leaves the inputs untouched if an iteration becomes degenerate.
inline void refine_decay(const DecaySeries &s, double &a, double &b, double &var_b) {
    double ca = a, cb = b, cv = var_b;
    for (int it = 0; it < 100; it++) {
        double h00 = 0, h01 = 0, h11 = 0, g0 = 0, g1 = 0;
        for (size_t i = 0; i < s.depths.size(); i++) {
            double x = s.depths[i] / 2.0;
            double mu = std::exp(ca + x * cb);
            double n = double(s.shots[i]);
            double w = n / std::max(1.0 - mu * mu, 1.0 / n);
            double r = s.estimates[i] - mu;
            h00 += w * mu * mu;
            h01 += w * mu * mu * x;
            h11 += w * mu * mu * x * x;
            g0 += w * mu * r;
            g1 += w * mu * x * r;
        }
        double det = h00 * h11 - h01 * h01;
        if (!(det > 0.0) || !std::isfinite(det)) {
            return;
        }
        double da = (h11 * g0 - h01 * g1) / det;
        double db = (h00 * g1 - h01 * g0) / det;
        if (!std::isfinite(da) || !std::isfinite(db) || std::abs(da) > 5.0 || std::abs(db) > 5.0) {
            return;
        }
        ca += da;
        cb += db;
        cv = h00 / det;
        if (std::abs(da) + std::abs(db) < 1e-12) {
            break;
        }
    }
    a = ca;
    b = cb;
    var_b = cv;
}

}  // namespace detail

/// Weighted least squares of log E = log A + (depth/2) log F over the
/// positive estimates. Finite-shot series are then refined on the linear
/// scale using every estimate, and the variance comes from that refinement.
inline DecayFit fit_decay(const DecaySeries &s) {
    if (s.depths.size() != s.estimates.size() || s.depths.size() != s.shots.size()) {
        throw StageError("fit", "decay series has inconsistent lengths");
    }
    DecayFit fit;
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    std::vector<int> used;
    for (size_t i = 0; i < s.depths.size(); i++) {
        double e = s.estimates[i];
        if (!(e > 0.0)) {
            fit.warnings.push_back("dropped non-positive estimate at depth " + std::to_string(s.depths[i]));
            continue;
        }
        double w = 1.0;
        if (s.shots[i] > 0) {
            double n = double(s.shots[i]);
            double var_e = std::max(1.0 - e * e, 1.0 / n) / n;
            w = e * e / var_e;
        }
        double x = s.depths[i] / 2.0, y = std::log(e);
        sw += w;
        swx += w * x;
        swy += w * y;
        swxx += w * x * x;
        swxy += w * x * y;
        if (std::find(used.begin(), used.end(), s.depths[i]) == used.end()) {
            used.push_back(s.depths[i]);
        }
    }
    if (used.size() < 2) {
        throw StageError("fit", "fewer than two depths with positive estimates for measurement " +
                                    std::to_string(s.measurement));
    }
    double det = sw * swxx - swx * swx;
    double slope = (sw * swxy - swx * swy) / det;
    double intercept = (swy - slope * swx) / sw;
    fit.depths_used = used.size();
    bool exact = std::all_of(s.shots.begin(), s.shots.end(), [](size_t n) { return n == 0; });
    double var_slope = exact ? 0.0 : sw / det;
    if (!exact) {
        detail::refine_decay(s, intercept, slope, var_slope);
    }
    fit.pair_fidelity = std::exp(slope);
    fit.amplitude = std::exp(intercept);
    if (fit.pair_fidelity > 1.0) {
        fit.pair_fidelity = 1.0;
        fit.clamped = true;
    }
    fit.variance = fit.pair_fidelity * fit.pair_fidelity * var_slope;
    return fit;
}

// ---------------------------------------------------------------------------
// Symmetry resolution
// ---------------------------------------------------------------------------

/// Provenance of one estimate contributing to a resolved fidelity.
struct EstimateSource {
    size_t basis = 0;
    size_t measurement = 0;
    PauliString measured;
    PauliString partner;
};

/// Resolution tiers, best first.
enum class Tier { individual = 1, original_pair = 2, other_pair = 3 };

struct FidelityEstimate {
    PauliString pauli;
    double value = 1.0;
    double variance = 0.0;
    Tier tier = Tier::individual;
    bool symmetry_resolved = false;
    bool averaged_group = false;
    bool strong_assumption = false;
    std::vector<EstimateSource> sources;
};

struct FidelityEstimates {
    std::vector<FidelityEstimate> entries;
    std::vector<std::string> warnings;

    std::vector<double> values() const {
        std::vector<double> v;
        for (const auto &e : entries) {
            v.push_back(e.value);
        }
        return v;
    }
};

/// Individual estimates from pair fits. Each target takes the best tier
/// available: individually measured, then its original pair split by
/// symmetry, then any other pair (flagged as a strong assumption). Estimates
/// within the tier are combined by inverse-variance weights (equal weights
/// for exact data).
inline FidelityEstimates resolve_fidelities(const Layer &layer, const MeasurementPlan &plan,
                                            const std::vector<std::optional<DecayFit>> &fits,
                                            const std::vector<PauliString> &targets, TwirlMode mode) {
    FidelityEstimates out;
    std::optional<LayerAveraging> avg;
    if (mode == TwirlMode::rotation) {
        avg.emplace(layer);
    }
    auto same = [&](const PauliString &a, const PauliString &b) { return avg ? avg->equivalent(a, b) : a == b; };
    for (size_t t = 0; t < targets.size(); t++) {
        struct Candidate {
            Tier tier;
            double value, variance;
            EstimateSource src;
        };
        std::vector<Candidate> cands;
        for (const auto &link : plan.links[t]) {
            const auto &meas = plan.measurements[link.measurement];
            const auto &fit = fits[link.measurement];
            if (!fit) {
                continue;
            }
            const auto &pair = meas.pair;
            Tier tier = Tier::other_pair;
            if (same(pair.first, pair.second)) {
                tier = Tier::individual;
            } else if (same(pair.second, layer.conjugate(pair.first).pauli)) {
                tier = Tier::original_pair;
            }
            double f = std::sqrt(fit->pair_fidelity);
            double var = f > 0 ? fit->variance / (4.0 * fit->pair_fidelity) : 0.0;
            cands.push_back(Candidate{tier, f, var, EstimateSource{meas.basis, link.measurement, pair.first, pair.second}});
        }
        if (cands.empty()) {
            throw StageError("resolve", "no usable estimate for " + targets[t].str());
        }
        Tier best = cands.front().tier;
        for (const auto &c : cands) {
            best = std::min(best, c.tier);
        }
        FidelityEstimate e;
        e.pauli = targets[t];
        e.tier = best;
        e.symmetry_resolved = best != Tier::individual;
        e.strong_assumption = best == Tier::other_pair;
        if (avg) {
            for (size_t ei : layer.touching(targets[t])) {
                const auto &el = layer.elements()[ei];
                auto part = el.averaging();
                if (part.groups[size_t(part.group_of(targets[t].extract(el.qubits)))].size() > 1) {
                    e.averaged_group = true;
                }
            }
        }
        bool any_zero = false;
        for (const auto &c : cands) {
            if (c.tier == best && c.variance <= 0.0) any_zero = true;
        }
        double sw = 0, swv = 0;
        for (const auto &c : cands) {
            if (c.tier != best) {
                continue;
            }
            if (any_zero && c.variance > 0.0) {
                continue;
            }
            double w = any_zero ? 1.0 : 1.0 / c.variance;
            sw += w;
            swv += w * c.value;
            e.sources.push_back(c.src);
        }
        e.value = swv / sw;
        e.variance = any_zero ? 0.0 : 1.0 / sw;
        out.entries.push_back(std::move(e));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model fit
// ---------------------------------------------------------------------------

struct FitResult {
    std::vector<PauliString> terms;
    std::vector<double> lambda;
    /// Residual against the rows the fit targets: the measured pairs when
    /// present, otherwise the resolved fidelities.
    double residual = 0.0;
    double resolved_residual = 0.0;  // ||M lambda + log(f)/2||
    /// Rank of the pair rows; 0 when the fit used the resolved fidelities only.
    size_t pair_rank = 0;
    double kkt_residual = 0.0;
    int iterations = 0;
    std::vector<double> objective_history;
    RankReport rank;
    /// |fidelity(fit, b) - f_b| per benchmark.
    std::vector<double> reconstruction_error;
    /// |F_fit - F| per measured pair.
    std::vector<double> pair_reconstruction_error;
};

/// Fits lambda >= 0 to the resolved fidelities.
inline FitResult nnls(const DesignMatrix &d, const FidelityEstimates &f) {
    if (size_t(d.m.rows()) != f.entries.size()) {
        throw StageError("nnls", "design matrix rows do not match the estimates");
    }
    Eigen::VectorXd y(d.m.rows());
    for (size_t i = 0; i < f.entries.size(); i++) {
        double v = f.entries[i].value;
        if (!(v > 0.0)) {
            throw StageError("nnls", "non-positive fidelity estimate for " + f.entries[i].pauli.str());
        }
        y(Eigen::Index(i)) = -0.5 * std::log(v);
    }
    auto sol = nnls_solve(d.m, y);
    FitResult r;
    r.terms = d.cols;
    r.lambda.assign(sol.x.data(), sol.x.data() + sol.x.size());
    r.residual = (d.m * sol.x - y).norm();
    r.resolved_residual = r.residual;
    r.kkt_residual = sol.kkt_residual;
    r.iterations = sol.iterations;
    r.objective_history = sol.objective_history;
    r.rank = rank_check(d);
    Eigen::VectorXd fitted = d.m * sol.x;
    for (size_t i = 0; i < f.entries.size(); i++) {
        r.reconstruction_error.push_back(std::abs(std::exp(-2.0 * fitted(Eigen::Index(i))) - f.entries[i].value));
    }
    return r;
}

/// Measured pair products as linear constraints on lambda: row i holds the
/// anticommutation indicators of both members of measurement i, and
/// rhs(i) = -log(F_i) / 2. Only measurements with a positive fit appear.
struct PairSystem {
    std::vector<size_t> measurements;
    Eigen::MatrixXd rows;
    Eigen::VectorXd rhs;
    Eigen::VectorXd weight;  // 1 / sd(log F), or 1 for exact data
};

inline PairSystem pair_system(const MeasurementPlan &plan, const std::vector<std::optional<DecayFit>> &fits,
                              const std::vector<PauliString> &terms) {
    PairSystem ps;
    std::vector<size_t> keep;
    for (size_t i = 0; i < plan.measurements.size(); i++) {
        if (fits.at(i) && fits[i]->pair_fidelity > 0.0) {
            keep.push_back(i);
        }
    }
    const auto rows = Eigen::Index(keep.size()), cols = Eigen::Index(terms.size());
    ps.rows = Eigen::MatrixXd::Zero(rows, cols);
    ps.rhs.resize(rows);
    ps.weight.resize(rows);
    for (Eigen::Index r = 0; r < rows; r++) {
        const auto &pair = plan.measurements[keep[size_t(r)]].pair;
        const auto &fit = *fits[keep[size_t(r)]];
        for (Eigen::Index k = 0; k < cols; k++) {
            ps.rows(r, k) = double(sp_inner(pair.first, terms[size_t(k)])) + double(sp_inner(pair.second, terms[size_t(k)]));
        }
        ps.rhs(r) = -0.5 * std::log(fit.pair_fidelity);
        ps.weight(r) = fit.variance > 0.0 ? fit.pair_fidelity / std::sqrt(fit.variance) : 1.0;
    }
    ps.measurements = std::move(keep);
    return ps;
}

/// Relative weight of the pair rows against the symmetry-resolved rows.
inline constexpr double kPairPriority = 1e5;

/// Fits lambda >= 0 to the measured pair products first and uses the
/// symmetry-resolved fidelities only for directions the pairs leave open.
/// Both row blocks go into one NNLS with the pair block scaled by
/// kPairPriority, so the pair residual is minimized to within ~1/kPairPriority^2
/// of its optimum.
inline FitResult fit_model(const DesignMatrix &d, const FidelityEstimates &f, const PairSystem &pairs) {
    if (size_t(d.m.rows()) != f.entries.size()) {
        throw StageError("nnls", "design matrix rows do not match the estimates");
    }
    if (pairs.rows.cols() != d.m.cols()) {
        throw StageError("nnls", "pair system and design matrix disagree on the term count");
    }
    Eigen::VectorXd y(d.m.rows());
    for (size_t i = 0; i < f.entries.size(); i++) {
        double v = f.entries[i].value;
        if (!(v > 0.0)) {
            throw StageError("nnls", "non-positive fidelity estimate for " + f.entries[i].pauli.str());
        }
        y(Eigen::Index(i)) = -0.5 * std::log(v);
    }
    const Eigen::Index np = pairs.rows.rows(), nb = d.m.rows();
    Eigen::VectorXd w = pairs.weight;
    if (np > 0) {
        w *= kPairPriority / w.maxCoeff();
    }
    Eigen::MatrixXd a(np + nb, d.m.cols());
    Eigen::VectorXd b(np + nb);
    a.topRows(np) = w.asDiagonal() * pairs.rows;
    b.head(np) = w.cwiseProduct(pairs.rhs);
    a.bottomRows(nb) = d.m;
    b.tail(nb) = y;
    auto sol = nnls_solve(a, b);

    FitResult r;
    r.terms = d.cols;
    r.lambda.assign(sol.x.data(), sol.x.data() + sol.x.size());
    r.resolved_residual = (d.m * sol.x - y).norm();
    r.residual = np > 0 ? (pairs.rows * sol.x - pairs.rhs).norm() : r.resolved_residual;
    r.kkt_residual = sol.kkt_residual;
    r.iterations = sol.iterations;
    r.objective_history = sol.objective_history;
    r.rank = rank_check(d);
    r.pair_rank = np > 0 ? size_t(Eigen::FullPivLU<Eigen::MatrixXd>(pairs.rows).rank()) : 0;
    Eigen::VectorXd fitted = d.m * sol.x;
    for (size_t i = 0; i < f.entries.size(); i++) {
        r.reconstruction_error.push_back(std::abs(std::exp(-2.0 * fitted(Eigen::Index(i))) - f.entries[i].value));
    }
    Eigen::VectorXd pf = pairs.rows * sol.x;
    for (Eigen::Index i = 0; i < np; i++) {
        r.pair_reconstruction_error.push_back(std::abs(std::exp(-2.0 * pf(i)) - std::exp(-2.0 * pairs.rhs(i))));
    }
    return r;
}

// ---------------------------------------------------------------------------
// End to end
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(size_t count, unsigned threads, Fn &&fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = unsigned(std::min<size_t>(threads, count));
    if (threads <= 1) {
        for (size_t i = 0; i < count; i++) {
            fn(i);
        }
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (unsigned t = 0; t < threads; t++) {
        pool.emplace_back([&] {
            for (size_t i = next++; i < count && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

struct LearnResult {
    SelectionTrace selection;
    MeasurementPlan plan;
    std::vector<DecaySeries> series;
    std::vector<std::optional<DecayFit>> fits;
    FidelityEstimates estimates;
    DesignMatrix design;
    PairSystem pairs;
    FitResult fit;
    std::vector<std::string> warnings;
};

inline LearnResult learn_end_to_end(const LearnConfig &cfg) {
    cfg.validate();
    LearnResult res;
    Layer layer = cfg.topology.layer();
    auto terms = generate_terms(cfg.topology.model_spec());
    auto targets = cfg.benchmarks.empty() ? terms : cfg.benchmarks;

    res.selection = select_bases(cfg.topology, cfg.mode);
    const auto &bases = res.selection.bases.bases;
    auto coverage = verify_coverage(bases, targets, layer, cfg.mode);
    if (!coverage.ok) {
        throw StageError("coverage", std::to_string(coverage.uncovered.size()) + " benchmark(s) uncovered, first " +
                                         coverage.uncovered.front().str());
    }
    res.plan = plan_measurements(layer, bases, targets, cfg.mode);

    // Sub-patterns per basis.
    std::vector<std::vector<size_t>> by_basis(bases.size());
    for (size_t mi = 0; mi < res.plan.measurements.size(); mi++) {
        by_basis[res.plan.measurements[mi].basis].push_back(mi);
    }
    CircuitSimulator sim(layer, cfg.planted, cfg.mode, cfg.spam);
    const size_t nd = cfg.depths.size();
    // One circuit per twirl sample and depth, each run for cfg.shots shots.
    const size_t instances = cfg.exact ? 1 : cfg.twirl_samples;
    res.series.resize(res.plan.measurements.size());
    for (size_t mi = 0; mi < res.series.size(); mi++) {
        res.series[mi].measurement = mi;
        res.series[mi].depths = cfg.depths;
        res.series[mi].estimates.assign(nd, 0.0);
        res.series[mi].shots.assign(nd, cfg.exact ? 0 : cfg.shots * instances);
    }
    // One task per (basis, depth, instance); partial sums land in fixed slots.
    const size_t tasks = bases.size() * nd * instances;
    std::vector<std::vector<int64_t>> partial(tasks);
    std::vector<std::vector<double>> exact_values(bases.size() * nd);
    parallel_for(tasks, cfg.threads, [&](size_t task) {
        size_t di = (task / instances) % nd;
        size_t bi = task / (instances * nd);
        std::vector<PauliString> subs;
        for (size_t mi : by_basis[bi]) {
            subs.push_back(res.plan.measurements[mi].pair.first);
        }
        if (cfg.exact) {
            exact_values[bi * nd + di] = sim.exact(res.plan.corrections[bi], subs, cfg.depths[di]);
            return;
        }
        partial[task] = sim.sample(res.plan.corrections[bi], subs, cfg.depths[di], cfg.shots,
                                   stream_seed(cfg.seed, task));
    });
    for (size_t bi = 0; bi < bases.size(); bi++) {
        for (size_t di = 0; di < nd; di++) {
            for (size_t j = 0; j < by_basis[bi].size(); j++) {
                size_t mi = by_basis[bi][j];
                if (cfg.exact) {
                    res.series[mi].estimates[di] = exact_values[bi * nd + di][j];
                } else {
                    int64_t total = 0;
                    for (size_t inst = 0; inst < instances; inst++) {
                        total += partial[(bi * nd + di) * instances + inst][j];
                    }
                    res.series[mi].estimates[di] = double(total) / double(cfg.shots * instances);
                }
            }
        }
    }
    res.fits.resize(res.series.size());
    for (size_t mi = 0; mi < res.series.size(); mi++) {
        try {
            res.fits[mi] = fit_decay(res.series[mi]);
            for (const auto &w : res.fits[mi]->warnings) {
                res.warnings.push_back(res.plan.measurements[mi].pair.first.str() + ": " + w);
            }
        } catch (const StageError &e) {
            res.warnings.push_back(e.what());
        }
    }
    res.estimates = resolve_fidelities(layer, res.plan, res.fits, targets, cfg.mode);
    res.design = design_matrix(targets, terms);
    // Rotation-mode pairs involve twirl-averaged fidelities, which are not
    // log-linear in lambda, so only the resolved fidelities enter that fit.
    if (cfg.mode == TwirlMode::pauli) {
        res.pairs = pair_system(res.plan, res.fits, terms);
        res.fit = fit_model(res.design, res.estimates, res.pairs);
    } else {
        res.fit = nnls(res.design, res.estimates);
    }
    if (!res.fit.rank.full_rank) {
        res.warnings.push_back("design matrix is rank deficient (rank " + std::to_string(res.fit.rank.rank) + " of " +
                               std::to_string(res.fit.rank.columns) + ")");
    }
    return res;
}

}  // namespace splnoise

#endif  // SPLNOISE_LEARN_HPP
