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

#include <map>

#include "dense_oracle.hpp"
#include "generators.hpp"
#include "splnoise/twirl.hpp"
#include "twirl_oracle.hpp"

using namespace splnoise;
using namespace twirl_oracle;

namespace {

PauliString P(const std::string &s) {
    return PauliString::from_text(s);
}

}  // namespace

TEST(Twirl, GateDecompositionsMatchRotations) {
    for (char letter : {'X', 'Y', 'Z'}) {
        for (int q : {1, 2, 4, -1, -2, -4}) {
            Angle a{q};
            auto spec = decompose_rotation(letter, a);
            oracle::Mat m = oracle::Mat::Identity(2, 2);
            for (const auto &g : spec.gate_seq) m = m * oracle::gate1(g);
            ASSERT_TRUE(oracle::equal_up_to_phase(m, oracle::rotation(std::string(1, letter), a.radians())))
                << letter << " " << a.str();
        }
    }
    EXPECT_EQ(decompose_rotation('Z', Angle::quarter_pi()).gate_seq, (std::vector<std::string>{"t"}));
    EXPECT_EQ(decompose_rotation('X', Angle::half_pi()).gate_seq, (std::vector<std::string>{"sx"}));
    EXPECT_THROW(decompose_rotation('Z', Angle{3}), std::invalid_argument);
    EXPECT_THROW(decompose_rotation('Q', Angle::pi()), std::invalid_argument);
}

TEST(Twirl, RotationTableauMatchesDense) {
    for (char letter : {'X', 'Y', 'Z'}) {
        for (int q : {2, -2, 4}) {
            Rotation r{1, letter, Angle{q}};
            auto t = rotation_tableau(r, 2);
            oracle::Mat u = dense_rotation(r, 2);
            for (const auto &label : oracle::all_labels(2)) {
                auto img = t.conjugate(P(label));
                oracle::Mat expect = u * oracle::pauli(label) * u.adjoint();
                oracle::Mat got = double(img.sign()) * oracle::pauli(img.pauli.str());
                ASSERT_LT((expect - got).cwiseAbs().maxCoeff(), 1e-12) << r.str() << " on " << label;
            }
        }
    }
    EXPECT_THROW(rotation_tableau(Rotation{0, 'Z', Angle::quarter_pi()}, 1), std::invalid_argument);
}

TEST(Twirl, TwirlGatesUndoThemselvesExactly) {
    for (const auto &[name, op] : representatives()) {
        auto cls = classify_two_qubit(op);
        for (const auto &el : feasible_rotation_twirls(cls).elements()) {
            auto g = twirl_gates(op, el, Angle::half_pi());
            auto whole = compose(rotations_tableau(g.post, 2), compose(op, rotations_tableau(g.pre, 2)));
            ASSERT_EQ(whole, op) << name << " element " << el.str();
        }
    }
    EXPECT_THROW(twirl_gates(local_gate("cz"), P("XI"), Angle::half_pi()), std::invalid_argument);
}

TEST(Twirl, FeasibleSetsStaySingleQubit) {
    for (const auto &[name, op] : representatives()) {
        auto cls = classify_two_qubit(op);
        auto tw = feasible_rotation_twirls(cls);
        EXPECT_EQ(tw.size(), cls.class_id <= 2 ? 9u : 4u) << name;
        for (const auto &el : tw.elements()) {
            for (size_t q : el.support()) {
                auto img = op.conjugate(PauliString::single(2, q, el.letter(q)));
                EXPECT_EQ(img.pauli.weight(), 1u) << name << " " << el.str();
            }
        }
    }
}

TEST(Twirl, DenseTwirlMatchesAveragingPartition) {
    gen::Rng rng(99);
    for (const auto &[name, op] : representatives()) {
        SCOPED_TRACE(name);
        auto cls = classify_two_qubit(op);
        auto tw = feasible_rotation_twirls(cls);
        auto part = averaging_partition(cls, tw);
        part.validate(2);
        oracle::Mat u = dense_of_tableau(op);
        for (int trial = 0; trial < 3; trial++) {
            auto [noise, dense] = random_pauli_channel(rng);
            std::vector<oracle::Mat> pres, posts;
            for (const auto &el : tw.elements()) {
                auto g = twirl_gates(op, el, Angle::half_pi());
                pres.push_back(dense_rotations(g.pre, 2));
                posts.push_back(dense_rotations(g.post, 2));
            }
            // Average of post * U * noise * pre over the twirl set.
            oracle::Channel twirled = [&, noise = noise](const oracle::Mat &rho) {
                oracle::Mat out = oracle::Mat::Zero(4, 4);
                for (size_t e = 0; e < pres.size(); e++) {
                    oracle::Mat v = posts[e] * u;
                    out += v * noise(pres[e] * rho * pres[e].adjoint()) * v.adjoint();
                }
                return oracle::Mat(out / double(pres.size()));
            };
            auto avg = twirl_dense(dense, part);
            std::vector<std::string> labels;
            std::vector<double> probs;
            for (const auto &l : oracle::all_labels(2)) {
                labels.push_back(l);
                probs.push_back(avg.probability(P(l)));
            }
            auto expect_noise = oracle::pauli_channel(labels, probs);
            oracle::Channel expect = [&](const oracle::Mat &rho) {
                return oracle::Mat(u * expect_noise(rho) * u.adjoint());
            };
            oracle::Mat got = ptm_matrix(twirled, 2), want = ptm_matrix(expect, 2);
            ASSERT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Twirl, PiRotationTwirlIsThePauliTwirl) {
    // A non-Pauli channel: a small coherent rotation followed by dephasing.
    oracle::Mat v = oracle::embed(oracle::rotation("X", 0.3), {0}, 2) * oracle::embed(oracle::rotation("Y", 0.2), {1}, 2);
    auto deph = oracle::pauli_channel({"II", "ZI", "IZ"}, {0.9, 0.06, 0.04});
    oracle::Channel noise = [&](const oracle::Mat &rho) { return deph(oracle::Mat(v * rho * v.adjoint())); };
    std::vector<oracle::Mat> rots;
    for (const auto &l : oracle::all_labels(2)) {
        std::vector<Rotation> rs;
        for (size_t q = 0; q < 2; q++) {
            if (l[q] != 'I') rs.push_back(Rotation{q, l[q], Angle::pi()});
        }
        rots.push_back(dense_rotations(rs, 2));
    }
    oracle::Channel rot_twirl = [&](const oracle::Mat &rho) {
        oracle::Mat out = oracle::Mat::Zero(4, 4);
        for (const auto &r : rots) out += r.adjoint() * noise(r * rho * r.adjoint()) * r;
        return oracle::Mat(out / 16.0);
    };
    oracle::Channel pauli_twirl = [&](const oracle::Mat &rho) {
        oracle::Mat out = oracle::Mat::Zero(4, 4);
        for (const auto &l : oracle::all_labels(2)) {
            oracle::Mat p = oracle::pauli(l);
            out += p * noise(p * rho * p) * p;
        }
        return oracle::Mat(out / 16.0);
    };
    oracle::Mat a = ptm_matrix(rot_twirl, 2), b = ptm_matrix(pauli_twirl, 2);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-14);
    // Diagonal, and the singleton partition leaves it unchanged.
    oracle::Mat diag = b.diagonal().asDiagonal();
    EXPECT_LT((b - diag).cwiseAbs().maxCoeff(), 1e-14);
    std::vector<double> f(16);
    auto labels = oracle::all_labels(2);
    for (size_t i = 0; i < 16; i++) f[DensePauliChannel::index_of(P(labels[i]))] = b(Eigen::Index(i), Eigen::Index(i)).real();
    auto ch = DensePauliChannel::from_fidelities(2, f);
    auto same = twirl_dense(ch, singleton_partition(2));
    for (size_t i = 0; i < 16; i++) EXPECT_EQ(same.fidelities[i], ch.fidelities[i]);
}

TEST(Twirl, CzPartitionExample) {
    auto cls = classify_two_qubit(local_gate("cz"));
    auto part = averaging_partition(cls, feasible_rotation_twirls(cls));
    EXPECT_EQ(part.groups.size(), 8u);
    EXPECT_EQ(part.group_of(P("XI")), part.group_of(P("YI")));
    EXPECT_NE(part.group_of(P("XI")), part.group_of(P("ZI")));
    EXPECT_EQ(part.group_of(P("XX")), part.group_of(P("YY")));
    EXPECT_EQ(part.group_of(P("XZ")), part.group_of(P("YZ")));
    auto swap = classify_two_qubit(local_gate("swap"));
    EXPECT_EQ(averaging_partition(swap, feasible_rotation_twirls(swap)).groups.size(), 3u);
    EXPECT_THROW(averaging_partition(cls, single_qubit_twirls()), std::invalid_argument);
}

TEST(Twirl, CorrectionIdentityHoldsWithSigns) {
    for (const auto &[name, op] : representatives()) {
        auto cls = classify_two_qubit(op);
        if (cls.class_id < 3) continue;
        for (const auto &b : kTwoLetterBases) {
            SCOPED_TRACE(name + " " + b);
            auto sched = correction_schedule(cls, P(b));
            auto pre = rotations_tableau(sched.pre, 2), post = rotations_tableau(sched.post, 2);
            auto whole = compose(post, compose(op, pre));
            for (const auto &l : oracle::all_labels(2)) {
                if (l == "II") continue;
                ASSERT_EQ(whole.conjugate(P(l)), op.conjugate(P(l))) << l;
            }
            auto img = op.conjugate(P(b));
            if (sched.empty()) {
                EXPECT_TRUE(img.pauli == P(b) || img.pauli.support() != P(b).support());
                continue;
            }
            // Pre-rotations take the image back to the basis with a + sign,
            // and the second gate application closes the trajectory.
            auto mid = pre.conjugate(img);
            EXPECT_EQ(mid.str(), "+" + b);
            auto end = compose(post, compose(op, compose(pre, op))).conjugate(P(b));
            EXPECT_EQ(end.str(), "+" + b);
            for (const auto &r : sched.pre) {
                EXPECT_EQ(r.letter, r.qubit == 0 ? cls.roles.c : cls.roles.d);
            }
        }
    }
}

TEST(Twirl, CorrectionExamples) {
    auto cz = classify_two_qubit(local_gate("cz"));
    EXPECT_FALSE(correction_schedule(cz, P("XX")).empty());
    EXPECT_TRUE(correction_schedule(cz, P("ZZ")).empty());
    EXPECT_TRUE(correction_schedule(cz, P("XZ")).empty());  // support changes
    auto swap = classify_two_qubit(local_gate("swap"));
    std::string af{swap.roles.a, swap.roles.f};
    EXPECT_TRUE(correction_schedule(swap, P(af)).empty());
    EXPECT_THROW(correction_schedule(cz, P("XI")), std::invalid_argument);
}

TEST(Twirl, MeasurablePairExamples) {
    auto cz = classify_two_qubit(local_gate("cz"));
    auto corrected = measurable_pairs(cz, P("XX"), correction_schedule(cz, P("XX")));
    EXPECT_EQ(corrected[2].first, P("XX"));
    EXPECT_EQ(corrected[2].second, P("XX"));
    auto plain = measurable_pairs(cz, P("XX"), CorrectionSchedule{P("XX"), {}, {}});
    EXPECT_EQ(plain[2].second, P("YY"));
    EXPECT_EQ(plain[0].first, P("XI"));
    EXPECT_EQ(plain[0].second, P("XZ"));
    EXPECT_TRUE(plain[0].support_changed);
    auto zz = measurable_pairs(cz, P("ZZ"), correction_schedule(cz, P("ZZ")));
    for (const auto &p : zz) {
        EXPECT_EQ(p.first, p.second);
        EXPECT_FALSE(p.support_changed);
    }
}

TEST(Twirl, SingleQubitCorrection) {
    auto h = local_gate("h");
    auto sched = single_qubit_correction(h, P("X"));
    ASSERT_FALSE(sched.empty());
    auto mid = rotations_tableau(sched.pre, 1).conjugate(h.conjugate(P("X")));
    EXPECT_EQ(mid.str(), "+X");
    EXPECT_TRUE(single_qubit_correction(local_gate("x"), P("X")).empty());
}
