// Copyright 2026 The loqc Authors
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

#include <cmath>
#include <random>

#include "loqc/gates.hpp"
#include "oracles.hpp"

using namespace loqc;

namespace {

std::vector<std::pair<cplx, cplx>> random_qubits(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<std::pair<cplx, cplx>> q;
    for (std::size_t i = 0; i < n; ++i) {
        q.push_back({{g(rng), g(rng)}, {g(rng), g(rng)}});
    }
    return q;
}

std::vector<cplx> basis_vector(std::size_t dim, std::size_t x) {
    std::vector<cplx> v(dim);
    v[x] = 1;
    return v;
}

/// Smallest oracle fidelity over the accepted branches of one run.
double worst_branch_fidelity(const GateDefinition &g, const std::vector<cplx> &amps, bool corrections) {
    GateEvolution ev = run_gate(g, logical_input(g, amps), 1.0, corrections);
    std::vector<cplx> target = oracle::ideal_map(g.name, amps);
    double worst = 1.0;
    for (const auto &b : ev.branches) {
        if (b.accepted && b.probability > 1e-12) {
            worst = std::min(worst, oracle::branch_fidelity(g, b, target));
        }
    }
    return worst;
}

class EveryGate : public ::testing::TestWithParam<std::string> {};

}  // namespace

TEST(Cnot, AcceptanceIsQuarterOnBasisInputs) {
    GateDefinition g = build_pbs_cnot();
    for (std::size_t x = 0; x < 4; ++x) {
        EXPECT_NEAR(run_gate(g, basis_input(g, x)).acceptance(), 0.25, 1e-9) << bit_label(x, 2);
    }
}

TEST(Cnot, AcceptanceIsInputIndependent) {
    GateDefinition g = build_pbs_cnot();
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        auto q = random_qubits(2, rng);
        EXPECT_NEAR(run_gate(g, product_input(g, q)).acceptance(), 0.25, 1e-9);
    }
}

TEST(Cnot, TruthTableIsThePermutation) {
    GateReport r = truth_table(build_pbs_cnot());
    const char *expected[] = {"00", "01", "11", "10"};
    ASSERT_EQ(r.rows.size(), 4u);
    for (std::size_t x = 0; x < 4; ++x) {
        EXPECT_NEAR(r.rows[x].acceptance, 0.25, 1e-9);
        EXPECT_NEAR(r.rows[x].outputs[expected[x]], 1.0, 1e-9) << r.rows[x].input;
    }
    EXPECT_NEAR(r.truth_table_fidelity, 1.0, 1e-9);
}

TEST(Cnot, EntanglesSuperposedControl) {
    GateDefinition g = build_pbs_cnot();
    std::vector<cplx> in = oracle::product_amplitudes({{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}, {1, 0}});
    std::vector<cplx> bell = {1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0)};
    ASSERT_EQ(oracle::apply_cnot(in), bell);
    GateEvolution ev = run_gate(g, logical_input(g, in));
    for (const auto &b : ev.branches) {
        if (b.accepted) {
            EXPECT_GE(oracle::branch_fidelity(g, b, bell), 1 - 1e-9) << to_string(b.pattern);
        }
    }
    LogicalComponents lc = logical_components(accepted_state(ev), g.outputs, ev.layer_width);
    EXPECT_GE(state_fidelity(lc, bell), 1 - 1e-9);
}

TEST(TwoPhotonGates, XorAndEncoderAcceptHalf) {
    GateDefinition x = build_destructive_xor();
    for (std::size_t in = 0; in < 4; ++in) {
        EXPECT_NEAR(run_gate(x, basis_input(x, in)).acceptance(), 0.5, 1e-9);
    }
    GateDefinition e = build_encoder();
    std::mt19937_64 rng(8);
    for (std::size_t in = 0; in < 2; ++in) {
        EXPECT_NEAR(run_gate(e, basis_input(e, in)).acceptance(), 0.5, 1e-9);
    }
    for (int i = 0; i < 5; ++i) {
        EXPECT_NEAR(run_gate(e, product_input(e, random_qubits(1, rng))).acceptance(), 0.5, 1e-9);
    }
}

TEST(TwoPhotonGates, ParityCheckAcceptsHalfWithPlusAncilla) {
    GateDefinition g = build_parity_check();
    std::mt19937_64 rng(4);
    for (int i = 0; i < 10; ++i) {
        auto q = random_qubits(1, rng);
        q.push_back({1, 1});
        EXPECT_NEAR(run_gate(g, product_input(g, q)).acceptance(), 0.5, 1e-9);
    }
    GateReport r = truth_table(g);
    EXPECT_NEAR(r.mean_acceptance, 0.5, 1e-9);
    // Only equal-valued inputs pass.
    EXPECT_NEAR(r.rows[0].acceptance, 1.0, 1e-9);
    EXPECT_NEAR(r.rows[1].acceptance, 0.0, 1e-9);
    EXPECT_NEAR(r.rows[2].acceptance, 0.0, 1e-9);
    EXPECT_NEAR(r.rows[3].acceptance, 1.0, 1e-9);
}

TEST_P(EveryGate, CorrectedOutputMatchesIdealMap) {
    GateDefinition g = build_gate(GetParam());
    ASSERT_TRUE(g.corrections.has_value());
    const std::size_t dim = std::size_t{1} << g.inputs.size();
    for (std::size_t x = 0; x < dim; ++x) {
        std::vector<cplx> amps = basis_vector(dim, x);
        std::vector<cplx> ideal = oracle::ideal_map(g.name, amps);
        if (std::all_of(ideal.begin(), ideal.end(), [](cplx c) { return c == cplx{}; })) {
            continue;
        }
        EXPECT_GE(worst_branch_fidelity(g, amps, true), 1 - 1e-9) << "input " << x;
    }
    std::mt19937_64 rng(12);
    for (int i = 0; i < 10; ++i) {
        std::vector<cplx> amps = oracle::product_amplitudes(random_qubits(g.inputs.size(), rng));
        EXPECT_GE(worst_branch_fidelity(g, amps, true), 1 - 1e-9) << "random input " << i;
    }
}

TEST_P(EveryGate, ProcessFidelityIsOneAtFullOverlap) {
    GateReport r = truth_table(build_gate(GetParam()));
    EXPECT_NEAR(r.process_fidelity, 1.0, 1e-9);
}

TEST_P(EveryGate, CorrectionsAreNeeded) {
    GateDefinition g = build_gate(GetParam());
    ASSERT_FALSE(g.corrections->empty());
    std::mt19937_64 rng(21);
    double worst = 1.0;
    for (int i = 0; i < 10; ++i) {
        std::vector<cplx> amps = oracle::product_amplitudes(random_qubits(g.inputs.size(), rng));
        worst = std::min(worst, worst_branch_fidelity(g, amps, false));
    }
    EXPECT_LT(worst, 1 - 1e-6);
}

TEST_P(EveryGate, OutcomeClassesSumToOne) {
    GateDefinition g = build_gate(GetParam());
    std::mt19937_64 rng(30);
    const std::size_t dim = std::size_t{1} << g.inputs.size();
    for (std::size_t x = 0; x < dim; ++x) {
        OutcomeDistribution d = classify_outcomes(g, basis_input(g, x));
        EXPECT_NEAR(d.accept + d.correctable + d.fail, 1.0, 1e-10);
    }
    for (double v : {1.0, 0.5, 0.0}) {
        OutcomeDistribution d = classify_outcomes(g, product_input(g, random_qubits(g.inputs.size(), rng)), v);
        EXPECT_NEAR(d.accept + d.correctable + d.fail, 1.0, 1e-10);
        double pattern_sum = 0;
        for (const auto &p : d.patterns) {
            pattern_sum += p.probability;
        }
        EXPECT_NEAR(pattern_sum, 1.0, 1e-10);
    }
}

TEST_P(EveryGate, TruthTableFidelityNonIncreasingAsOverlapDrops) {
    GateDefinition g = build_gate(GetParam());
    double previous = 2.0;
    for (double v : {1.0, 0.75, 0.5, 0.25, 0.0}) {
        double f = truth_table(g, v).truth_table_fidelity;
        EXPECT_LE(f, previous + 1e-12) << "v=" << v;
        previous = f;
    }
}

INSTANTIATE_TEST_SUITE_P(Gates, EveryGate, ::testing::Values("parity_check", "xor", "encoder", "cnot"));

TEST(Distinguishability, CnotDegradesToClassicalMixture) {
    GateDefinition g = build_pbs_cnot();
    GateReport r = truth_table(g, 0.0);
    EXPECT_LT(r.truth_table_fidelity, 1.0);
    EXPECT_GT(r.rows[0].outputs["01"], 0.0);
    EXPECT_LT(truth_table(g, 0.5).process_fidelity, 1.0);
}

TEST(CorrectionSearch, XorTableHasTwoEntries) {
    GateDefinition g = build_destructive_xor();
    EXPECT_EQ(g.detector_modes.size(), 2u);
    EXPECT_EQ(g.corrections->size(), 2u);
}

TEST(CorrectionSearch, CnotTableCoversFourPatterns) {
    EXPECT_EQ(build_pbs_cnot().corrections->size(), 4u);
}

TEST(CorrectionSearch, UnreachableIdealIsRejected) {
    GateDefinition g = destructive_xor_layout();
    // AND is not a Pauli-correctable outcome of this layout.
    g.ideal = ComplexMatrix(2, 4);
    g.ideal(0, 0) = g.ideal(0, 1) = g.ideal(0, 2) = 1;
    g.ideal(1, 3) = 1;
    EXPECT_THROW(derive_correction_table(g), NoValidCorrection);
}

TEST(CorrectionSearch, DetectorlessGateNeedsNoTable) {
    GateDefinition g = derive_correction_table(identity_layout(2));
    ASSERT_TRUE(g.corrections.has_value());
    EXPECT_TRUE(g.corrections->empty());
    EXPECT_NEAR(run_gate(g, basis_input(g, 2)).acceptance(), 1.0, 1e-15);
}

TEST(Gates, UnknownNameThrows) {
    EXPECT_THROW(build_gate("toffoli"), std::invalid_argument);
}

TEST(Gates, InputMustMatchGateModes) {
    GateDefinition g = build_destructive_xor();
    EXPECT_THROW(run_gate(g, make_basis_state({1, 0})), std::invalid_argument);
    EXPECT_THROW(run_gate(g, basis_input(g, 0), 1.5), std::invalid_argument);
}
