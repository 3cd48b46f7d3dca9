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
#include <fstream>
#include <sstream>

#include "loqc/circuit.hpp"

using namespace loqc;

namespace {

std::string read_bundled(const std::string &name) {
    std::ifstream f(std::string(LOQC_CIRCUITS_DIR) + "/" + name);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<Diagnostic> diagnostics_of(std::string_view text) {
    try {
        parse_circuit(text);
    } catch (const ParseError &e) {
        return e.diagnostics;
    }
    return {};
}

double probability_of(const CircuitReport &r, const std::string &value) {
    for (const auto &[v, p] : r.outputs) {
        if (v == value) {
            return p;
        }
    }
    return 0;
}

}  // namespace

TEST(Parse, MinimalCircuit) {
    CircuitAst ast = parse_circuit("qubit q0 1 0 0 0\nmeasure q0 hv");
    ASSERT_EQ(ast.statements.size(), 2u);
    EXPECT_EQ(std::get<QubitStmt>(ast.statements[0]).label, "q0");
    EXPECT_EQ(std::get<MeasureStmt>(ast.statements[1]).basis, Basis::HV);
    EXPECT_EQ(ast.lines, (std::vector<std::size_t>{1, 2}));
}

TEST(Parse, CommentsAndBlankLinesIgnored) {
    CircuitAst ast = parse_circuit("# header\n\n  qubit a 1 0 0 0   # trailing\r\n\tmeasure a diag\n");
    ASSERT_EQ(ast.statements.size(), 2u);
    EXPECT_EQ(ast.lines[0], 3u);
    EXPECT_EQ(std::get<MeasureStmt>(ast.statements[1]).basis, Basis::Diag);
}

TEST(Parse, PiExpressions) {
    CircuitAst ast = parse_circuit(
        "qubit a 1 0 0 0\nelement rot pi/8 a\nelement phase -pi a.v\nelement phase 0.5*pi a.h\n");
    EXPECT_DOUBLE_EQ(std::get<ElementStmt>(ast.statements[1]).parameter, std::numbers::pi / 8);
    EXPECT_DOUBLE_EQ(std::get<ElementStmt>(ast.statements[2]).parameter, -std::numbers::pi);
    EXPECT_DOUBLE_EQ(std::get<ElementStmt>(ast.statements[3]).parameter, std::numbers::pi / 2);
}

TEST(Parse, DuplicateLabelReportedOnSecondLine) {
    auto d = diagnostics_of("qubit q0 1 0 0 0\nqubit q0 0 1 0 0");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].category, DiagnosticCategory::DuplicateLabel);
    EXPECT_EQ(d[0].line, 2u);
    EXPECT_EQ(d[0].column, 7u);
}

TEST(Parse, EachCategoryCarriesItsLine) {
    auto d = diagnostics_of(
        "qubit a 1 0 0 0\n"          // 1
        "teleport a\n"               // 2 unknown-keyword
        "element bs half a.h a.v\n"  // 3 bad-number
        "qubit a 0 0 1 0\n"          // 4 duplicate-label
        "measure ghost hv\n"         // 5 unresolved-label
        "gate xor a\n");             // 6 syntax
    ASSERT_EQ(d.size(), 5u);
    EXPECT_EQ(d[0].category, DiagnosticCategory::UnknownKeyword);
    EXPECT_EQ(d[0].line, 2u);
    EXPECT_EQ(d[1].category, DiagnosticCategory::BadNumber);
    EXPECT_EQ(d[1].line, 3u);
    EXPECT_EQ(d[2].category, DiagnosticCategory::DuplicateLabel);
    EXPECT_EQ(d[2].line, 4u);
    EXPECT_EQ(d[3].category, DiagnosticCategory::UnresolvedLabel);
    EXPECT_EQ(d[3].line, 5u);
    EXPECT_EQ(d[4].category, DiagnosticCategory::Syntax);
    EXPECT_EQ(d[4].line, 6u);
}

TEST(Parse, StopsAfterTenDiagnostics) {
    std::string text;
    for (int i = 0; i < 25; ++i) {
        text += "bogus\n";
    }
    EXPECT_EQ(diagnostics_of(text).size(), kMaxDiagnostics);
}

TEST(Parse, DiagnosticShowsSourceContext) {
    auto d = diagnostics_of("qubit a 1 0 0 0\nmeasure a sideways\n");
    ASSERT_EQ(d.size(), 1u);
    std::string text = d[0].to_string();
    EXPECT_NE(text.find("line 2, column 11"), std::string::npos);
    EXPECT_NE(text.find("measure a sideways"), std::string::npos);
}

TEST(Parse, RailRules) {
    EXPECT_EQ(diagnostics_of("qubit a 1 0 0 0\nelement phase 1 a\n").at(0).category, DiagnosticCategory::Syntax);
    EXPECT_EQ(diagnostics_of("qubit a 1 0 0 0\nelement rot 1 a.h\n").at(0).category, DiagnosticCategory::Syntax);
    EXPECT_EQ(diagnostics_of("qubit a 1 0 0 0\nelement loss 1 a.x\n").at(0).category, DiagnosticCategory::Syntax);
    EXPECT_EQ(diagnostics_of("qubit a 1 0 0 0\nelement bs 2 a.h a.v\n").at(0).category,
              DiagnosticCategory::BadNumber);
}

TEST(BundledFile, MatchesBuiltInParityCircuit) {
    CircuitAst file = parse_circuit(read_bundled("parity3.loqc"));
    EXPECT_EQ(file, three_qubit_parity_circuit());
    EXPECT_EQ(file.statements.size(), 6u);
}

TEST(BundledFile, RoundTrips) {
    CircuitAst file = parse_circuit(read_bundled("parity3.loqc"));
    EXPECT_EQ(parse_circuit(print_circuit(file)), file);
}

TEST(Print, RoundTripsEveryStatementKind) {
    const char *text =
        "qubit a 0.6 0 0 0.8\n"
        "qubit b 0.1 -0.2 0.3 0.4\n"
        "bell p r\n"
        "element bs 0.3 a.h b.v\n"
        "element pbs a b\n"
        "element rot 0.7853981633974483 a\n"
        "element phase -1.25 b.h\n"
        "element loss 0.9 p.v\n"
        "gate cnot a b -> c t\n"
        "detect r.h diag 1\n"
        "detect p hv 1\n"
        "measure c hv\n"
        "measure t diag\n";
    CircuitAst ast = parse_circuit(text);
    EXPECT_EQ(ast.statements.size(), 13u);
    std::string printed = print_circuit(ast);
    EXPECT_EQ(parse_circuit(printed), ast);
    EXPECT_EQ(print_circuit(parse_circuit(printed)), printed);
}

TEST(Elaborate, SingleQubitUsesTwoModes) {
    CircuitProgram p = elaborate(parse_circuit("qubit q 1 0 0 0\nmeasure q hv"));
    EXPECT_EQ(p.mode_count, 2u);
    EXPECT_EQ(p.measurements.size(), 1u);
    EXPECT_EQ(p.mode_table.at("q"), (QubitSlot{0, 1}));
}

TEST(Elaborate, XorGateBringsOneDetectorAndTwoCorrections) {
    CircuitProgram p = elaborate(parse_circuit("qubit a 1 0 0 0\nqubit b 1 0 0 0\ngate xor a b -> c\n"));
    ASSERT_EQ(p.steps.size(), 1u);
    const auto &g = std::get<GateStep>(p.steps[0]);
    EXPECT_EQ(g.gate.detector_modes.size(), 2u);  // one polarization-resolving detector
    EXPECT_EQ(g.gate.corrections->size(), 2u);
    EXPECT_EQ(p.mode_count, 4u);
}

TEST(Elaborate, CnotAllocatesAncillaModes) {
    CircuitProgram p = elaborate(parse_circuit("qubit a 1 0 0 0\nqubit b 1 0 0 0\ngate cnot a b -> c t\n"));
    EXPECT_EQ(p.mode_count, 8u);
    EXPECT_EQ(p.bells.size(), 1u);
}

TEST(Elaborate, ConsumedQubitCannotBeReused) {
    CircuitAst ast = parse_circuit("qubit a 1 0 0 0\nqubit b 1 0 0 0\ngate xor a b -> c\nmeasure a hv\n");
    try {
        elaborate(ast);
        FAIL() << "expected ElaborationError";
    } catch (const ElaborationError &e) {
        EXPECT_EQ(e.line, 4u);
        EXPECT_NE(std::string(e.what()).find("consumed"), std::string::npos);
    }
}

TEST(Elaborate, UnknownGateAndArity) {
    EXPECT_THROW(elaborate(parse_circuit("qubit a 1 0 0 0\nqubit b 1 0 0 0\ngate swap a b -> c d\n")),
                 ElaborationError);
    EXPECT_THROW(elaborate(parse_circuit("qubit a 1 0 0 0\nqubit b 1 0 0 0\ngate xor a b -> c d\n")),
                 ElaborationError);
    EXPECT_THROW(elaborate(parse_circuit("qubit a 1 0 0 0\ngate xor a a -> c\n")), ElaborationError);
}

TEST(Elaborate, IsDeterministic) {
    CircuitAst ast = three_qubit_parity_circuit();
    EXPECT_EQ(elaborate(ast).mode_table, elaborate(ast).mode_table);
    EXPECT_EQ(elaborate(ast).mode_count, elaborate(ast).mode_count);
}

TEST(Run, ParityCircuitAllBasisInputs) {
    for (int x = 0; x < 8; ++x) {
        std::array<int, 3> bits{(x >> 2) & 1, (x >> 1) & 1, x & 1};
        CircuitReport r = run_circuit(elaborate(three_qubit_parity_circuit(bits)));
        std::string parity = ((bits[0] ^ bits[1] ^ bits[2]) ? "1" : "0");
        EXPECT_NEAR(r.acceptance_probability, 0.25, 1e-9) << x;
        EXPECT_NEAR(probability_of(r, parity), 1.0, 1e-9) << x;
        ASSERT_EQ(r.per_gate_acceptance.size(), 2u);
        EXPECT_NEAR(r.per_gate_acceptance[0] * r.per_gate_acceptance[1], r.acceptance_probability, 1e-12);
    }
}

TEST(Run, ParityOfOneZeroOneIsZero) {
    CircuitReport r = run_circuit(elaborate(three_qubit_parity_circuit()));
    EXPECT_NEAR(probability_of(r, "0"), 1.0, 1e-9);
    EXPECT_NEAR(r.acceptance_probability, 0.25, 1e-9);
}

TEST(Run, SuperposedInputKeepsCoherence) {
    const double s = 1 / std::sqrt(2.0);
    std::array<std::pair<cplx, cplx>, 3> in{{{s, s}, {1, 0}, {1, 0}}};
    CircuitReport hv = run_circuit(elaborate(three_qubit_parity_circuit(in, Basis::HV)));
    EXPECT_NEAR(probability_of(hv, "0"), 0.5, 1e-9);
    EXPECT_NEAR(probability_of(hv, "1"), 0.5, 1e-9);
    // A mixture would give 1/2 here too; only a coherent |+> gives certainty.
    CircuitReport diag = run_circuit(elaborate(three_qubit_parity_circuit(in, Basis::Diag)));
    EXPECT_NEAR(probability_of(diag, "0"), 1.0, 1e-9);
}

TEST(Run, DistributionSumsToOne) {
    CircuitReport r = run_circuit(elaborate(parse_circuit(
        "qubit a 0.6 0 0 0.8\nqubit b 1 0 1 0\ngate cnot a b -> c t\nmeasure c hv\nmeasure t diag\n")));
    double sum = 0;
    for (const auto &[v, p] : r.outputs) {
        sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-10);
    EXPECT_NEAR(r.acceptance_probability, 0.25, 1e-9);
}

TEST(Run, CnotMakesBellPair) {
    CircuitReport r = run_circuit(elaborate(parse_circuit(
        "qubit a 1 0 1 0\nqubit b 1 0 0 0\ngate cnot a b -> c t\nmeasure c hv\nmeasure t hv\n")));
    EXPECT_NEAR(probability_of(r, "00"), 0.5, 1e-9);
    EXPECT_NEAR(probability_of(r, "11"), 0.5, 1e-9);
}

TEST(Run, DetectStatementPostselects) {
    // Balanced beam splitter on two H photons: both end up together.
    CircuitReport r = run_circuit(
        elaborate(parse_circuit("qubit a 1 0 0 0\nqubit b 1 0 0 0\nelement bs 0.5 a.h b.h\ndetect a hv 2\n")));
    EXPECT_NEAR(r.acceptance_probability, 0.5, 1e-12);
    CircuitReport none = run_circuit(
        elaborate(parse_circuit("qubit a 1 0 0 0\nqubit b 1 0 0 0\nelement bs 0.5 a.h b.h\ndetect a.h hv 1\n")));
    EXPECT_NEAR(none.acceptance_probability, 0.0, 1e-12);
    EXPECT_TRUE(none.outputs.empty());
}

TEST(Run, EncoderThenParityCheck) {
    CircuitReport r = run_circuit(elaborate(parse_circuit(
        "qubit a 0 0 1 0\ngate encoder a -> x y\ngate parity_check x y -> z\nmeasure z hv\n")));
    EXPECT_NEAR(r.acceptance_probability, 0.5, 1e-9);
    EXPECT_NEAR(probability_of(r, "1"), 1.0, 1e-9);
}

TEST(Run, ConnectionLossLowersAcceptance) {
    ElaborateOptions opt;
    opt.connection_transmission = 0.9;
    CircuitReport r = run_circuit(elaborate(three_qubit_parity_circuit(), opt));
    EXPECT_LT(r.acceptance_probability, 0.25);
    EXPECT_GT(probability_of(r, "x"), 0.0);
    double sum = 0;
    for (const auto &[v, p] : r.outputs) {
        sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-10);
}

TEST(Run, PhotonCapExceeded) {
    std::string text;
    for (int i = 0; i < 5; ++i) {
        text += "bell p" + std::to_string(i) + " r" + std::to_string(i) + "\n";
    }
    EXPECT_THROW(run_circuit(elaborate(parse_circuit(text))), PhotonCapExceeded);
}

TEST(Run, SeedDoesNotChangeExactResults) {
    CircuitProgram p = elaborate(three_qubit_parity_circuit());
    CircuitReport a = run_circuit(p, 1), b = run_circuit(p, 99);
    EXPECT_EQ(a.acceptance_probability, b.acceptance_probability);
    EXPECT_EQ(a.outputs, b.outputs);
}
