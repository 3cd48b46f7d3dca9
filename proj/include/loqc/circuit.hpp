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

// Text circuit format (one statement per line, '#' starts a comment):
//
//   qubit <label> <re(alpha)> <im(alpha)> <re(beta)> <im(beta)>
//   bell <label1> <label2>
//   element bs <R> <label.h|label.v> <label.h|label.v>   (R: intensity reflectivity)
//   element pbs <label> <label>
//   element rot <theta> <label>
//   element phase <phi> <label.h|label.v>
//   element loss <eta> <label.h|label.v>
//   gate <parity_check|xor|encoder|cnot> <in...> -> <out...>
//   detect <label[.h|.v]> <hv|diag> <count>
//   measure <label> <hv|diag>
//
// Numbers may also be written as pi, pi/<n> or <x>*pi, optionally negated.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "loqc/gates.hpp"
#include "loqc/measurement.hpp"

namespace loqc {

enum class Rail { H, V };
enum class Basis { HV, Diag };

inline double basis_angle(Basis b) {
    return b == Basis::Diag ? kDiagonalRotation : 0.0;
}

/// A qubit label, optionally narrowed to one of its rails.
struct ModeRef {
    std::string label;
    std::optional<Rail> rail;

    bool operator==(const ModeRef &) const = default;
};

struct QubitStmt {
    std::string label;
    cplx alpha;
    cplx beta;

    bool operator==(const QubitStmt &) const = default;
};

struct BellStmt {
    std::string first;
    std::string second;

    bool operator==(const BellStmt &) const = default;
};

struct ElementStmt {
    ElementKind kind = ElementKind::PhaseShifter;
    double parameter = 0;
    std::vector<ModeRef> targets;

    bool operator==(const ElementStmt &) const = default;
};

struct GateStmt {
    std::string name;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    bool operator==(const GateStmt &) const = default;
};

struct DetectStmt {
    ModeRef target;
    Basis basis = Basis::HV;
    unsigned count = 0;

    bool operator==(const DetectStmt &) const = default;
};

struct MeasureStmt {
    std::string label;
    Basis basis = Basis::HV;

    bool operator==(const MeasureStmt &) const = default;
};

using Statement = std::variant<QubitStmt, BellStmt, ElementStmt, GateStmt, DetectStmt, MeasureStmt>;

struct CircuitAst {
    std::vector<Statement> statements;
    /// Source line of each statement (1-based); 0 for built-in circuits.
    std::vector<std::size_t> lines;

    /// Line numbers are provenance, not content.
    bool operator==(const CircuitAst &other) const {
        return statements == other.statements;
    }
};

enum class DiagnosticCategory { Syntax, UnknownKeyword, BadNumber, DuplicateLabel, UnresolvedLabel };

inline std::string_view category_name(DiagnosticCategory c) {
    switch (c) {
        case DiagnosticCategory::Syntax:
            return "syntax";
        case DiagnosticCategory::UnknownKeyword:
            return "unknown-keyword";
        case DiagnosticCategory::BadNumber:
            return "bad-number";
        case DiagnosticCategory::DuplicateLabel:
            return "duplicate-label";
        case DiagnosticCategory::UnresolvedLabel:
            return "unresolved-label";
    }
    return "?";
}

struct Diagnostic {
    std::size_t line = 0;
    std::size_t column = 0;
    DiagnosticCategory category = DiagnosticCategory::Syntax;
    std::string message;
    std::string source_line;

    std::string to_string() const {
        std::string s = "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                        std::string(category_name(category)) + ": " + message;
        if (!source_line.empty()) {
            s += "\n    " + source_line + "\n    " + std::string(column > 0 ? column - 1 : 0, ' ') + "^";
        }
        return s;
    }
};

struct ParseError : std::runtime_error {
    std::vector<Diagnostic> diagnostics;

    explicit ParseError(std::vector<Diagnostic> d)
        : std::runtime_error(d.empty() ? "parse error" : d.front().to_string()), diagnostics(std::move(d)) {
    }
};

inline constexpr std::size_t kMaxDiagnostics = 10;

namespace detail {

struct Token {
    std::string_view text;
    std::size_t column = 0;
};

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') {
            break;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#') {
            ++i;
        }
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

inline std::optional<double> parse_plain_number(std::string_view s) {
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

/// number | [-]pi | [-]pi/<number> | <number>*pi
inline std::optional<double> parse_number(std::string_view s) {
    if (auto v = parse_plain_number(s)) {
        return v;
    }
    double sign = 1;
    std::string_view body = s;
    if (!body.empty() && body.front() == '-') {
        sign = -1;
        body.remove_prefix(1);
    }
    if (body == "pi") {
        return sign * std::numbers::pi;
    }
    if (body.starts_with("pi/")) {
        auto d = parse_plain_number(body.substr(3));
        if (d && *d != 0) {
            return sign * std::numbers::pi / *d;
        }
        return std::nullopt;
    }
    if (body.ends_with("*pi")) {
        auto m = parse_plain_number(body.substr(0, body.size() - 3));
        if (m) {
            return sign * *m * std::numbers::pi;
        }
    }
    return std::nullopt;
}

inline bool valid_label(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
        return false;
    }
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return true;
}

class Parser {
   public:
    explicit Parser(std::string_view text) : text_(text) {
    }

    CircuitAst run() {
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text_.size() && diagnostics_.size() < kMaxDiagnostics) {
            std::size_t end = text_.find('\n', pos);
            if (end == std::string_view::npos) {
                end = text_.size();
            }
            ++line_no;
            line_ = text_.substr(pos, end - pos);
            if (!line_.empty() && line_.back() == '\r') {
                line_.remove_suffix(1);
            }
            line_no_ = line_no;
            parse_line();
            if (end == text_.size()) {
                break;
            }
            pos = end + 1;
        }
        if (!diagnostics_.empty()) {
            throw ParseError(diagnostics_);
        }
        return ast_;
    }

   private:
    struct Abort {};

    [[noreturn]] void fail(std::size_t column, DiagnosticCategory cat, std::string msg) {
        diagnostics_.push_back({line_no_, column, cat, std::move(msg), std::string(line_)});
        throw Abort{};
    }

    double number(const Token &t) {
        auto v = parse_number(t.text);
        if (!v) {
            fail(t.column, DiagnosticCategory::BadNumber, "'" + std::string(t.text) + "' is not a number");
        }
        return *v;
    }

    unsigned count(const Token &t) {
        unsigned v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
            fail(t.column, DiagnosticCategory::BadNumber,
                 "'" + std::string(t.text) + "' is not a non-negative integer count");
        }
        return v;
    }

    Basis basis(const Token &t) {
        if (t.text == "hv") {
            return Basis::HV;
        }
        if (t.text == "diag") {
            return Basis::Diag;
        }
        fail(t.column, DiagnosticCategory::UnknownKeyword, "unknown basis '" + std::string(t.text) + "' (hv|diag)");
    }

    std::string new_label(const Token &t) {
        if (!valid_label(t.text)) {
            fail(t.column, DiagnosticCategory::Syntax, "'" + std::string(t.text) + "' is not a valid label");
        }
        std::string s(t.text);
        if (declared_.contains(s)) {
            fail(t.column, DiagnosticCategory::DuplicateLabel, "label '" + s + "' is already declared");
        }
        return s;
    }

    std::string existing_label(const Token &t, std::string_view label) {
        if (!valid_label(label)) {
            fail(t.column, DiagnosticCategory::Syntax, "'" + std::string(t.text) + "' is not a valid label");
        }
        std::string s(label);
        if (!declared_.contains(s)) {
            fail(t.column, DiagnosticCategory::UnresolvedLabel, "label '" + s + "' is not declared");
        }
        return s;
    }

    ModeRef mode_ref(const Token &t, bool rail_required, bool rail_allowed) {
        ModeRef r;
        std::string_view label = t.text;
        auto dot = t.text.find('.');
        if (dot != std::string_view::npos) {
            std::string_view suffix = t.text.substr(dot + 1);
            label = t.text.substr(0, dot);
            if (suffix == "h") {
                r.rail = Rail::H;
            } else if (suffix == "v") {
                r.rail = Rail::V;
            } else {
                fail(t.column + dot + 1, DiagnosticCategory::Syntax, "rail suffix must be .h or .v");
            }
            if (!rail_allowed) {
                fail(t.column, DiagnosticCategory::Syntax, "this element takes a whole qubit label, not a rail");
            }
        } else if (rail_required) {
            fail(t.column, DiagnosticCategory::Syntax, "expected <label>.h or <label>.v");
        }
        r.label = existing_label(t, label);
        return r;
    }

    void expect_count(const std::vector<Token> &tokens, std::size_t n, std::string_view form) {
        if (tokens.size() != n) {
            std::size_t col = tokens.size() > n ? tokens[n].column : line_.size() + 1;
            fail(col, DiagnosticCategory::Syntax,
                 "expected " + std::to_string(n) + " tokens: " + std::string(form) + ", got " +
                     std::to_string(tokens.size()));
        }
    }

    void push(Statement s) {
        ast_.statements.push_back(std::move(s));
        ast_.lines.push_back(line_no_);
    }

    void parse_line() {
        auto tokens = tokenize(line_);
        if (tokens.empty()) {
            return;
        }
        try {
            const auto &kw = tokens[0].text;
            if (kw == "qubit") {
                expect_count(tokens, 6, "qubit <label> <re a> <im a> <re b> <im b>");
                QubitStmt q;
                q.label = new_label(tokens[1]);
                q.alpha = {number(tokens[2]), number(tokens[3])};
                q.beta = {number(tokens[4]), number(tokens[5])};
                if (std::norm(q.alpha) + std::norm(q.beta) == 0) {
                    fail(tokens[2].column, DiagnosticCategory::BadNumber, "qubit amplitudes are both zero");
                }
                declared_.insert(q.label);
                push(std::move(q));
            } else if (kw == "bell") {
                expect_count(tokens, 3, "bell <label1> <label2>");
                BellStmt b;
                b.first = new_label(tokens[1]);
                b.second = new_label(tokens[2]);
                if (b.first == b.second) {
                    fail(tokens[2].column, DiagnosticCategory::DuplicateLabel, "bell pair labels must differ");
                }
                declared_.insert(b.first);
                declared_.insert(b.second);
                push(std::move(b));
            } else if (kw == "element") {
                parse_element(tokens);
            } else if (kw == "gate") {
                parse_gate(tokens);
            } else if (kw == "detect") {
                expect_count(tokens, 4, "detect <label[.h|.v]> <hv|diag> <count>");
                DetectStmt d;
                d.target = mode_ref(tokens[1], false, true);
                d.basis = basis(tokens[2]);
                d.count = count(tokens[3]);
                push(std::move(d));
            } else if (kw == "measure") {
                expect_count(tokens, 3, "measure <label> <hv|diag>");
                MeasureStmt m;
                m.label = existing_label(tokens[1], tokens[1].text);
                m.basis = basis(tokens[2]);
                push(std::move(m));
            } else {
                fail(tokens[0].column, DiagnosticCategory::UnknownKeyword,
                     "unknown statement '" + std::string(kw) + "'");
            }
        } catch (const Abort &) {
        }
    }

    void parse_element(const std::vector<Token> &tokens) {
        if (tokens.size() < 2) {
            fail(line_.size() + 1, DiagnosticCategory::Syntax, "element needs a kind");
        }
        ElementStmt e;
        const auto &kind = tokens[1].text;
        if (kind == "bs") {
            expect_count(tokens, 5, "element bs <r> <label.rail> <label.rail>");
            e.kind = ElementKind::BeamSplitter;
            e.parameter = number(tokens[2]);
            e.targets = {mode_ref(tokens[3], true, true), mode_ref(tokens[4], true, true)};
        } else if (kind == "pbs") {
            expect_count(tokens, 4, "element pbs <label> <label>");
            e.kind = ElementKind::PolarizingBeamSplitter;
            e.targets = {mode_ref(tokens[2], false, false), mode_ref(tokens[3], false, false)};
        } else if (kind == "rot") {
            expect_count(tokens, 4, "element rot <theta> <label>");
            e.kind = ElementKind::PolarizationRotator;
            e.parameter = number(tokens[2]);
            e.targets = {mode_ref(tokens[3], false, false)};
        } else if (kind == "phase") {
            expect_count(tokens, 4, "element phase <phi> <label.rail>");
            e.kind = ElementKind::PhaseShifter;
            e.parameter = number(tokens[2]);
            e.targets = {mode_ref(tokens[3], true, true)};
        } else if (kind == "loss") {
            expect_count(tokens, 4, "element loss <eta> <label.rail>");
            e.kind = ElementKind::LossChannel;
            e.parameter = number(tokens[2]);
            e.targets = {mode_ref(tokens[3], true, true)};
        } else {
            fail(tokens[1].column, DiagnosticCategory::UnknownKeyword,
                 "unknown element '" + std::string(kind) + "' (bs|pbs|rot|phase|loss)");
        }
        if ((e.kind == ElementKind::BeamSplitter || e.kind == ElementKind::LossChannel) &&
            !(e.parameter >= 0 && e.parameter <= 1)) {
            fail(tokens[2].column, DiagnosticCategory::BadNumber, "parameter must lie in [0,1]");
        }
        push(std::move(e));
    }

    void parse_gate(const std::vector<Token> &tokens) {
        if (tokens.size() < 2) {
            fail(line_.size() + 1, DiagnosticCategory::Syntax, "gate needs a name");
        }
        GateStmt g;
        if (!valid_label(tokens[1].text)) {
            fail(tokens[1].column, DiagnosticCategory::Syntax, "invalid gate name");
        }
        g.name = std::string(tokens[1].text);
        std::size_t i = 2;
        for (; i < tokens.size() && tokens[i].text != "->"; ++i) {
            g.inputs.push_back(existing_label(tokens[i], tokens[i].text));
        }
        if (i == tokens.size()) {
            fail(line_.size() + 1, DiagnosticCategory::Syntax, "gate statement is missing '->'");
        }
        std::size_t arrow = i;
        std::set<std::string> fresh;
        for (++i; i < tokens.size(); ++i) {
            std::string out = new_label(tokens[i]);
            if (!fresh.insert(out).second) {
                fail(tokens[i].column, DiagnosticCategory::DuplicateLabel, "output label '" + out + "' repeated");
            }
            g.outputs.push_back(out);
        }
        if (g.inputs.empty() || g.outputs.empty()) {
            fail(tokens[arrow].column, DiagnosticCategory::Syntax, "gate needs inputs and outputs around '->'");
        }
        declared_.insert(fresh.begin(), fresh.end());
        push(std::move(g));
    }

    std::string_view text_;
    std::string_view line_;
    std::size_t line_no_ = 0;
    std::set<std::string> declared_;
    std::vector<Diagnostic> diagnostics_;
    CircuitAst ast_;
};

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_ref(const ModeRef &r) {
    if (!r.rail) {
        return r.label;
    }
    return r.label + (*r.rail == Rail::H ? ".h" : ".v");
}

inline std::string_view basis_name(Basis b) {
    return b == Basis::Diag ? "diag" : "hv";
}

}  // namespace detail

/// Parses circuit text. Collects up to kMaxDiagnostics problems and throws a
/// ParseError carrying all of them.
inline CircuitAst parse_circuit(std::string_view text) {
    return detail::Parser(text).run();
}

/// Canonical text form; parse_circuit(print_circuit(ast)) == ast.
inline std::string print_circuit(const CircuitAst &ast) {
    std::ostringstream out;
    for (const auto &stmt : ast.statements) {
        std::visit(
            [&](const auto &s) {
                using T = std::decay_t<decltype(s)>;
                using detail::format_number;
                if constexpr (std::is_same_v<T, QubitStmt>) {
                    out << "qubit " << s.label << ' ' << format_number(s.alpha.real()) << ' '
                        << format_number(s.alpha.imag()) << ' ' << format_number(s.beta.real()) << ' '
                        << format_number(s.beta.imag());
                } else if constexpr (std::is_same_v<T, BellStmt>) {
                    out << "bell " << s.first << ' ' << s.second;
                } else if constexpr (std::is_same_v<T, ElementStmt>) {
                    out << "element " << element_kind_name(s.kind);
                    if (s.kind != ElementKind::PolarizingBeamSplitter) {
                        out << ' ' << format_number(s.parameter);
                    }
                    for (const auto &t : s.targets) {
                        out << ' ' << detail::format_ref(t);
                    }
                } else if constexpr (std::is_same_v<T, GateStmt>) {
                    out << "gate " << s.name;
                    for (const auto &i : s.inputs) {
                        out << ' ' << i;
                    }
                    out << " ->";
                    for (const auto &o : s.outputs) {
                        out << ' ' << o;
                    }
                } else if constexpr (std::is_same_v<T, DetectStmt>) {
                    out << "detect " << detail::format_ref(s.target) << ' ' << detail::basis_name(s.basis) << ' '
                        << s.count;
                } else {
                    out << "measure " << s.label << ' ' << detail::basis_name(s.basis);
                }
            },
            stmt);
        out << '\n';
    }
    return out.str();
}

/// Three-qubit parity: two XOR gates in series and a final readout.
inline CircuitAst three_qubit_parity_circuit(
    const std::array<std::pair<cplx, cplx>, 3> &inputs = {{{0, 1}, {1, 0}, {0, 1}}}, Basis basis = Basis::HV) {
    CircuitAst ast;
    for (std::size_t i = 0; i < 3; ++i) {
        ast.statements.push_back(QubitStmt{"q" + std::to_string(i), inputs[i].first, inputs[i].second});
    }
    ast.statements.push_back(GateStmt{"xor", {"q0", "q1"}, {"t1"}});
    ast.statements.push_back(GateStmt{"xor", {"t1", "q2"}, {"t2"}});
    ast.statements.push_back(MeasureStmt{"t2", basis});
    ast.lines.assign(ast.statements.size(), 0);
    return ast;
}

inline CircuitAst three_qubit_parity_circuit(std::array<int, 3> bits, Basis basis = Basis::HV) {
    std::array<std::pair<cplx, cplx>, 3> q;
    for (std::size_t i = 0; i < 3; ++i) {
        q[i] = bits[i] ? std::pair<cplx, cplx>{0, 1} : std::pair<cplx, cplx>{1, 0};
    }
    return three_qubit_parity_circuit(q, basis);
}

// ---------------------------------------------------------------------------
// Elaboration.

struct ElaborationError : std::runtime_error {
    std::size_t line = 0;

    ElaborationError(std::size_t line_no, const std::string &msg)
        : std::runtime_error(line_no ? "line " + std::to_string(line_no) + ": " + msg : msg), line(line_no) {
    }
};

struct ElaborateOptions {
    /// Transmission of every gate-input connection; 1 means ideal wires.
    double connection_transmission = 1.0;
    unsigned photon_cap = FockState::kDefaultPhotonCap;
};

struct PrepareQubit {
    QubitSlot slot;
    cplx alpha;
    cplx beta;
};

struct PrepareBell {
    QubitSlot first;
    QubitSlot second;
};

struct ElementStep {
    ElementSpec spec;
};

/// A gate placed in the circuit. Local mode m of `gate` is global mode
/// mode_map[m]; Bell ancillas of the gate are part of the program's
/// preparations.
struct GateStep {
    std::string label;
    GateDefinition gate;
    std::vector<std::size_t> mode_map;

    QubitSlot global(const QubitSlot &local) const {
        return {mode_map.at(local.h_mode), mode_map.at(local.v_mode)};
    }
};

struct DetectStep {
    QubitSlot slot;
    std::optional<Rail> rail;
    Basis basis = Basis::HV;
    unsigned count = 0;
};

struct MeasureStep {
    std::string label;
    QubitSlot slot;
    Basis basis = Basis::HV;
};

using ProgramStep = std::variant<ElementStep, GateStep, DetectStep>;

struct CircuitProgram {
    std::size_t mode_count = 0;
    unsigned photon_cap = FockState::kDefaultPhotonCap;
    /// Every label ever declared, consumed or not.
    std::map<std::string, QubitSlot> mode_table;
    std::vector<PrepareQubit> qubits;
    std::vector<PrepareBell> bells;
    std::vector<ProgramStep> steps;
    std::vector<MeasureStep> measurements;

    std::size_t gate_count() const {
        return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const ProgramStep &s) {
            return std::holds_alternative<GateStep>(s);
        }));
    }
};

namespace detail {

struct GateArity {
    std::size_t inputs;
    std::size_t outputs;
};

inline std::optional<GateArity> gate_arity(std::string_view name) {
    if (name == "parity_check" || name == "xor") {
        return GateArity{2, 1};
    }
    if (name == "encoder") {
        return GateArity{1, 2};
    }
    if (name == "cnot") {
        return GateArity{2, 2};
    }
    return std::nullopt;
}

}  // namespace detail

/// Allocates modes (two per qubit label, plus fresh modes for gate ancillas),
/// expands named gates with their derived correction tables, and enforces that
/// consumed qubits are never referenced again.
inline CircuitProgram elaborate(const CircuitAst &ast, const ElaborateOptions &options = {}) {
    CircuitProgram prog;
    prog.photon_cap = options.photon_cap;
    std::set<std::string> live;
    std::map<std::string, std::size_t> consumed_at;
    std::map<std::string, GateDefinition> gate_cache;

    auto line_of = [&](std::size_t i) {
        return i < ast.lines.size() ? ast.lines[i] : 0;
    };
    auto fresh_slot = [&]() {
        QubitSlot s{prog.mode_count, prog.mode_count + 1};
        prog.mode_count += 2;
        return s;
    };
    auto declare = [&](const std::string &label, const QubitSlot &slot, std::size_t line) {
        if (prog.mode_table.contains(label)) {
            throw ElaborationError(line, "label '" + label + "' is already declared");
        }
        prog.mode_table[label] = slot;
        live.insert(label);
    };
    auto use = [&](const std::string &label, std::size_t line) -> QubitSlot {
        auto it = prog.mode_table.find(label);
        if (it == prog.mode_table.end()) {
            throw ElaborationError(line, "label '" + label + "' is not declared");
        }
        if (!live.contains(label)) {
            throw ElaborationError(
                line, "qubit '" + label + "' was already consumed (line " + std::to_string(consumed_at[label]) + ")");
        }
        return it->second;
    };
    auto consume = [&](const std::string &label, std::size_t line) {
        live.erase(label);
        consumed_at[label] = line;
    };
    auto mode_of = [&](const ModeRef &r, std::size_t line) {
        QubitSlot s = use(r.label, line);
        return r.rail == Rail::V ? s.v_mode : s.h_mode;
    };

    for (std::size_t i = 0; i < ast.statements.size(); ++i) {
        const std::size_t line = line_of(i);
        std::visit(
            [&](const auto &s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, QubitStmt>) {
                    QubitSlot slot = fresh_slot();
                    declare(s.label, slot, line);
                    prog.qubits.push_back({slot, s.alpha, s.beta});
                } else if constexpr (std::is_same_v<T, BellStmt>) {
                    QubitSlot a = fresh_slot(), b = fresh_slot();
                    declare(s.first, a, line);
                    declare(s.second, b, line);
                    prog.bells.push_back({a, b});
                } else if constexpr (std::is_same_v<T, ElementStmt>) {
                    ElementSpec spec{s.kind, s.parameter, {}};
                    for (const auto &t : s.targets) {
                        if (t.rail) {
                            spec.targets.push_back(mode_of(t, line));
                        } else {
                            QubitSlot q = use(t.label, line);
                            spec.targets.push_back(q.h_mode);
                            spec.targets.push_back(q.v_mode);
                        }
                    }
                    try {
                        validate(spec);
                    } catch (const std::exception &e) {
                        throw ElaborationError(line, e.what());
                    }
                    prog.steps.push_back(ElementStep{std::move(spec)});
                } else if constexpr (std::is_same_v<T, GateStmt>) {
                    auto arity = detail::gate_arity(s.name);
                    if (!arity) {
                        throw ElaborationError(line, "unknown gate '" + s.name + "' (parity_check|xor|encoder|cnot)");
                    }
                    if (s.inputs.size() != arity->inputs || s.outputs.size() != arity->outputs) {
                        throw ElaborationError(
                            line, "gate '" + s.name + "' takes " + std::to_string(arity->inputs) + " inputs and " +
                                      std::to_string(arity->outputs) + " outputs");
                    }
                    std::set<std::string> distinct(s.inputs.begin(), s.inputs.end());
                    if (distinct.size() != s.inputs.size()) {
                        throw ElaborationError(line, "gate '" + s.name + "' uses the same qubit twice");
                    }
                    auto cached = gate_cache.find(s.name);
                    if (cached == gate_cache.end()) {
                        cached = gate_cache.emplace(s.name, build_gate(s.name)).first;
                    }
                    GateStep step;
                    step.label = s.name;
                    step.gate = cached->second;
                    step.mode_map.assign(step.gate.mode_count, SIZE_MAX);
                    std::vector<QubitSlot> in_slots;
                    for (const auto &label : s.inputs) {
                        in_slots.push_back(use(label, line));
                    }
                    for (std::size_t k = 0; k < in_slots.size(); ++k) {
                        if (options.connection_transmission < 1.0) {
                            prog.steps.push_back(
                                ElementStep{loss_channel(options.connection_transmission, in_slots[k].h_mode)});
                            prog.steps.push_back(
                                ElementStep{loss_channel(options.connection_transmission, in_slots[k].v_mode)});
                        }
                        step.mode_map[step.gate.inputs[k].h_mode] = in_slots[k].h_mode;
                        step.mode_map[step.gate.inputs[k].v_mode] = in_slots[k].v_mode;
                    }
                    for (std::size_t m = 0; m < step.mode_map.size(); ++m) {
                        if (step.mode_map[m] == SIZE_MAX) {
                            step.mode_map[m] = prog.mode_count++;
                        }
                    }
                    for (const auto &pair : step.gate.bell_ancillas) {
                        prog.bells.push_back({step.global(pair.first), step.global(pair.second)});
                    }
                    for (const auto &label : s.inputs) {
                        consume(label, line);
                    }
                    for (std::size_t k = 0; k < s.outputs.size(); ++k) {
                        declare(s.outputs[k], step.global(step.gate.outputs[k]), line);
                    }
                    prog.steps.push_back(std::move(step));
                } else if constexpr (std::is_same_v<T, DetectStmt>) {
                    QubitSlot q = use(s.target.label, line);
                    consume(s.target.label, line);
                    prog.steps.push_back(DetectStep{q, s.target.rail, s.basis, s.count});
                } else {
                    QubitSlot q = use(s.label, line);
                    consume(s.label, line);
                    prog.measurements.push_back({s.label, q, s.basis});
                }
            },
            ast.statements[i]);
    }
    return prog;
}

// ---------------------------------------------------------------------------
// Execution.

struct CircuitReport {
    double acceptance_probability = 0;
    /// Measured bit strings (measurement order) with probabilities conditioned
    /// on every gate and detection succeeding. 'x' marks a slot that did not
    /// hold exactly one photon.
    std::vector<std::pair<std::string, double>> outputs;
    /// Success probability of each gate, conditioned on everything before it.
    std::vector<double> per_gate_acceptance;
};

namespace detail {

inline FockState initial_state(const CircuitProgram &prog) {
    FockState s = make_basis_state(Occupation(prog.mode_count, 0), prog.photon_cap);
    for (const auto &q : prog.qubits) {
        s = merge_disjoint(s, encode_qubit(q.alpha, q.beta, q.slot, prog.mode_count, prog.photon_cap));
    }
    for (const auto &b : prog.bells) {
        s = merge_disjoint(s, make_bell_ancilla(b.first, b.second, prog.mode_count, prog.photon_cap));
    }
    return s;
}

inline FockState apply_gate_step(const FockState &state, const GateStep &step) {
    FockState s = state;
    for (const auto &e : step.gate.elements) {
        ElementSpec global = e;
        for (auto &t : global.targets) {
            t = step.mode_map.at(t);
        }
        s = apply_element(s, global);
    }
    std::vector<std::size_t> detectors;
    for (std::size_t m : step.gate.detector_modes) {
        detectors.push_back(step.mode_map.at(m));
    }
    FockState out(s.mode_count(), s.photon_cap());
    for (const auto &pattern : step.gate.accepted) {
        FockState branch = postselect(s, detectors, pattern.counts);
        if (branch.is_zero()) {
            continue;
        }
        if (step.gate.corrections) {
            auto it = step.gate.corrections->find(pattern);
            if (it != step.gate.corrections->end() && !it->second.empty()) {
                std::vector<PauliCorrection> global;
                for (const auto &c : it->second) {
                    global.push_back({step.global(c.target), c.op});
                }
                branch = apply_pauli_rails(branch, global, branch.mode_count());
            }
        }
        out += branch;
    }
    if (step.gate.detector_modes.empty()) {
        return s;
    }
    return out;
}

inline FockState apply_detect_step(const FockState &state, const DetectStep &step) {
    FockState s = rotate_to_analyzer(state, step.slot, basis_angle(step.basis));
    FockState out(s.mode_count(), s.photon_cap());
    for (const auto &[occ, amp] : s.terms()) {
        unsigned n = !step.rail                ? occ[step.slot.h_mode] + occ[step.slot.v_mode]
                     : *step.rail == Rail::H ? occ[step.slot.h_mode]
                                             : occ[step.slot.v_mode];
        if (n == step.count) {
            out.add(occ, amp);
        }
    }
    return out;
}

}  // namespace detail

/// Exact amplitude-level run. Every detector pattern is enumerated; nothing is
/// sampled, so `seed` has no effect and exists for interface symmetry with
/// the randomized commands.
inline CircuitReport run_circuit(const CircuitProgram &prog, std::optional<std::uint64_t> seed = std::nullopt) {
    (void)seed;
    CircuitReport report;
    FockState state = detail::initial_state(prog);
    double acceptance = 1.0;
    for (const auto &step : prog.steps) {
        if (acceptance == 0) {
            if (std::holds_alternative<GateStep>(step)) {
                report.per_gate_acceptance.push_back(0);
            }
            continue;
        }
        double before = state.norm_squared();
        std::visit(
            [&](const auto &st) {
                using T = std::decay_t<decltype(st)>;
                if constexpr (std::is_same_v<T, ElementStep>) {
                    state = apply_element(state, st.spec);
                } else if constexpr (std::is_same_v<T, GateStep>) {
                    state = detail::apply_gate_step(state, st);
                } else {
                    state = detail::apply_detect_step(state, st);
                }
            },
            step);
        double p = state.norm_squared() / before;
        if (std::holds_alternative<GateStep>(step)) {
            report.per_gate_acceptance.push_back(p);
        }
        acceptance *= p;
        if (state.is_zero()) {
            acceptance = 0;
        } else {
            state = state.normalized();
        }
    }
    report.acceptance_probability = acceptance;
    if (acceptance == 0 || prog.measurements.empty()) {
        return report;
    }
    std::vector<QubitSlot> slots;
    std::vector<double> angles;
    for (const auto &m : prog.measurements) {
        slots.push_back(m.slot);
        angles.push_back(basis_angle(m.basis));
    }
    auto dist = joint_logical_distribution(state, slots, angles, 0, true);
    for (std::size_t v = 0; v < (std::size_t{1} << slots.size()); ++v) {
        dist.try_emplace(bit_label(v, slots.size()), 0.0);
    }
    double total = 0;
    for (const auto &[k, p] : dist) {
        total += p;
    }
    for (const auto &[k, p] : dist) {
        report.outputs.emplace_back(k, p / total);
    }
    return report;
}

}  // namespace loqc
