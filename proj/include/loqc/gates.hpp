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

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "loqc/fock.hpp"
#include "loqc/measurement.hpp"
#include "loqc/optics.hpp"

namespace loqc {

/// Rotation that turns the H/V basis into the diagonal basis. As a polarization
/// rotation this is pi/4, which a half-wave plate produces at pi/8.
inline constexpr double kDiagonalRotation = std::numbers::pi / 4;

struct BellAncilla {
    QubitSlot first;
    QubitSlot second;
};

using CorrectionTable = std::map<DetectionPattern, std::vector<PauliCorrection>>;

/// A post-selected linear-optics gate on dual-rail qubits.
///
/// All mode indices are local to the gate (0..mode_count). Detector modes are
/// counted after every element has been applied, so analyzer rotations are part
/// of `elements`. `ideal` is the target linear map from the 2^inputs logical
/// input space to the 2^outputs logical output space (bit 0 of a basis label
/// is the last slot); only its direction matters.
struct GateDefinition {
    std::string name;
    std::size_t mode_count = 0;
    std::vector<QubitSlot> inputs;
    std::vector<QubitSlot> outputs;
    std::vector<BellAncilla> bell_ancillas;
    std::vector<ElementSpec> elements;
    std::vector<std::size_t> detector_modes;
    std::vector<DetectionPattern> accepted;
    std::optional<CorrectionTable> corrections;
    ComplexMatrix ideal;
    /// Photons that receive their own temporal mode when overlap < 1. Bell
    /// ancilla photons define the shared reference mode.
    std::vector<QubitSlot> interfering;
};

/// Thrown when no Pauli correction makes an accepted outcome match the ideal gate.
struct NoValidCorrection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string bit_label(std::size_t value, std::size_t bits) {
    std::string s(bits, '0');
    for (std::size_t i = 0; i < bits; ++i) {
        if ((value >> (bits - 1 - i)) & 1) {
            s[i] = '1';
        }
    }
    return s;
}

/// Logical input state on the gate's input slots (ancilla modes left empty).
/// `amplitudes` has one entry per logical basis state, first slot most significant.
inline FockState logical_input(const GateDefinition &gate, std::span<const cplx> amplitudes) {
    const std::size_t k = gate.inputs.size();
    if (amplitudes.size() != (std::size_t{1} << k)) {
        throw std::invalid_argument("logical input needs 2^inputs amplitudes");
    }
    FockState s(gate.mode_count);
    for (std::size_t x = 0; x < amplitudes.size(); ++x) {
        Occupation occ(gate.mode_count, 0);
        for (std::size_t i = 0; i < k; ++i) {
            bool one = (x >> (k - 1 - i)) & 1;
            occ[one ? gate.inputs[i].v_mode : gate.inputs[i].h_mode] = 1;
        }
        s.add(occ, amplitudes[x]);
    }
    s.prune();
    return s.normalized();
}

inline FockState basis_input(const GateDefinition &gate, std::size_t x) {
    std::vector<cplx> amps(std::size_t{1} << gate.inputs.size());
    amps.at(x) = 1.0;
    return logical_input(gate, amps);
}

/// Product of single-qubit states (alpha, beta) on the input slots.
inline FockState product_input(const GateDefinition &gate, std::span<const std::pair<cplx, cplx>> qubits) {
    if (qubits.size() != gate.inputs.size()) {
        throw std::invalid_argument("product_input needs one qubit per gate input");
    }
    std::vector<cplx> amps(std::size_t{1} << qubits.size(), 1.0);
    for (std::size_t x = 0; x < amps.size(); ++x) {
        for (std::size_t i = 0; i < qubits.size(); ++i) {
            bool one = (x >> (qubits.size() - 1 - i)) & 1;
            amps[x] *= one ? qubits[i].second : qubits[i].first;
        }
    }
    return logical_input(gate, amps);
}

/// Ideal output vector K|psi> for a logical input amplitude vector.
inline std::vector<cplx> ideal_output(const GateDefinition &gate, std::span<const cplx> amplitudes) {
    std::vector<cplx> out(gate.ideal.rows());
    for (std::size_t y = 0; y < gate.ideal.rows(); ++y) {
        for (std::size_t x = 0; x < gate.ideal.cols(); ++x) {
            out[y] += gate.ideal(y, x) * amplitudes[x];
        }
    }
    return out;
}

/// One detector outcome of a gate run. `state` is the unnormalized branch on
/// all modes (detector modes included) after any correction.
struct GateBranch {
    DetectionPattern pattern;
    FockState state;
    bool accepted = false;
    double probability = 0;
};

struct GateEvolution {
    std::size_t layer_width = 0;
    std::vector<GateBranch> branches;

    double acceptance() const {
        double p = 0;
        for (const auto &b : branches) {
            p += b.accepted ? b.probability : 0.0;
        }
        return p;
    }
};

namespace detail {

inline FockState ancilla_state(const GateDefinition &gate, unsigned photon_cap) {
    FockState s = make_basis_state(Occupation(gate.mode_count, 0), photon_cap);
    for (const auto &pair : gate.bell_ancillas) {
        s = merge_disjoint(s, make_bell_ancilla(pair.first, pair.second, gate.mode_count, photon_cap));
    }
    return s;
}

/// Corrections that tolerate non-logical occupancy: X swaps the rails, Z is
/// (-1)^(photons in V). They agree with apply_feedforward on valid qubits.
inline FockState apply_pauli_rails(
    const FockState &state, std::span<const PauliCorrection> corrections, std::size_t layer_width) {
    std::size_t layers = state.mode_count() / layer_width;
    FockState out(state.mode_count(), state.photon_cap());
    for (const auto &[occ, amp] : state.terms()) {
        Occupation next = occ;
        cplx a = amp;
        for (const auto &c : corrections) {
            bool z = c.op == PauliOp::Z || c.op == PauliOp::XZ;
            bool x = c.op == PauliOp::X || c.op == PauliOp::XZ;
            if (z && (layered_count(next, c.target.v_mode, layer_width) & 1)) {
                a = -a;
            }
            if (x) {
                for (std::size_t l = 0; l < layers; ++l) {
                    std::swap(next[l * layer_width + c.target.h_mode], next[l * layer_width + c.target.v_mode]);
                }
            }
        }
        out.add(next, a);
    }
    out.prune();
    return out;
}

}  // namespace detail

/// Runs the gate on `input` (photons in input slots only; mode_count must match
/// the gate). Bell ancillas are added, interfering photons are given temporal
/// overlap `overlap` with the ancilla reference mode, every element is applied,
/// and the result is split by detector outcome. Accepted branches receive their
/// correction when the gate has a table and apply_corrections is set.
inline GateEvolution run_gate(
    const GateDefinition &gate, const FockState &input, double overlap = 1.0, bool apply_corrections = true) {
    if (input.mode_count() != gate.mode_count) {
        throw std::invalid_argument(
            "input has " + std::to_string(input.mode_count()) + " modes, gate '" + gate.name + "' has " +
            std::to_string(gate.mode_count));
    }
    const std::size_t width = gate.mode_count;
    FockState state = merge_disjoint(input, detail::ancilla_state(gate, input.photon_cap()));
    const double input_norm = state.norm_squared();
    for (const auto &slot : gate.interfering) {
        state = make_distinguishable(state, slot, overlap, width);
    }
    ModeUnitary total = ModeUnitary::identity(width);
    for (const auto &e : gate.elements) {
        if (e.kind == ElementKind::LossChannel && e.targets.size() == 1) {
            throw std::invalid_argument("gate elements must give loss channels an explicit environment mode");
        }
        total = embed(element_unitary(e), e.targets, width) * total;
    }
    state = evolve(state, replicate_layers(total, state.mode_count() / width));

    std::map<std::vector<unsigned>, FockState> groups;
    for (const auto &[occ, amp] : state.terms()) {
        std::vector<unsigned> counts;
        counts.reserve(gate.detector_modes.size());
        for (std::size_t m : gate.detector_modes) {
            counts.push_back(detail::layered_count(occ, m, width));
        }
        auto [it, fresh] = groups.try_emplace(counts, state.mode_count(), state.photon_cap());
        it->second.add(occ, amp);
    }

    GateEvolution result;
    result.layer_width = width;
    for (auto &[counts, branch_state] : groups) {
        GateBranch b;
        b.pattern = exact_pattern(counts);
        b.accepted = gate.detector_modes.empty() ||
                     std::find(gate.accepted.begin(), gate.accepted.end(), b.pattern) != gate.accepted.end();
        b.state = std::move(branch_state);
        if (b.accepted && apply_corrections && gate.corrections) {
            auto it = gate.corrections->find(b.pattern);
            if (it != gate.corrections->end() && !it->second.empty()) {
                b.state = detail::apply_pauli_rails(b.state, it->second, width);
            }
        }
        b.probability = b.state.norm_squared() / input_norm;
        result.branches.push_back(std::move(b));
    }
    return result;
}

/// Output-slot amplitudes of a branch, split by everything else in the term
/// (detector photons, temporal layer of each output photon, other modes).
/// Terms where an output slot does not hold exactly one photon go to
/// invalid_weight.
struct LogicalComponents {
    std::map<Occupation, std::vector<cplx>> by_rest;
    double invalid_weight = 0;

    double valid_weight() const {
        double w = 0;
        for (const auto &[rest, v] : by_rest) {
            for (cplx a : v) {
                w += std::norm(a);
            }
        }
        return w;
    }
};

inline LogicalComponents logical_components(
    const FockState &state, std::span<const QubitSlot> outputs, std::size_t layer_width) {
    const std::size_t dim = std::size_t{1} << outputs.size();
    const std::size_t layers = state.mode_count() / layer_width;
    LogicalComponents lc;
    for (const auto &[occ, amp] : state.terms()) {
        Occupation rest = occ;
        std::size_t value = 0;
        bool valid = true;
        for (const auto &slot : outputs) {
            unsigned h = detail::layered_count(occ, slot.h_mode, layer_width);
            unsigned v = detail::layered_count(occ, slot.v_mode, layer_width);
            if (h + v != 1) {
                valid = false;
                break;
            }
            value = (value << 1) | v;
            for (std::size_t l = 0; l < layers; ++l) {
                std::size_t hm = l * layer_width + slot.h_mode;
                std::size_t vm = l * layer_width + slot.v_mode;
                rest[hm] += rest[vm];
                rest[vm] = 0;
            }
        }
        if (!valid) {
            lc.invalid_weight += std::norm(amp);
            continue;
        }
        auto [it, fresh] = lc.by_rest.try_emplace(rest, dim);
        it->second[value] += amp;
    }
    return lc;
}

/// Fidelity of a (possibly mixed, via the rest label) output against the pure
/// target vector. Invalid weight counts as infidelity.
inline double state_fidelity(const LogicalComponents &lc, std::span<const cplx> target) {
    double tn = 0;
    for (cplx t : target) {
        tn += std::norm(t);
    }
    double total = lc.valid_weight() + lc.invalid_weight;
    if (tn == 0 || total == 0) {
        return 0;
    }
    double overlap = 0;
    for (const auto &[rest, v] : lc.by_rest) {
        cplx ip{};
        for (std::size_t y = 0; y < v.size(); ++y) {
            ip += std::conj(target[y]) * v[y];
        }
        overlap += std::norm(ip);
    }
    return overlap / (tn * total);
}

/// Process fidelity of the operation described by per-basis-input outputs
/// against the ideal map K: sum_k |<K, A_k>|^2 / (|K|^2 sum_k |A_k|^2), where
/// A_k collects, for each rest label k, the output amplitudes column by
/// column. Equals 1 exactly when every A_k is proportional to K.
inline double process_fidelity(const std::vector<LogicalComponents> &per_input, const ComplexMatrix &ideal) {
    double k_norm = 0;
    for (std::size_t y = 0; y < ideal.rows(); ++y) {
        for (std::size_t x = 0; x < ideal.cols(); ++x) {
            k_norm += std::norm(ideal(y, x));
        }
    }
    std::map<Occupation, cplx> overlaps;
    double a_norm = 0;
    for (std::size_t x = 0; x < per_input.size(); ++x) {
        a_norm += per_input[x].invalid_weight;
        for (const auto &[rest, v] : per_input[x].by_rest) {
            cplx &ov = overlaps[rest];
            for (std::size_t y = 0; y < v.size(); ++y) {
                ov += std::conj(ideal(y, x)) * v[y];
                a_norm += std::norm(v[y]);
            }
        }
    }
    if (k_norm == 0 || a_norm == 0) {
        return 0;
    }
    double num = 0;
    for (const auto &[rest, ov] : overlaps) {
        num += std::norm(ov);
    }
    return num / (k_norm * a_norm);
}

inline constexpr double kCorrectionFidelityTolerance = 1e-9;

namespace detail {

/// The two superposition probes used next to the basis inputs: |+> on the first
/// input with |0> elsewhere, and (|0> + i|1>)/sqrt(2) on every input.
inline std::vector<std::vector<cplx>> superposition_probes(std::size_t inputs) {
    const std::size_t dim = std::size_t{1} << inputs;
    std::vector<cplx> plus_first(dim), circular(dim, 1.0);
    plus_first[0] = plus_first[std::size_t{1} << (inputs - 1)] = 1.0;
    for (std::size_t x = 0; x < dim; ++x) {
        for (std::size_t i = 0; i < inputs; ++i) {
            if ((x >> i) & 1) {
                circular[x] *= cplx{0, 1};
            }
        }
    }
    return {plus_first, circular};
}

inline std::vector<std::vector<PauliOp>> correction_candidates(std::size_t outputs) {
    std::vector<std::vector<PauliOp>> all{{}};
    for (std::size_t i = 0; i < outputs; ++i) {
        std::vector<std::vector<PauliOp>> next;
        for (const auto &prefix : all) {
            for (PauliOp op : {PauliOp::I, PauliOp::X, PauliOp::Z, PauliOp::XZ}) {
                auto c = prefix;
                c.push_back(op);
                next.push_back(std::move(c));
            }
        }
        all = std::move(next);
    }
    std::stable_sort(all.begin(), all.end(), [](const auto &a, const auto &b) {
        auto weight = [](const std::vector<PauliOp> &ops) {
            return std::count_if(ops.begin(), ops.end(), [](PauliOp op) {
                return op != PauliOp::I;
            });
        };
        return weight(a) < weight(b);
    });
    return all;
}

inline const GateBranch *find_branch(const GateEvolution &ev, const DetectionPattern &p) {
    for (const auto &b : ev.branches) {
        if (b.pattern == p) {
            return &b;
        }
    }
    return nullptr;
}

}  // namespace detail

/// Fills in the correction table by brute force: for each accepted pattern the
/// least-weight Pauli assignment over the output qubits whose corrected branch
/// has process fidelity 1 on the basis inputs and state fidelity 1 on the two
/// superposition probes. Throws NoValidCorrection otherwise.
inline GateDefinition derive_correction_table(GateDefinition gate) {
    gate.corrections.reset();
    CorrectionTable table;
    if (gate.detector_modes.empty()) {
        gate.corrections = table;
        return gate;
    }
    const std::size_t dim_in = std::size_t{1} << gate.inputs.size();
    std::vector<GateEvolution> basis_runs;
    for (std::size_t x = 0; x < dim_in; ++x) {
        basis_runs.push_back(run_gate(gate, basis_input(gate, x)));
    }
    auto probes = detail::superposition_probes(gate.inputs.size());
    std::vector<GateEvolution> probe_runs;
    for (const auto &p : probes) {
        probe_runs.push_back(run_gate(gate, logical_input(gate, p)));
    }
    const std::size_t width = gate.mode_count;
    auto corrected = [&](const GateBranch *b, const std::vector<PauliCorrection> &c) {
        if (!b) {
            return LogicalComponents{};
        }
        return logical_components(detail::apply_pauli_rails(b->state, c, width), gate.outputs, width);
    };

    for (const auto &pattern : gate.accepted) {
        bool occurs = false;
        for (const auto &run : basis_runs) {
            const GateBranch *b = detail::find_branch(run, pattern);
            occurs = occurs || (b && b->probability > 0);
        }
        if (!occurs) {
            throw NoValidCorrection(
                "gate '" + gate.name + "': accepted pattern [" + to_string(pattern) + "] never occurs");
        }
        bool found = false;
        for (const auto &ops : detail::correction_candidates(gate.outputs.size())) {
            std::vector<PauliCorrection> c;
            for (std::size_t i = 0; i < ops.size(); ++i) {
                if (ops[i] != PauliOp::I) {
                    c.push_back({gate.outputs[i], ops[i]});
                }
            }
            std::vector<LogicalComponents> per_input;
            for (const auto &run : basis_runs) {
                per_input.push_back(corrected(detail::find_branch(run, pattern), c));
            }
            if (process_fidelity(per_input, gate.ideal) < 1 - kCorrectionFidelityTolerance) {
                continue;
            }
            bool probes_ok = true;
            for (std::size_t p = 0; p < probes.size() && probes_ok; ++p) {
                std::vector<cplx> target = ideal_output(gate, probes[p]);
                LogicalComponents lc = corrected(detail::find_branch(probe_runs[p], pattern), c);
                if (lc.valid_weight() + lc.invalid_weight == 0) {
                    continue;
                }
                probes_ok = state_fidelity(lc, target) >= 1 - kCorrectionFidelityTolerance;
            }
            if (probes_ok) {
                table[pattern] = std::move(c);
                found = true;
                break;
            }
        }
        if (!found) {
            throw NoValidCorrection(
                "gate '" + gate.name + "': no Pauli correction reaches fidelity 1 for pattern [" +
                to_string(pattern) + "]");
        }
    }
    gate.corrections = std::move(table);
    return gate;
}

// ---------------------------------------------------------------------------
// Gate constructions. Slot i of a layout uses modes (2i, 2i+1). The `swap_*`
// flags choose which PBS output port carries the detector; builders try every
// assignment and keep the first one whose correction table derives cleanly.

namespace detail {

inline QubitSlot slot(std::size_t i) {
    return {2 * i, 2 * i + 1};
}

inline std::vector<DetectionPattern> one_photon_patterns(std::size_t ports) {
    std::vector<DetectionPattern> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << ports); ++mask) {
        std::vector<unsigned> counts;
        for (std::size_t p = 0; p < ports; ++p) {
            bool second = (mask >> (ports - 1 - p)) & 1;
            counts.push_back(second ? 0 : 1);
            counts.push_back(second ? 1 : 0);
        }
        out.push_back(exact_pattern(counts));
    }
    return out;
}

template <typename Layout>
GateDefinition first_consistent_assignment(Layout layout, int assignments) {
    std::string failures;
    for (int a = 0; a < assignments; ++a) {
        try {
            return derive_correction_table(layout(a));
        } catch (const NoValidCorrection &e) {
            failures += std::string("\n  assignment ") + std::to_string(a) + ": " + e.what();
        }
    }
    throw NoValidCorrection("no detector port assignment yields a valid correction table:" + failures);
}

}  // namespace detail

/// Two-qubit parity check without a correction table. Both inputs meet at a
/// PBS; one output port is analyzed in the diagonal basis and must hold exactly
/// one photon, which keeps only the equal-value components.
inline GateDefinition parity_check_layout(bool swap_ports = false) {
    GateDefinition g;
    g.name = "parity_check";
    g.mode_count = 4;
    QubitSlot a = detail::slot(0), b = detail::slot(1);
    QubitSlot detected = swap_ports ? a : b;
    QubitSlot kept = swap_ports ? b : a;
    g.inputs = {a, b};
    g.outputs = {kept};
    g.elements = {polarizing_beam_splitter(a, b), polarization_rotator(-kDiagonalRotation, detected)};
    g.detector_modes = {detected.h_mode, detected.v_mode};
    g.accepted = detail::one_photon_patterns(1);
    g.ideal = ComplexMatrix(2, 4);
    g.ideal(0, 0) = 1;  // |00> -> |0>
    g.ideal(1, 3) = 1;  // |11> -> |1>
    g.interfering = {b};
    return g;
}

/// Destructive XOR (control first, target second): both photons are rotated
/// into the diagonal basis, meet at a PBS and are rotated back. The control
/// port is detected in H/V; the remaining photon carries control XOR target.
inline GateDefinition destructive_xor_layout(bool swap_ports = false) {
    GateDefinition g;
    g.name = "xor";
    g.mode_count = 4;
    QubitSlot control = detail::slot(0), target = detail::slot(1);
    QubitSlot detected = swap_ports ? target : control;
    QubitSlot kept = swap_ports ? control : target;
    g.inputs = {control, target};
    g.outputs = {kept};
    g.elements = {
        polarization_rotator(kDiagonalRotation, control),
        polarization_rotator(kDiagonalRotation, target),
        polarizing_beam_splitter(target, control),
        polarization_rotator(-kDiagonalRotation, target),
        polarization_rotator(-kDiagonalRotation, control),
    };
    g.detector_modes = {detected.h_mode, detected.v_mode};
    g.accepted = detail::one_photon_patterns(1);
    g.ideal = ComplexMatrix(2, 4);
    for (std::size_t x = 0; x < 4; ++x) {
        g.ideal((x >> 1) ^ (x & 1), x) = 1;
    }
    g.interfering = {control};
    return g;
}

/// Encoder: the input qubit and one photon of a Bell pair meet at a PBS; one
/// port is analyzed in the diagonal basis. Output is (input port, twin photon).
inline GateDefinition encoder_layout(bool swap_ports = false) {
    GateDefinition g;
    g.name = "encoder";
    g.mode_count = 6;
    QubitSlot in = detail::slot(0), pair_a = detail::slot(1), pair_b = detail::slot(2);
    QubitSlot detected = swap_ports ? in : pair_a;
    QubitSlot kept = swap_ports ? pair_a : in;
    g.inputs = {in};
    g.outputs = {kept, pair_b};
    g.bell_ancillas = {{pair_a, pair_b}};
    g.elements = {polarizing_beam_splitter(in, pair_a), polarization_rotator(-kDiagonalRotation, detected)};
    g.detector_modes = {detected.h_mode, detected.v_mode};
    g.accepted = detail::one_photon_patterns(1);
    g.ideal = ComplexMatrix(4, 2);
    g.ideal(0, 0) = 1;  // |0> -> |00>
    g.ideal(3, 1) = 1;  // |1> -> |11>
    g.interfering = {in};
    return g;
}

/// CNOT from two PBSs and a Bell ancilla pair. The control and the first
/// ancilla photon form an encoder (detector D1, diagonal analyzer); the second
/// ancilla photon and the target form a destructive XOR (detector D2, H/V after
/// the back-rotation). Succeeds when D1 and D2 each see exactly one photon.
inline GateDefinition pbs_cnot_layout(bool swap_encoder_ports = false, bool swap_xor_ports = false) {
    GateDefinition g;
    g.name = "cnot";
    g.mode_count = 8;
    QubitSlot control = detail::slot(0), target = detail::slot(1);
    QubitSlot anc1 = detail::slot(2), anc2 = detail::slot(3);
    QubitSlot d1 = swap_encoder_ports ? control : anc1;
    QubitSlot out_control = swap_encoder_ports ? anc1 : control;
    QubitSlot d2 = swap_xor_ports ? target : anc2;
    QubitSlot out_target = swap_xor_ports ? anc2 : target;
    g.inputs = {control, target};
    g.outputs = {out_control, out_target};
    g.bell_ancillas = {{anc1, anc2}};
    g.elements = {
        polarizing_beam_splitter(control, anc1),
        polarization_rotator(-kDiagonalRotation, d1),
        polarization_rotator(kDiagonalRotation, anc2),
        polarization_rotator(kDiagonalRotation, target),
        polarizing_beam_splitter(target, anc2),
        polarization_rotator(-kDiagonalRotation, target),
        polarization_rotator(-kDiagonalRotation, anc2),
    };
    g.detector_modes = {d1.h_mode, d1.v_mode, d2.h_mode, d2.v_mode};
    g.accepted = detail::one_photon_patterns(2);
    g.ideal = ComplexMatrix(4, 4);
    for (std::size_t x = 0; x < 4; ++x) {
        std::size_t c = x >> 1, t = x & 1;
        g.ideal((c << 1) | (t ^ c), x) = 1;
    }
    g.interfering = {control, target};
    return g;
}

/// k wires, no elements and no detectors.
inline GateDefinition identity_layout(std::size_t wires = 1) {
    GateDefinition g;
    g.name = "identity";
    g.mode_count = 2 * wires;
    for (std::size_t i = 0; i < wires; ++i) {
        g.inputs.push_back(detail::slot(i));
    }
    g.outputs = g.inputs;
    g.ideal = ComplexMatrix::identity(std::size_t{1} << wires);
    return g;
}

inline GateDefinition build_parity_check() {
    return detail::first_consistent_assignment(
        [](int a) {
            return parity_check_layout(a == 1);
        },
        2);
}

inline GateDefinition build_destructive_xor() {
    return detail::first_consistent_assignment(
        [](int a) {
            return destructive_xor_layout(a == 1);
        },
        2);
}

inline GateDefinition build_encoder() {
    return detail::first_consistent_assignment(
        [](int a) {
            return encoder_layout(a == 1);
        },
        2);
}

inline GateDefinition build_pbs_cnot() {
    return detail::first_consistent_assignment(
        [](int a) {
            return pbs_cnot_layout((a & 1) != 0, (a & 2) != 0);
        },
        4);
}

inline const std::vector<std::string> &gate_names() {
    static const std::vector<std::string> names{"parity_check", "xor", "encoder", "cnot"};
    return names;
}

/// Builds a gate by its circuit-file name.
inline GateDefinition build_gate(std::string_view name) {
    if (name == "parity_check") {
        return build_parity_check();
    }
    if (name == "xor") {
        return build_destructive_xor();
    }
    if (name == "encoder") {
        return build_encoder();
    }
    if (name == "cnot") {
        return build_pbs_cnot();
    }
    throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Outcome classification and truth tables.

struct PatternOutcome {
    DetectionPattern pattern;
    double probability = 0;
    OutcomeClass outcome;
};

struct OutcomeDistribution {
    double accept = 0;
    double correctable = 0;
    double fail = 0;
    std::vector<PatternOutcome> patterns;

    /// Probability the gate signals success, corrected or not.
    double success() const {
        return accept + correctable;
    }
};

inline OutcomeDistribution classify_outcomes(const GateDefinition &gate, const FockState &input, double overlap = 1.0) {
    GateEvolution ev = run_gate(gate, input, overlap, false);
    OutcomeDistribution d;
    for (const auto &b : ev.branches) {
        PatternOutcome po{b.pattern, b.probability, OutcomeClass::fail()};
        if (b.accepted) {
            const std::vector<PauliCorrection> *c = nullptr;
            if (gate.corrections) {
                auto it = gate.corrections->find(b.pattern);
                c = it == gate.corrections->end() ? nullptr : &it->second;
            }
            po.outcome = (c && !c->empty()) ? OutcomeClass::correctable(*c) : OutcomeClass::accept();
        }
        switch (po.outcome.tag) {
            case OutcomeTag::Accept:
                d.accept += b.probability;
                break;
            case OutcomeTag::Correctable:
                d.correctable += b.probability;
                break;
            case OutcomeTag::Fail:
                d.fail += b.probability;
                break;
        }
        d.patterns.push_back(std::move(po));
    }
    return d;
}

struct TruthTableRow {
    std::string input;
    double acceptance = 0;
    /// Output bit string -> probability conditioned on acceptance. Empty when
    /// the input is never accepted.
    std::map<std::string, double> outputs;
};

struct GateReport {
    std::string gate;
    double overlap = 1.0;
    std::vector<TruthTableRow> rows;
    double mean_acceptance = 0;
    /// Mean over basis inputs of P(ideal output | accepted).
    double truth_table_fidelity = 0;
    /// Process fidelity of the accepted, corrected operation against the ideal map.
    double process_fidelity = 0;
};

/// Accepted branches of a run, summed into one state (branches are orthogonal
/// on the detector modes, so this is their incoherent mixture).
inline FockState accepted_state(const GateEvolution &ev) {
    FockState s;
    bool first = true;
    for (const auto &b : ev.branches) {
        if (!b.accepted) {
            continue;
        }
        if (first) {
            s = FockState(b.state.mode_count(), b.state.photon_cap());
            first = false;
        }
        s += b.state;
    }
    return s;
}

inline GateReport truth_table(const GateDefinition &gate, double overlap = 1.0) {
    if (!(overlap >= 0.0 && overlap <= 1.0)) {
        throw std::invalid_argument("overlap must lie in [0,1]");
    }
    GateReport report;
    report.gate = gate.name;
    report.overlap = overlap;
    const std::size_t dim_in = std::size_t{1} << gate.inputs.size();
    double fid_sum = 0;
    std::size_t fid_rows = 0;
    std::vector<LogicalComponents> per_input;
    for (std::size_t x = 0; x < dim_in; ++x) {
        GateEvolution ev = run_gate(gate, basis_input(gate, x), overlap);
        TruthTableRow row;
        row.input = bit_label(x, gate.inputs.size());
        row.acceptance = ev.acceptance();
        FockState acc = accepted_state(ev);
        per_input.push_back(
            acc.mode_count() ? logical_components(acc, gate.outputs, ev.layer_width) : LogicalComponents{});
        if (row.acceptance > 0) {
            const auto &lc = per_input.back();
            double total = lc.valid_weight() + lc.invalid_weight;
            for (const auto &[rest, v] : lc.by_rest) {
                for (std::size_t y = 0; y < v.size(); ++y) {
                    double p = std::norm(v[y]);
                    if (p > 0) {
                        row.outputs[bit_label(y, gate.outputs.size())] += p / total;
                    }
                }
            }
            if (lc.invalid_weight > 0) {
                row.outputs["invalid"] += lc.invalid_weight / total;
            }
        }
        // Fidelity against the ideal basis output, when the ideal map keeps this input.
        std::optional<std::size_t> ideal_y;
        for (std::size_t y = 0; y < gate.ideal.rows(); ++y) {
            if (std::abs(gate.ideal(y, x)) > 0) {
                ideal_y = y;
            }
        }
        if (ideal_y) {
            auto it = row.outputs.find(bit_label(*ideal_y, gate.outputs.size()));
            fid_sum += it == row.outputs.end() ? 0.0 : it->second;
            ++fid_rows;
        } else if (row.acceptance > 1e-12) {
            ++fid_rows;
        }
        report.mean_acceptance += row.acceptance / static_cast<double>(dim_in);
        report.rows.push_back(std::move(row));
    }
    report.truth_table_fidelity = fid_rows ? fid_sum / static_cast<double>(fid_rows) : 0.0;
    report.process_fidelity = process_fidelity(per_input, gate.ideal);
    return report;
}

}  // namespace loqc
