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

#include <map>
#include <string>
#include <vector>

#include "loqc/fock.hpp"
#include "loqc/optics.hpp"

namespace loqc {

struct DetectorModel {
    double efficiency = 1.0;
    bool number_resolving = true;
};

/// What one detector mode must report.
struct CountRequirement {
    enum class Kind { Exact, Click, NoClick };
    Kind kind = Kind::Exact;
    unsigned count = 0;

    static CountRequirement exact(unsigned n) {
        return {Kind::Exact, n};
    }
    static CountRequirement click() {
        return {Kind::Click, 0};
    }
    static CountRequirement no_click() {
        return {Kind::NoClick, 0};
    }

    bool matches(unsigned photons) const {
        switch (kind) {
            case Kind::Exact:
                return photons == count;
            case Kind::Click:
                return photons >= 1;
            case Kind::NoClick:
                return photons == 0;
        }
        return false;
    }

    auto operator<=>(const CountRequirement &) const = default;
};

/// The requirement a detector of the given model can actually express for a
/// requested photon number. Threshold detectors collapse n >= 1 to "click".
inline CountRequirement requirement_for(const DetectorModel &model, unsigned photons) {
    if (model.number_resolving) {
        return CountRequirement::exact(photons);
    }
    return photons == 0 ? CountRequirement::no_click() : CountRequirement::click();
}

/// Polarization analyzer in front of a detector pair. angle 0 is H/V, pi/4 is
/// diagonal; analyzer output 0 is the polarization cos(angle) H + sin(angle) V.
struct AnalyzerSetting {
    QubitSlot slot;
    double angle = 0;

    auto operator<=>(const AnalyzerSetting &) const = default;
};

struct DetectionPattern {
    std::vector<CountRequirement> counts;
    std::vector<AnalyzerSetting> bases;

    auto operator<=>(const DetectionPattern &) const = default;
};

inline DetectionPattern exact_pattern(std::vector<unsigned> counts) {
    DetectionPattern p;
    for (unsigned c : counts) {
        p.counts.push_back(CountRequirement::exact(c));
    }
    return p;
}

inline std::string to_string(const DetectionPattern &p) {
    std::string s;
    for (const auto &c : p.counts) {
        if (!s.empty()) {
            s += ' ';
        }
        switch (c.kind) {
            case CountRequirement::Kind::Exact:
                s += std::to_string(c.count);
                break;
            case CountRequirement::Kind::Click:
                s += "click";
                break;
            case CountRequirement::Kind::NoClick:
                s += "none";
                break;
        }
    }
    return s;
}

enum class PauliOp { I, X, Z, XZ };

inline std::string_view pauli_name(PauliOp op) {
    switch (op) {
        case PauliOp::I:
            return "I";
        case PauliOp::X:
            return "X";
        case PauliOp::Z:
            return "Z";
        case PauliOp::XZ:
            return "XZ";
    }
    return "?";
}

struct PauliCorrection {
    QubitSlot target;
    PauliOp op = PauliOp::I;

    auto operator<=>(const PauliCorrection &) const = default;
};

enum class OutcomeTag { Accept, Correctable, Fail };

inline std::string_view outcome_tag_name(OutcomeTag tag) {
    switch (tag) {
        case OutcomeTag::Accept:
            return "accept";
        case OutcomeTag::Correctable:
            return "correctable";
        case OutcomeTag::Fail:
            return "fail";
    }
    return "?";
}

struct OutcomeClass {
    OutcomeTag tag = OutcomeTag::Fail;
    std::vector<PauliCorrection> corrections;  // non-empty iff tag == Correctable

    static OutcomeClass accept() {
        return {OutcomeTag::Accept, {}};
    }
    static OutcomeClass fail() {
        return {OutcomeTag::Fail, {}};
    }
    static OutcomeClass correctable(std::vector<PauliCorrection> c) {
        if (c.empty()) {
            throw std::invalid_argument("correctable outcome needs at least one correction");
        }
        return {OutcomeTag::Correctable, std::move(c)};
    }
};

/// Result of conditioning on a detection pattern. A zero probability yields a
/// zero state rather than an error.
struct Projection {
    FockState state;
    double probability = 0;

    bool empty() const {
        return state.is_zero();
    }
};

namespace detail {

inline std::size_t layer_count(const FockState &state, std::size_t layer_width) {
    if (layer_width == 0) {
        return 1;
    }
    if (state.mode_count() % layer_width != 0) {
        throw std::invalid_argument("state mode count is not a multiple of the layer width");
    }
    return state.mode_count() / layer_width;
}

/// Photons in `mode` summed over all temporal layers.
inline unsigned layered_count(const Occupation &occ, std::size_t mode, std::size_t layer_width) {
    if (layer_width == 0) {
        return occ[mode];
    }
    unsigned n = 0;
    for (std::size_t m = mode % layer_width; m < occ.size(); m += layer_width) {
        n += occ[m];
    }
    return n;
}

}  // namespace detail

/// Rotates `slot` so that analyzer output 0 at `angle` lands in the H rail.
inline FockState rotate_to_analyzer(
    const FockState &state, const QubitSlot &slot, double angle, std::size_t layer_width = 0) {
    if (angle == 0) {
        return state;
    }
    return apply_element(state, polarization_rotator(-angle, slot), layer_width);
}

/// Keeps the terms whose detector counts match `requirements`. Counts on each
/// detector are summed over temporal layers (detectors do not resolve them).
/// No modes are removed and nothing is renormalized.
inline FockState postselect(
    const FockState &state, std::span<const std::size_t> detector_modes,
    std::span<const CountRequirement> requirements, std::size_t layer_width = 0) {
    if (detector_modes.size() != requirements.size()) {
        throw std::invalid_argument("one count requirement is needed per detector mode");
    }
    for (std::size_t m : detector_modes) {
        if (m >= state.mode_count()) {
            throw std::out_of_range("detector mode " + std::to_string(m) + " out of range");
        }
    }
    FockState out(state.mode_count(), state.photon_cap());
    for (const auto &[occ, amp] : state.terms()) {
        bool ok = true;
        for (std::size_t d = 0; d < detector_modes.size() && ok; ++d) {
            ok = requirements[d].matches(detail::layered_count(occ, detector_modes[d], layer_width));
        }
        if (ok) {
            out.add(occ, amp);
        }
    }
    return out;
}

/// Conditions on `pattern` at `detector_modes` and returns the renormalized
/// state of the remaining modes together with the pattern probability.
/// Analyzer rotations listed in the pattern are applied before counting.
inline Projection project_pattern(
    const FockState &state, std::span<const std::size_t> detector_modes, const DetectionPattern &pattern) {
    std::set<std::size_t> seen;
    for (std::size_t m : detector_modes) {
        if (m >= state.mode_count()) {
            throw std::out_of_range("detector mode " + std::to_string(m) + " out of range");
        }
        if (!seen.insert(m).second) {
            throw std::invalid_argument("detector modes must be distinct");
        }
    }
    FockState rotated = state;
    for (const auto &basis : pattern.bases) {
        rotated = rotate_to_analyzer(rotated, basis.slot, basis.angle);
    }
    FockState kept = postselect(rotated, detector_modes, pattern.counts);
    Projection result;
    result.probability = kept.norm_squared() / rotated.norm_squared();
    FockState reduced(state.mode_count() - detector_modes.size(), state.photon_cap());
    for (const auto &[occ, amp] : kept.terms()) {
        Occupation rest;
        rest.reserve(reduced.mode_count());
        for (std::size_t m = 0; m < occ.size(); ++m) {
            if (!seen.contains(m)) {
                rest.push_back(occ[m]);
            }
        }
        reduced.add(rest, amp);
    }
    reduced.prune();
    result.state = reduced.is_zero() ? reduced : reduced.normalized();
    return result;
}

/// Couples `mode` to a fresh environment mode with transmission equal to the
/// detector efficiency. A perfect detector leaves the state untouched.
inline FockState apply_detector_loss(const FockState &state, std::size_t mode, const DetectorModel &model) {
    if (!(model.efficiency >= 0.0 && model.efficiency <= 1.0)) {
        throw std::invalid_argument("detector efficiency must lie in [0,1]");
    }
    if (mode >= state.mode_count()) {
        throw std::out_of_range("detector mode " + std::to_string(mode) + " out of range");
    }
    if (model.efficiency == 1.0) {
        return state;
    }
    return apply_element(state, loss_channel(model.efficiency, mode));
}

/// Pauli feed-forward on dual-rail qubits. X swaps the rails, Z flips the sign
/// of V-occupied terms, XZ applies Z then X. Acts on every temporal layer.
inline FockState apply_feedforward(
    const FockState &state, std::span<const PauliCorrection> corrections, std::size_t layer_width = 0) {
    std::size_t layers = detail::layer_count(state, layer_width);
    std::size_t width = layer_width == 0 ? state.mode_count() : layer_width;
    for (const auto &c : corrections) {
        check_slot(c.target, width);
    }
    FockState out(state.mode_count(), state.photon_cap());
    for (const auto &[occ, amp] : state.terms()) {
        Occupation next = occ;
        cplx a = amp;
        for (const auto &c : corrections) {
            unsigned h = detail::layered_count(next, c.target.h_mode, layer_width);
            unsigned v = detail::layered_count(next, c.target.v_mode, layer_width);
            if (h + v != 1) {
                throw std::invalid_argument("feed-forward target slot does not hold exactly one photon");
            }
            bool z = c.op == PauliOp::Z || c.op == PauliOp::XZ;
            bool x = c.op == PauliOp::X || c.op == PauliOp::XZ;
            if (z && v == 1) {
                a = -a;
            }
            if (x) {
                for (std::size_t l = 0; l < layers; ++l) {
                    std::swap(next[l * width + c.target.h_mode], next[l * width + c.target.v_mode]);
                }
            }
        }
        out.add(next, a);
    }
    out.prune();
    return out;
}

/// Thrown when a logical readout meets a slot that does not hold one photon.
struct InvalidLogicalState : std::domain_error {
    using std::domain_error::domain_error;
};

struct LogicalDistribution {
    double p0 = 0;
    double p1 = 0;
};

/// Analyzer probabilities for one dual-rail qubit. They sum to the state's norm
/// (1 for normalized input). Every term must hold exactly one photon in the slot.
inline LogicalDistribution measure_logical(
    const FockState &state, const QubitSlot &slot, double basis_angle, std::size_t layer_width = 0) {
    check_slot(slot, layer_width == 0 ? state.mode_count() : layer_width);
    FockState rotated = rotate_to_analyzer(state, slot, basis_angle, layer_width);
    LogicalDistribution d;
    for (const auto &[occ, amp] : rotated.terms()) {
        unsigned h = detail::layered_count(occ, slot.h_mode, layer_width);
        unsigned v = detail::layered_count(occ, slot.v_mode, layer_width);
        if (h + v != 1) {
            throw InvalidLogicalState(
                "slot (" + std::to_string(slot.h_mode) + "," + std::to_string(slot.v_mode) + ") holds " +
                std::to_string(h + v) + " photons in term " + to_string(occ));
        }
        (h ? d.p0 : d.p1) += std::norm(amp);
    }
    return d;
}

/// Joint analyzer distribution over several slots, keyed by bit strings in slot
/// order. Terms where a slot does not hold exactly one photon either throw or,
/// with mark_invalid, contribute an 'x' at that position.
inline std::map<std::string, double> joint_logical_distribution(
    const FockState &state, std::span<const QubitSlot> slots, std::span<const double> basis_angles,
    std::size_t layer_width = 0, bool mark_invalid = false) {
    if (slots.size() != basis_angles.size()) {
        throw std::invalid_argument("one basis angle is needed per slot");
    }
    FockState rotated = state;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        check_slot(slots[i], layer_width == 0 ? state.mode_count() : layer_width);
        rotated = rotate_to_analyzer(rotated, slots[i], basis_angles[i], layer_width);
    }
    std::map<std::string, double> dist;
    for (const auto &[occ, amp] : rotated.terms()) {
        std::string key;
        for (const auto &slot : slots) {
            unsigned h = detail::layered_count(occ, slot.h_mode, layer_width);
            unsigned v = detail::layered_count(occ, slot.v_mode, layer_width);
            if (h + v != 1) {
                if (!mark_invalid) {
                    throw InvalidLogicalState("slot does not hold exactly one photon in term " + to_string(occ));
                }
                key += 'x';
            } else {
                key += h ? '0' : '1';
            }
        }
        dist[key] += std::norm(amp);
    }
    return dist;
}

}  // namespace loqc
