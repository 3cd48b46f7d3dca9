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
#include <bit>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "loqc/fock.hpp"

namespace loqc {

/// Dense row-major complex matrix. Used for permanent sub-matrices and as the
/// storage behind ModeUnitary.
class ComplexMatrix {
   public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    }
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        for (const auto &r : rows) {
            if (r.size() != cols_) {
                throw std::invalid_argument("ragged matrix literal");
            }
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    std::size_t rows() const {
        return rows_;
    }
    std::size_t cols() const {
        return cols_;
    }
    cplx &operator()(std::size_t r, std::size_t c) {
        return data_[r * cols_ + c];
    }
    const cplx &operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                out(c, r) = std::conj((*this)(r, c));
            }
        }
        return out;
    }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.cols_ != b.rows_) {
            throw std::invalid_argument("matrix product dimension mismatch");
        }
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                cplx aik = a(i, k);
                if (aik == cplx{}) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    out(i, j) += aik * b(k, j);
                }
            }
        }
        return out;
    }

    /// Largest entrywise distance from the identity.
    double distance_from_identity() const {
        double worst = 0;
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                worst = std::max(worst, std::abs((*this)(r, c) - (r == c ? cplx{1} : cplx{})));
            }
        }
        return worst;
    }

    bool operator==(const ComplexMatrix &) const = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// Matrix permanent by Ryser's inclusion-exclusion formula with Gray-code
/// ordering of column subsets, O(2^n n). Reentrant.
inline cplx permanent(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("permanent of a non-square matrix");
    }
    const std::size_t n = m.rows();
    if (n == 0) {
        return 1.0;
    }
    if (n > 30) {
        throw std::invalid_argument("permanent dimension too large for exact evaluation");
    }
    std::vector<cplx> row_sums(n);
    cplx total{};
    std::uint64_t gray = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        std::uint64_t next = k ^ (k >> 1);
        std::uint64_t flipped = next ^ gray;
        std::size_t col = static_cast<std::size_t>(std::countr_zero(flipped));
        double sign = (next & flipped) ? 1.0 : -1.0;
        for (std::size_t r = 0; r < n; ++r) {
            row_sums[r] += sign * m(r, col);
        }
        gray = next;
        cplx prod = 1.0;
        for (std::size_t r = 0; r < n; ++r) {
            prod *= row_sums[r];
        }
        // (-1)^(n - |S|)
        bool odd = ((n - static_cast<std::size_t>(std::popcount(gray))) & 1) != 0;
        total += odd ? -prod : prod;
    }
    return total;
}

/// Unitary acting on mode creation operators: a_j^dag -> sum_i U(i,j) a_i^dag.
class ModeUnitary {
   public:
    static constexpr double kUnitarityTolerance = 1e-12;

    ModeUnitary() = default;
    explicit ModeUnitary(ComplexMatrix entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols()) {
            throw std::invalid_argument("mode unitary must be square");
        }
        double err = (entries_ * entries_.adjoint()).distance_from_identity();
        if (err > kUnitarityTolerance) {
            throw std::invalid_argument("matrix is not unitary (deviation " + std::to_string(err) + ")");
        }
    }

    static ModeUnitary identity(std::size_t n) {
        return ModeUnitary(ComplexMatrix::identity(n), Unchecked{});
    }

    std::size_t dimension() const {
        return entries_.rows();
    }
    const ComplexMatrix &entries() const {
        return entries_;
    }
    cplx operator()(std::size_t r, std::size_t c) const {
        return entries_(r, c);
    }

    ModeUnitary adjoint() const {
        return ModeUnitary(entries_.adjoint(), Unchecked{});
    }

    /// (a * b) applies b first.
    friend ModeUnitary operator*(const ModeUnitary &a, const ModeUnitary &b) {
        return ModeUnitary(a.entries_ * b.entries_, Unchecked{});
    }

   private:
    struct Unchecked {};
    ModeUnitary(ComplexMatrix entries, Unchecked) : entries_(std::move(entries)) {
    }

    ComplexMatrix entries_;
};

enum class ElementKind {
    BeamSplitter,
    PolarizingBeamSplitter,
    PolarizationRotator,
    PhaseShifter,
    LossChannel,
};

inline std::string_view element_kind_name(ElementKind kind) {
    switch (kind) {
        case ElementKind::BeamSplitter:
            return "bs";
        case ElementKind::PolarizingBeamSplitter:
            return "pbs";
        case ElementKind::PolarizationRotator:
            return "rot";
        case ElementKind::PhaseShifter:
            return "phase";
        case ElementKind::LossChannel:
            return "loss";
    }
    return "?";
}

/// Number of modes an element's unitary acts on.
inline std::size_t element_arity(ElementKind kind) {
    switch (kind) {
        case ElementKind::BeamSplitter:
        case ElementKind::PolarizationRotator:
        case ElementKind::LossChannel:
            return 2;
        case ElementKind::PolarizingBeamSplitter:
            return 4;
        case ElementKind::PhaseShifter:
            return 1;
    }
    return 0;
}

/// A linear optical element placed on specific modes.
///
/// Target conventions:
///   bs     {a, b}               parameter = reflectivity r
///   pbs    {aH, aV, bH, bV}     no parameter
///   rot    {h, v}               parameter = rotation angle (radians)
///   phase  {m}                  parameter = phase (radians)
///   loss   {m} or {m, env}      parameter = transmission; a one-target loss
///                               gets a fresh environment mode when applied
struct ElementSpec {
    ElementKind kind = ElementKind::PhaseShifter;
    double parameter = 0;
    std::vector<std::size_t> targets;

    bool operator==(const ElementSpec &) const = default;
};

inline ElementSpec beam_splitter(double reflectivity, std::size_t a, std::size_t b) {
    return {ElementKind::BeamSplitter, reflectivity, {a, b}};
}
inline ElementSpec polarizing_beam_splitter(const QubitSlot &port_a, const QubitSlot &port_b) {
    return {ElementKind::PolarizingBeamSplitter, 0, {port_a.h_mode, port_a.v_mode, port_b.h_mode, port_b.v_mode}};
}
inline ElementSpec polarization_rotator(double theta, const QubitSlot &slot) {
    return {ElementKind::PolarizationRotator, theta, {slot.h_mode, slot.v_mode}};
}
inline ElementSpec phase_shifter(double phi, std::size_t mode) {
    return {ElementKind::PhaseShifter, phi, {mode}};
}
inline ElementSpec loss_channel(double transmission, std::size_t mode) {
    return {ElementKind::LossChannel, transmission, {mode}};
}

inline void validate(const ElementSpec &spec) {
    auto in_unit = [](double x) {
        return x >= 0.0 && x <= 1.0;
    };
    if ((spec.kind == ElementKind::BeamSplitter || spec.kind == ElementKind::LossChannel) && !in_unit(spec.parameter)) {
        throw std::invalid_argument(
            std::string(element_kind_name(spec.kind)) + " parameter must lie in [0,1], got " +
            std::to_string(spec.parameter));
    }
    if (!std::isfinite(spec.parameter)) {
        throw std::invalid_argument("element parameter is not finite");
    }
    std::size_t arity = element_arity(spec.kind);
    bool loss_short = spec.kind == ElementKind::LossChannel && spec.targets.size() == 1;
    if (spec.targets.size() != arity && !loss_short) {
        throw std::invalid_argument(
            std::string(element_kind_name(spec.kind)) + " expects " + std::to_string(arity) + " target modes");
    }
    std::set<std::size_t> seen(spec.targets.begin(), spec.targets.end());
    if (seen.size() != spec.targets.size()) {
        throw std::invalid_argument("element target modes must be distinct");
    }
}

/// The element's unitary on its own target modes, in target order.
///
/// Beam splitters use the real convention [[t, r], [r, -t]] with t = sqrt(1-R),
/// r = sqrt(R). The PBS transmits H and swaps the V rails between ports with no
/// reflection phase. A loss channel is a beam splitter of transmission eta
/// between the lossy mode and its environment mode.
inline ModeUnitary element_unitary(const ElementSpec &spec) {
    validate(spec);
    switch (spec.kind) {
        case ElementKind::BeamSplitter: {
            double t = std::sqrt(1.0 - spec.parameter);
            double r = std::sqrt(spec.parameter);
            return ModeUnitary(ComplexMatrix{{t, r}, {r, -t}});
        }
        case ElementKind::PolarizingBeamSplitter:
            return ModeUnitary(ComplexMatrix{
                {1, 0, 0, 0},
                {0, 0, 0, 1},
                {0, 0, 1, 0},
                {0, 1, 0, 0},
            });
        case ElementKind::PolarizationRotator: {
            double c = std::cos(spec.parameter);
            double s = std::sin(spec.parameter);
            return ModeUnitary(ComplexMatrix{{c, -s}, {s, c}});
        }
        case ElementKind::PhaseShifter:
            return ModeUnitary(ComplexMatrix{{std::polar(1.0, spec.parameter)}});
        case ElementKind::LossChannel: {
            double t = std::sqrt(spec.parameter);
            double r = std::sqrt(1.0 - spec.parameter);
            return ModeUnitary(ComplexMatrix{{t, -r}, {r, t}});
        }
    }
    throw std::logic_error("unhandled element kind");
}

/// Places `u` on `placement` inside an identity of size total_modes.
inline ModeUnitary embed(const ModeUnitary &u, std::span<const std::size_t> placement, std::size_t total_modes) {
    if (placement.size() != u.dimension()) {
        throw std::invalid_argument("placement length does not match unitary dimension");
    }
    std::set<std::size_t> seen;
    for (std::size_t p : placement) {
        if (p >= total_modes) {
            throw std::out_of_range("placement index " + std::to_string(p) + " out of range");
        }
        if (!seen.insert(p).second) {
            throw std::invalid_argument("placement index " + std::to_string(p) + " repeated");
        }
    }
    ComplexMatrix m = ComplexMatrix::identity(total_modes);
    for (std::size_t i = 0; i < placement.size(); ++i) {
        for (std::size_t j = 0; j < placement.size(); ++j) {
            m(placement[i], placement[j]) = u(i, j);
        }
    }
    return ModeUnitary(std::move(m));
}

/// Repeats a unitary on `layers` consecutive blocks (temporal copies of the
/// same spatial/polarization modes).
inline ModeUnitary replicate_layers(const ModeUnitary &u, std::size_t layers) {
    const std::size_t n = u.dimension();
    ComplexMatrix m(n * layers, n * layers);
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                m(l * n + i, l * n + j) = u(i, j);
            }
        }
    }
    return ModeUnitary(std::move(m));
}

namespace detail {

inline double factorial(unsigned n) {
    double f = 1;
    for (unsigned i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

/// Calls fn(counts) for every way of placing `photons` into `bins` bins.
template <typename Fn>
void for_each_composition(std::size_t bins, unsigned photons, std::vector<unsigned> &counts, std::size_t at, Fn &&fn) {
    if (at + 1 == bins) {
        counts[at] = photons;
        fn(counts);
        return;
    }
    for (unsigned k = 0; k <= photons; ++k) {
        counts[at] = photons - k;
        for_each_composition(bins, k, counts, at + 1, fn);
    }
}

}  // namespace detail

/// Evolves a Fock state through a mode unitary using the permanent formula
///   <m|U|n> = perm(U[m,n]) / sqrt(prod m_i! prod n_j!)
/// where U[m,n] repeats row i m_i times and column j n_j times. Output
/// occupations are enumerated only over modes reachable from occupied inputs.
inline FockState evolve(const FockState &state, const ModeUnitary &u) {
    if (u.dimension() != state.mode_count()) {
        throw std::invalid_argument(
            "unitary dimension " + std::to_string(u.dimension()) + " does not match state with " +
            std::to_string(state.mode_count()) + " modes");
    }
    const std::size_t modes = state.mode_count();
    FockState out(modes, state.photon_cap());
    std::vector<std::size_t> cols;
    std::vector<std::size_t> reachable;
    std::vector<unsigned> counts;
    for (const auto &[in_occ, in_amp] : state.terms()) {
        cols.clear();
        double in_norm = 1;
        for (std::size_t j = 0; j < modes; ++j) {
            for (unsigned k = 0; k < in_occ[j]; ++k) {
                cols.push_back(j);
            }
            in_norm *= detail::factorial(in_occ[j]);
        }
        const unsigned photons = static_cast<unsigned>(cols.size());
        if (photons == 0) {
            out.add(in_occ, in_amp);
            continue;
        }
        reachable.clear();
        for (std::size_t i = 0; i < modes; ++i) {
            for (std::size_t j = 0; j < modes; ++j) {
                if (in_occ[j] && u(i, j) != cplx{}) {
                    reachable.push_back(i);
                    break;
                }
            }
        }
        counts.assign(reachable.size(), 0);
        ComplexMatrix sub(photons, photons);
        detail::for_each_composition(reachable.size(), photons, counts, 0, [&](const std::vector<unsigned> &c) {
            std::size_t row = 0;
            double out_norm = 1;
            for (std::size_t r = 0; r < reachable.size(); ++r) {
                for (unsigned k = 0; k < c[r]; ++k, ++row) {
                    for (std::size_t col = 0; col < photons; ++col) {
                        sub(row, col) = u(reachable[r], cols[col]);
                    }
                }
                out_norm *= detail::factorial(c[r]);
            }
            cplx amp = permanent(sub);
            if (amp == cplx{}) {
                return;
            }
            Occupation out_occ(modes, 0);
            for (std::size_t r = 0; r < reachable.size(); ++r) {
                out_occ[reachable[r]] = c[r];
            }
            out.add(out_occ, in_amp * amp / std::sqrt(in_norm * out_norm));
        });
    }
    out.prune();
    return out;
}

/// Applies one element. A one-target loss channel first appends a vacuum
/// environment mode. With layer_width > 0 the state is read as consecutive
/// temporal layers of layer_width modes each and the element acts on every layer.
inline FockState apply_element(const FockState &state, const ElementSpec &spec, std::size_t layer_width = 0) {
    validate(spec);
    ModeUnitary u = element_unitary(spec);
    if (spec.kind == ElementKind::LossChannel && spec.targets.size() == 1) {
        if (layer_width != 0 && layer_width != state.mode_count()) {
            throw std::invalid_argument("loss with an implicit environment mode cannot be layered");
        }
        FockState wide = state.with_vacuum_modes(1);
        std::size_t placement[] = {spec.targets[0], state.mode_count()};
        return evolve(wide, embed(u, placement, wide.mode_count()));
    }
    if (layer_width == 0 || layer_width == state.mode_count()) {
        return evolve(state, embed(u, spec.targets, state.mode_count()));
    }
    if (state.mode_count() % layer_width != 0) {
        throw std::invalid_argument("state mode count is not a multiple of the layer width");
    }
    return evolve(state, replicate_layers(embed(u, spec.targets, layer_width), state.mode_count() / layer_width));
}

/// Models imperfect temporal overlap of the photon in `slot`: its amplitude is
/// split into the shared temporal mode (weight sqrt(overlap)) and a fresh
/// orthogonal temporal mode (weight sqrt(1-overlap)). The fresh mode lives in a
/// new layer of layer_width modes appended to the state (default: one copy of
/// the whole current mode list). overlap = 1 returns the state unchanged.
inline FockState make_distinguishable(
    const FockState &state, const QubitSlot &slot, double overlap, std::size_t layer_width = 0) {
    if (!(overlap >= 0.0 && overlap <= 1.0)) {
        throw std::invalid_argument("overlap must lie in [0,1]");
    }
    check_slot(slot, state.mode_count());
    for (const auto &[occ, amp] : state.terms()) {
        if (occ[slot.h_mode] + occ[slot.v_mode] != 1) {
            throw std::invalid_argument("make_distinguishable: slot does not hold exactly one photon in every term");
        }
    }
    if (overlap == 1.0) {
        return state;
    }
    if (layer_width == 0) {
        layer_width = state.mode_count();
    }
    const std::size_t base = state.mode_count();
    FockState wide = state.with_vacuum_modes(layer_width);
    double keep = std::sqrt(overlap);
    double move = std::sqrt(1.0 - overlap);
    ModeUnitary split(ComplexMatrix{{keep, -move}, {move, keep}});
    ModeUnitary total = ModeUnitary::identity(wide.mode_count());
    for (std::size_t mode : {slot.h_mode, slot.v_mode}) {
        std::size_t placement[] = {mode, base + mode % layer_width};
        total = embed(split, placement, wide.mode_count()) * total;
    }
    return evolve(wide, total);
}

}  // namespace loqc
