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

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace loqc {

using cplx = std::complex<double>;

/// Photon count per optical mode.
using Occupation = std::vector<unsigned>;

inline unsigned total_photons(const Occupation &occ) {
    return std::accumulate(occ.begin(), occ.end(), 0u);
}

/// Thrown whenever an operation would create a term above the state's photon cap.
struct PhotonCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A logical qubit carried by one photon shared between an H rail and a V rail.
/// Logical 0 is the photon in the H rail.
struct QubitSlot {
    std::size_t h_mode = 0;
    std::size_t v_mode = 1;

    auto operator<=>(const QubitSlot &) const = default;
};

inline void check_slot(const QubitSlot &slot, std::size_t mode_count) {
    if (slot.h_mode == slot.v_mode) {
        throw std::invalid_argument("qubit slot uses the same mode for H and V");
    }
    if (slot.h_mode >= mode_count || slot.v_mode >= mode_count) {
        throw std::out_of_range("qubit slot mode index exceeds mode count " + std::to_string(mode_count));
    }
}

/// Sparse multimode Fock state. Amplitudes below kPruneThreshold are never stored.
class FockState {
   public:
    static constexpr unsigned kDefaultPhotonCap = 8;
    static constexpr double kPruneThreshold = 1e-14;
    using Terms = std::map<Occupation, cplx>;

    FockState() = default;
    explicit FockState(std::size_t mode_count, unsigned photon_cap = kDefaultPhotonCap)
        : mode_count_(mode_count), photon_cap_(photon_cap) {
    }

    std::size_t mode_count() const {
        return mode_count_;
    }
    unsigned photon_cap() const {
        return photon_cap_;
    }
    const Terms &terms() const {
        return terms_;
    }
    std::size_t size() const {
        return terms_.size();
    }
    /// True for the zero vector (the "no such outcome" marker).
    bool is_zero() const {
        return terms_.empty();
    }

    cplx amplitude(const Occupation &occ) const {
        auto it = terms_.find(occ);
        return it == terms_.end() ? cplx{} : it->second;
    }

    /// Accumulates `amp` onto `occ`. Callers finish with prune().
    void add(const Occupation &occ, cplx amp) {
        if (occ.size() != mode_count_) {
            throw std::invalid_argument(
                "occupation has " + std::to_string(occ.size()) + " modes, state has " + std::to_string(mode_count_));
        }
        if (total_photons(occ) > photon_cap_) {
            throw PhotonCapExceeded(
                "term with " + std::to_string(total_photons(occ)) + " photons exceeds photon cap " +
                std::to_string(photon_cap_));
        }
        terms_[occ] += amp;
    }

    void prune() {
        std::erase_if(terms_, [](const auto &kv) {
            return std::abs(kv.second) < kPruneThreshold;
        });
    }

    double norm_squared() const {
        double s = 0;
        for (const auto &[occ, amp] : terms_) {
            s += std::norm(amp);
        }
        return s;
    }

    FockState scaled(cplx factor) const {
        FockState out(mode_count_, photon_cap_);
        for (const auto &[occ, amp] : terms_) {
            out.terms_.emplace(occ, amp * factor);
        }
        out.prune();
        return out;
    }

    FockState normalized() const {
        double n = norm_squared();
        if (n == 0) {
            throw std::domain_error("cannot normalize a zero-norm state");
        }
        return scaled(1.0 / std::sqrt(n));
    }

    FockState &operator+=(const FockState &other) {
        if (other.mode_count_ != mode_count_) {
            throw std::invalid_argument("cannot add states with different mode counts");
        }
        for (const auto &[occ, amp] : other.terms_) {
            add(occ, amp);
        }
        prune();
        return *this;
    }

    /// Same state on `extra` additional vacuum modes appended at the end.
    FockState with_vacuum_modes(std::size_t extra) const {
        FockState out(mode_count_ + extra, photon_cap_);
        for (const auto &[occ, amp] : terms_) {
            Occupation wide = occ;
            wide.resize(mode_count_ + extra, 0);
            out.terms_.emplace(std::move(wide), amp);
        }
        return out;
    }

    bool operator==(const FockState &) const = default;

   private:
    std::size_t mode_count_ = 0;
    unsigned photon_cap_ = kDefaultPhotonCap;
    Terms terms_;
};

/// |counts> with amplitude 1.
inline FockState make_basis_state(std::span<const int> counts, unsigned photon_cap = FockState::kDefaultPhotonCap) {
    Occupation occ;
    occ.reserve(counts.size());
    for (int c : counts) {
        if (c < 0) {
            throw std::invalid_argument("negative photon count " + std::to_string(c));
        }
        occ.push_back(static_cast<unsigned>(c));
    }
    FockState s(occ.size(), photon_cap);
    s.add(occ, 1.0);
    return s;
}

inline FockState make_basis_state(std::initializer_list<int> counts, unsigned photon_cap = FockState::kDefaultPhotonCap) {
    return make_basis_state(std::span<const int>(counts.begin(), counts.size()), photon_cap);
}

inline FockState make_basis_state(const Occupation &occ, unsigned photon_cap = FockState::kDefaultPhotonCap) {
    FockState s(occ.size(), photon_cap);
    s.add(occ, 1.0);
    return s;
}

/// Normalized linear combination; duplicate occupations are summed first.
inline FockState superpose(
    std::span<const std::pair<Occupation, cplx>> terms, unsigned photon_cap = FockState::kDefaultPhotonCap) {
    if (terms.empty()) {
        throw std::invalid_argument("superpose needs at least one term");
    }
    FockState s(terms.front().first.size(), photon_cap);
    for (const auto &[occ, amp] : terms) {
        s.add(occ, amp);
    }
    s.prune();
    if (s.is_zero()) {
        throw std::domain_error("superposition has zero norm");
    }
    return s.normalized();
}

inline FockState superpose(
    std::initializer_list<std::pair<Occupation, cplx>> terms, unsigned photon_cap = FockState::kDefaultPhotonCap) {
    return superpose(std::span<const std::pair<Occupation, cplx>>(terms.begin(), terms.size()), photon_cap);
}

/// State on the concatenated mode list a ++ b.
inline FockState tensor(const FockState &a, const FockState &b) {
    unsigned cap = std::max(a.photon_cap(), b.photon_cap());
    FockState out(a.mode_count() + b.mode_count(), cap);
    for (const auto &[occ_a, amp_a] : a.terms()) {
        for (const auto &[occ_b, amp_b] : b.terms()) {
            Occupation joined = occ_a;
            joined.insert(joined.end(), occ_b.begin(), occ_b.end());
            out.add(joined, amp_a * amp_b);
        }
    }
    out.prune();
    return out;
}

/// <a|b>, conjugate-linear in a.
inline cplx inner_product(const FockState &a, const FockState &b) {
    if (a.mode_count() != b.mode_count()) {
        throw std::invalid_argument("inner product of states with different mode counts");
    }
    cplx s{};
    const auto &small = a.size() <= b.size() ? a.terms() : b.terms();
    const auto &large = a.size() <= b.size() ? b.terms() : a.terms();
    bool a_is_small = a.size() <= b.size();
    for (const auto &[occ, amp] : small) {
        auto it = large.find(occ);
        if (it == large.end()) {
            continue;
        }
        s += a_is_small ? std::conj(amp) * it->second : std::conj(it->second) * amp;
    }
    return s;
}

/// Superposes two states that live on the same modes but occupy disjoint mode sets.
/// Each pair of terms is merged by adding occupations.
inline FockState merge_disjoint(const FockState &a, const FockState &b) {
    if (a.mode_count() != b.mode_count()) {
        throw std::invalid_argument("merge_disjoint needs equal mode counts");
    }
    FockState out(a.mode_count(), std::max(a.photon_cap(), b.photon_cap()));
    for (const auto &[occ_a, amp_a] : a.terms()) {
        for (const auto &[occ_b, amp_b] : b.terms()) {
            Occupation merged = occ_a;
            for (std::size_t i = 0; i < merged.size(); ++i) {
                if (merged[i] != 0 && occ_b[i] != 0) {
                    throw std::invalid_argument("merge_disjoint: both states occupy mode " + std::to_string(i));
                }
                merged[i] += occ_b[i];
            }
            out.add(merged, amp_a * amp_b);
        }
    }
    out.prune();
    return out;
}

/// alpha|1_H,0_V> + beta|0_H,1_V> on `slot`, vacuum on the other modes.
inline FockState encode_qubit(
    cplx alpha, cplx beta, const QubitSlot &slot, std::size_t state_size,
    unsigned photon_cap = FockState::kDefaultPhotonCap) {
    check_slot(slot, state_size);
    if (std::norm(alpha) + std::norm(beta) == 0) {
        throw std::invalid_argument("encode_qubit: alpha and beta are both zero");
    }
    Occupation h(state_size, 0), v(state_size, 0);
    h[slot.h_mode] = 1;
    v[slot.v_mode] = 1;
    std::pair<Occupation, cplx> terms[] = {{h, alpha}, {v, beta}};
    return superpose(terms, photon_cap);
}

/// (|0,0> + |1,1>)/sqrt(2) in logical encoding on two disjoint slots.
inline FockState make_bell_ancilla(
    const QubitSlot &first, const QubitSlot &second, std::size_t state_size,
    unsigned photon_cap = FockState::kDefaultPhotonCap) {
    check_slot(first, state_size);
    check_slot(second, state_size);
    if (first.h_mode == second.h_mode || first.h_mode == second.v_mode || first.v_mode == second.h_mode ||
        first.v_mode == second.v_mode) {
        throw std::invalid_argument("make_bell_ancilla: slots overlap");
    }
    Occupation zero_zero(state_size, 0), one_one(state_size, 0);
    zero_zero[first.h_mode] = zero_zero[second.h_mode] = 1;
    one_one[first.v_mode] = one_one[second.v_mode] = 1;
    std::pair<Occupation, cplx> terms[] = {{zero_zero, 1.0}, {one_one, 1.0}};
    return superpose(terms, photon_cap);
}

inline std::string to_string(const Occupation &occ) {
    std::string s = "|";
    for (std::size_t i = 0; i < occ.size(); ++i) {
        if (i) {
            s += ',';
        }
        s += std::to_string(occ[i]);
    }
    return s + ">";
}

}  // namespace loqc
