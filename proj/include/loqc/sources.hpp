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
#include <cstdint>
#include <map>
#include <random>
#include <variant>
#include <vector>

#include "loqc/gates.hpp"

namespace loqc {

/// Phase-randomized laser pulse attenuated to mean photon number mu.
struct AttenuatedLaser {
    double mean_photons = 1.0;
};

/// Pair source emitting one pair per pulse with probability p. With double
/// pairs enabled, two pairs occur with probability p^2 and the vacuum takes
/// the remainder.
struct SpdcPair {
    double pair_probability = 0.01;
    bool include_double_pairs = false;
};

/// Heralded pair source feeding a storage loop. One detected twin routes its
/// partner through the switch into the loop; it is switched out again at the
/// next request. Time is counted in pulse periods.
struct HeraldedLoop {
    double pair_probability = 0.05;
    double switch_transmission = 1.0;
    double loop_transmission = 1.0;
    double pulse_period_s = 1e-8;
    unsigned max_cycles = 100;
};

using SourceModel = std::variant<AttenuatedLaser, SpdcPair, HeraldedLoop>;

namespace detail {

inline bool unit_interval(double x) {
    return x >= 0.0 && x <= 1.0;
}

}  // namespace detail

inline void validate(const SourceModel &model) {
    std::visit(
        [](const auto &m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AttenuatedLaser>) {
                if (!(m.mean_photons > 0) || !std::isfinite(m.mean_photons)) {
                    throw std::invalid_argument("attenuated laser needs a positive finite mean photon number");
                }
            } else if constexpr (std::is_same_v<T, SpdcPair>) {
                if (!detail::unit_interval(m.pair_probability)) {
                    throw std::invalid_argument("pair probability must lie in [0,1]");
                }
                double p = m.pair_probability;
                if (m.include_double_pairs && p + p * p > 1.0) {
                    throw std::invalid_argument("p + p^2 exceeds 1; double-pair expansion is invalid");
                }
            } else {
                if (!detail::unit_interval(m.pair_probability) || !detail::unit_interval(m.switch_transmission) ||
                    !detail::unit_interval(m.loop_transmission)) {
                    throw std::invalid_argument("heralded loop probabilities and transmissions must lie in [0,1]");
                }
                if (!(m.pulse_period_s > 0)) {
                    throw std::invalid_argument("pulse period must be positive");
                }
            }
        },
        model);
}

/// Probability of n photons (laser) or n pairs (SPDC) in one pulse.
inline double photon_number_distribution(const SourceModel &model, unsigned n) {
    validate(model);
    if (const auto *laser = std::get_if<AttenuatedLaser>(&model)) {
        double mu = laser->mean_photons;
        return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0));
    }
    if (const auto *spdc = std::get_if<SpdcPair>(&model)) {
        double p = spdc->pair_probability;
        double doubles = spdc->include_double_pairs ? p * p : 0.0;
        switch (n) {
            case 0:
                return 1.0 - p - doubles;
            case 1:
                return p;
            case 2:
                return doubles;
            default:
                return 0.0;
        }
    }
    throw std::invalid_argument(
        "photon_number_distribution is undefined for a heralded loop; use heralded_delivery_probability");
}

/// eta_sw^2 * eta_loop^k: switched in, k loop round trips, switched out.
inline double heralded_delivery_probability(const HeraldedLoop &model, unsigned cycles_stored) {
    validate(model);
    if (cycles_stored > model.max_cycles) {
        throw std::out_of_range(
            "cycles_stored " + std::to_string(cycles_stored) + " exceeds max_cycles " +
            std::to_string(model.max_cycles));
    }
    return model.switch_transmission * model.switch_transmission *
           std::pow(model.loop_transmission, static_cast<double>(cycles_stored));
}

/// Per-request delivery statistics.
struct DeliveryStats {
    std::uint64_t request_pulse = 0;
    double exactly_one = 0;
    double vacuum = 0;
    double multi_photon = 0;
    /// Mean loop round trips of the stored photon, over requests that had one.
    double mean_cycles_stored = 0;
    /// Standard error of exactly_one (0 for analytic values).
    double exactly_one_std_error = 0;
    std::uint64_t trials = 0;
};

namespace detail {

/// First pulse of the storage window for each request: the loop is armed after
/// the previous request and at most max_cycles pulses before this one.
inline std::vector<std::uint64_t> window_starts(const HeraldedLoop &model, std::span<const std::uint64_t> schedule) {
    if (schedule.empty()) {
        throw std::invalid_argument("request schedule is empty");
    }
    std::vector<std::uint64_t> starts;
    for (std::size_t j = 0; j < schedule.size(); ++j) {
        if (j > 0 && schedule[j] <= schedule[j - 1]) {
            throw std::invalid_argument("request schedule must be strictly increasing");
        }
        std::uint64_t earliest = j == 0 ? 0 : schedule[j - 1] + 1;
        std::uint64_t by_cycles = schedule[j] >= model.max_cycles ? schedule[j] - model.max_cycles : 0;
        starts.push_back(std::max(earliest, by_cycles));
    }
    return starts;
}

/// Uniform double in [0,1) from 53 random bits; independent of the standard
/// library's distribution implementations.
inline double uniform01(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Closed-form statistics: geometric wait for the first herald in the window,
/// then heralded_delivery_probability for the remaining cycles.
inline std::vector<DeliveryStats> analytic_delivery_stats(
    const HeraldedLoop &model, std::span<const std::uint64_t> schedule) {
    validate(model);
    auto starts = detail::window_starts(model, schedule);
    std::vector<DeliveryStats> out;
    const double p = model.pair_probability;
    for (std::size_t j = 0; j < schedule.size(); ++j) {
        const std::uint64_t length = schedule[j] - starts[j] + 1;
        DeliveryStats s;
        s.request_pulse = schedule[j];
        double heralded = 0;
        double cycles = 0;
        for (std::uint64_t i = 0; i < length; ++i) {
            double first_herald = p * std::pow(1.0 - p, static_cast<double>(i));
            unsigned k = static_cast<unsigned>(length - 1 - i);
            heralded += first_herald;
            cycles += first_herald * k;
            s.exactly_one += first_herald * heralded_delivery_probability(model, k);
        }
        s.vacuum = 1.0 - s.exactly_one;
        s.mean_cycles_stored = heralded > 0 ? cycles / heralded : 0.0;
        out.push_back(s);
    }
    return out;
}

/// Monte Carlo over pulse trains. Trials are split into blocks of
/// kTrialsPerBlock, each with its own mt19937_64 stream seeded from
/// (seed, block index), so results are reproducible and blocks are independent.
inline constexpr std::uint64_t kTrialsPerBlock = 8192;

inline std::vector<DeliveryStats> simulate_heralded_source(
    const HeraldedLoop &model, std::span<const std::uint64_t> schedule, std::uint64_t seed, std::uint64_t trials) {
    validate(model);
    if (trials == 0) {
        throw std::invalid_argument("trials must be at least 1");
    }
    auto starts = detail::window_starts(model, schedule);
    const std::size_t requests = schedule.size();
    std::vector<std::uint64_t> delivered(requests, 0), stored(requests, 0), cycle_sum(requests, 0);
    const std::uint64_t blocks = (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
    for (std::uint64_t block = 0; block < blocks; ++block) {
        std::seed_seq seq{
            static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
            static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
        std::mt19937_64 rng(seq);
        const std::uint64_t in_block = std::min(kTrialsPerBlock, trials - block * kTrialsPerBlock);
        for (std::uint64_t t = 0; t < in_block; ++t) {
            for (std::size_t j = 0; j < requests; ++j) {
                std::optional<std::uint64_t> herald;
                for (std::uint64_t pulse = starts[j]; pulse <= schedule[j] && !herald; ++pulse) {
                    if (detail::uniform01(rng) < model.pair_probability) {
                        herald = pulse;
                    }
                }
                if (!herald) {
                    continue;
                }
                std::uint64_t k = schedule[j] - *herald;
                ++stored[j];
                cycle_sum[j] += k;
                bool alive = detail::uniform01(rng) < model.switch_transmission;
                for (std::uint64_t c = 0; c < k && alive; ++c) {
                    alive = detail::uniform01(rng) < model.loop_transmission;
                }
                alive = alive && detail::uniform01(rng) < model.switch_transmission;
                delivered[j] += alive ? 1 : 0;
            }
        }
    }
    std::vector<DeliveryStats> out;
    const double n = static_cast<double>(trials);
    for (std::size_t j = 0; j < requests; ++j) {
        DeliveryStats s;
        s.request_pulse = schedule[j];
        s.trials = trials;
        s.exactly_one = static_cast<double>(delivered[j]) / n;
        s.vacuum = 1.0 - s.exactly_one;
        s.mean_cycles_stored =
            stored[j] ? static_cast<double>(cycle_sum[j]) / static_cast<double>(stored[j]) : 0.0;
        s.exactly_one_std_error = std::sqrt(s.exactly_one * (1.0 - s.exactly_one) / n);
        out.push_back(s);
    }
    return out;
}

/// Effect of imperfect sources on a gate.
struct SourceErrorReport {
    /// Probability the detectors signal success, averaged over basis inputs.
    double acceptance_probability = 0;
    /// Probability of success with every output slot holding at least one
    /// photon (what a coincidence measurement would register).
    double coincidence_probability = 0;
    /// P(output is not the ideal single-photon logical value | coincidence).
    double error_rate = 0;
    /// Source probability mass above the truncation, per input slot product.
    double truncated_weight = 0;
};

/// Replaces the listed input slots (by input index) with photon-number
/// mixtures from their source models, truncated at `truncation` photons, and
/// compares the accepted output with ideal single-photon operation over all
/// logical basis inputs. Slots not listed carry ideal single photons.
inline SourceErrorReport gate_error_with_sources(
    const GateDefinition &gate, const std::map<std::size_t, SourceModel> &assignment, unsigned truncation) {
    if (truncation < 2) {
        throw std::invalid_argument("truncation must be at least 2 to include multi-photon terms");
    }
    if (truncation > FockState::kDefaultPhotonCap) {
        throw std::invalid_argument("truncation exceeds the photon cap");
    }
    std::vector<std::size_t> sourced;
    for (const auto &[slot_index, model] : assignment) {
        if (slot_index >= gate.inputs.size()) {
            throw std::out_of_range("source assigned to nonexistent input " + std::to_string(slot_index));
        }
        validate(model);
        sourced.push_back(slot_index);
    }
    const std::size_t k = gate.inputs.size();
    const std::size_t dim_in = std::size_t{1} << k;
    const std::size_t width = gate.mode_count;

    // Photon-number configurations over the sourced slots.
    std::vector<std::pair<std::vector<unsigned>, double>> configs{{{}, 1.0}};
    for (std::size_t s : sourced) {
        std::vector<std::pair<std::vector<unsigned>, double>> next;
        for (const auto &[counts, w] : configs) {
            for (unsigned n = 0; n <= truncation; ++n) {
                double pn = photon_number_distribution(assignment.at(s), n);
                if (pn == 0) {
                    continue;
                }
                auto c = counts;
                c.push_back(n);
                next.emplace_back(std::move(c), w * pn);
            }
        }
        configs = std::move(next);
    }

    SourceErrorReport report;
    double kept_weight = 0;
    for (const auto &cfg : configs) {
        kept_weight += cfg.second;
    }
    report.truncated_weight = 1.0 - kept_weight;

    double coincident_wrong = 0;
    for (std::size_t x = 0; x < dim_in; ++x) {
        std::optional<std::size_t> ideal_y;
        for (std::size_t y = 0; y < gate.ideal.rows(); ++y) {
            if (std::abs(gate.ideal(y, x)) > 0) {
                ideal_y = y;
            }
        }
        for (const auto &[counts, weight] : configs) {
            Occupation occ(width, 0);
            for (std::size_t i = 0; i < k; ++i) {
                bool one = (x >> (k - 1 - i)) & 1;
                auto pos = std::find(sourced.begin(), sourced.end(), i);
                unsigned n = pos == sourced.end() ? 1 : counts[static_cast<std::size_t>(pos - sourced.begin())];
                occ[one ? gate.inputs[i].v_mode : gate.inputs[i].h_mode] = n;
            }
            FockState input = make_basis_state(occ);
            GateEvolution ev = run_gate(gate, input);
            const double w = weight / static_cast<double>(dim_in);
            for (const auto &b : ev.branches) {
                if (!b.accepted) {
                    continue;
                }
                report.acceptance_probability += w * b.probability;
                for (const auto &[o, amp] : b.state.terms()) {
                    double p = w * std::norm(amp);
                    bool coincident = true;
                    bool correct = ideal_y.has_value();
                    std::size_t value = 0;
                    for (const auto &slot : gate.outputs) {
                        unsigned h = o[slot.h_mode], v = o[slot.v_mode];
                        coincident = coincident && h + v >= 1;
                        correct = correct && h + v == 1;
                        value = (value << 1) | (v ? 1 : 0);
                    }
                    if (!coincident) {
                        continue;
                    }
                    report.coincidence_probability += p;
                    if (!(correct && value == *ideal_y)) {
                        coincident_wrong += p;
                    }
                }
            }
        }
    }
    report.error_rate =
        report.coincidence_probability > 0 ? coincident_wrong / report.coincidence_probability : 0.0;
    return report;
}

}  // namespace loqc
