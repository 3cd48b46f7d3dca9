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
#include <numbers>

#include "loqc/gates.hpp"
#include "loqc/sources.hpp"
#include "oracles.hpp"

using namespace loqc;

namespace {

/// Exactly-one probability at request r when the loop is armed from pulse s:
/// sum over the first herald at pulse s+i of p(1-p)^i * eta_sw^2 * eta_loop^(r-s-i).
double delivery_oracle(const HeraldedLoop &m, std::uint64_t start, std::uint64_t request) {
    double total = 0;
    double none_yet = 1;
    for (std::uint64_t t = start; t <= request; ++t) {
        double survive = m.switch_transmission * m.switch_transmission;
        for (std::uint64_t k = t; k < request; ++k) {
            survive *= m.loop_transmission;
        }
        total += none_yet * m.pair_probability * survive;
        none_yet *= 1 - m.pair_probability;
    }
    return total;
}

}  // namespace

TEST(Poisson, MeanOnePhoton) {
    AttenuatedLaser laser{1.0};
    double p0 = photon_number_distribution(laser, 0);
    double p1 = photon_number_distribution(laser, 1);
    EXPECT_NEAR(p0, std::exp(-1.0), 1e-12);
    EXPECT_NEAR(p1, std::exp(-1.0), 1e-12);
    EXPECT_NEAR(1 - p0 - p1, 1 - 2 * std::exp(-1.0), 1e-12);
}

TEST(Poisson, MatchesRecursiveOracle) {
    for (double mu : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) {
        for (unsigned n = 0; n <= 20; ++n) {
            EXPECT_NEAR(photon_number_distribution(AttenuatedLaser{mu}, n), oracle::poisson(mu, n), 1e-13)
                << "mu=" << mu << " n=" << n;
        }
    }
}

TEST(Poisson, TruncatedSumIsOne) {
    for (double mu : {0.1, 0.5, 1.0, 1.5, 2.0}) {
        double s = 0;
        for (unsigned n = 0; n <= 30; ++n) {
            s += photon_number_distribution(AttenuatedLaser{mu}, n);
        }
        EXPECT_NEAR(s, 1.0, 1e-10);
    }
}

TEST(Spdc, SingleAndDoublePairs) {
    SpdcPair single{0.1, false};
    EXPECT_NEAR(photon_number_distribution(single, 0), 0.9, 1e-15);
    EXPECT_NEAR(photon_number_distribution(single, 1), 0.1, 1e-15);
    EXPECT_EQ(photon_number_distribution(single, 2), 0.0);
    SpdcPair doubles{0.1, true};
    EXPECT_NEAR(photon_number_distribution(doubles, 2), 0.01, 1e-15);
    EXPECT_NEAR(photon_number_distribution(doubles, 0), 0.89, 1e-15);
}

TEST(Sources, InvalidParametersRejected) {
    EXPECT_THROW(validate(SourceModel{AttenuatedLaser{-1.0}}), std::invalid_argument);
    EXPECT_THROW(validate(SourceModel{AttenuatedLaser{0.0}}), std::invalid_argument);
    EXPECT_THROW(validate(SourceModel{SpdcPair{1.2, false}}), std::invalid_argument);
    EXPECT_THROW(validate(SourceModel{SpdcPair{0.7, true}}), std::invalid_argument);
    HeraldedLoop bad;
    bad.switch_transmission = 1.1;
    EXPECT_THROW(validate(SourceModel{bad}), std::invalid_argument);
    EXPECT_THROW(photon_number_distribution(HeraldedLoop{}, 1), std::invalid_argument);
}

TEST(HeraldedLoop, DeliveryProbability) {
    HeraldedLoop m{0.05, 0.9, 0.95, 1e-8, 100};
    for (unsigned k : {0u, 1u, 5u, 40u}) {
        EXPECT_NEAR(heralded_delivery_probability(m, k), 0.81 * std::pow(0.95, k), 1e-15);
    }
    EXPECT_THROW(heralded_delivery_probability(m, 101), std::out_of_range);
}

TEST(HeraldedLoop, AnalyticMatchesPulseSumOracle) {
    HeraldedLoop m{0.1, 0.85, 0.9, 1e-8, 6};
    std::uint64_t schedule[] = {3, 5, 20};
    auto stats = analytic_delivery_stats(m, schedule);
    // Windows: [0,3], [4,5], and [14,20] (capped at max_cycles + 1 pulses).
    EXPECT_NEAR(stats[0].exactly_one, delivery_oracle(m, 0, 3), 1e-14);
    EXPECT_NEAR(stats[1].exactly_one, delivery_oracle(m, 4, 5), 1e-14);
    EXPECT_NEAR(stats[2].exactly_one, delivery_oracle(m, 14, 20), 1e-14);
    for (const auto &s : stats) {
        EXPECT_NEAR(s.exactly_one + s.vacuum + s.multi_photon, 1.0, 1e-14);
    }
}

TEST(HeraldedLoop, ScheduleMustIncrease) {
    HeraldedLoop m;
    std::uint64_t bad[] = {5, 5};
    EXPECT_THROW(analytic_delivery_stats(m, bad), std::invalid_argument);
    std::vector<std::uint64_t> empty;
    EXPECT_THROW(analytic_delivery_stats(m, empty), std::invalid_argument);
}

TEST(HeraldedLoop, MonteCarloWithinThreeSigma) {
    HeraldedLoop settings[] = {
        {0.05, 0.9, 0.95, 1e-8, 100}, {0.2, 0.8, 0.9, 1e-8, 100}, {0.01, 1.0, 1.0, 1e-8, 100},
        {0.1, 0.7, 0.99, 1e-8, 5},    {0.3, 0.95, 0.5, 1e-8, 100},
    };
    std::uint64_t schedule[] = {4, 9, 19};
    for (const auto &m : settings) {
        auto exact = analytic_delivery_stats(m, schedule);
        auto mc = simulate_heralded_source(m, schedule, 42, 100000);
        for (std::size_t i = 0; i < exact.size(); ++i) {
            double se = std::sqrt(exact[i].exactly_one * (1 - exact[i].exactly_one) / 100000);
            EXPECT_LE(std::abs(mc[i].exactly_one - exact[i].exactly_one), 3 * se + 1e-12)
                << "p=" << m.pair_probability << " request " << schedule[i];
        }
    }
}

TEST(HeraldedLoop, FixedSeedIsDeterministic) {
    HeraldedLoop m{0.05, 0.9, 0.95, 1e-8, 100};
    std::uint64_t schedule[] = {4, 9, 19};
    auto a = simulate_heralded_source(m, schedule, 7, 20000);
    auto b = simulate_heralded_source(m, schedule, 7, 20000);
    auto c = simulate_heralded_source(m, schedule, 8, 20000);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].exactly_one, b[i].exactly_one);
        EXPECT_EQ(a[i].mean_cycles_stored, b[i].mean_cycles_stored);
        EXPECT_EQ(a[i].trials, 20000u);
        any_difference |= a[i].exactly_one != c[i].exactly_one;
    }
    EXPECT_TRUE(any_difference);
    EXPECT_THROW(simulate_heralded_source(m, schedule, 7, 0), std::invalid_argument);
}

TEST(SourceErrors, IdealSourcesGiveNoError) {
    SourceErrorReport r = gate_error_with_sources(build_parity_check(), {}, 3);
    EXPECT_NEAR(r.error_rate, 0.0, 1e-12);
    EXPECT_NEAR(r.acceptance_probability, 0.5, 1e-12);
}

TEST(SourceErrors, GrowWithMeanPhotonNumber) {
    GateDefinition g = build_parity_check();
    double previous = -1;
    for (double mu : {0.05, 0.1, 0.2, 0.5}) {
        SourceErrorReport r = gate_error_with_sources(g, {{0, AttenuatedLaser{mu}}}, 4);
        EXPECT_GT(r.error_rate, previous) << "mu=" << mu;
        previous = r.error_rate;
    }
}

TEST(SourceErrors, SpdcDoublePairsAddError) {
    GateDefinition g = build_destructive_xor();
    double clean = gate_error_with_sources(g, {{1, SpdcPair{0.1, false}}}, 3).error_rate;
    double doubles = gate_error_with_sources(g, {{1, SpdcPair{0.1, true}}}, 3).error_rate;
    EXPECT_NEAR(clean, 0.0, 1e-12);
    EXPECT_GT(doubles, clean);
}

TEST(SourceErrors, ArgumentChecks) {
    GateDefinition g = build_parity_check();
    EXPECT_THROW(gate_error_with_sources(g, {}, 1), std::invalid_argument);
    EXPECT_THROW(gate_error_with_sources(g, {{5, AttenuatedLaser{0.1}}}, 3), std::out_of_range);
}
