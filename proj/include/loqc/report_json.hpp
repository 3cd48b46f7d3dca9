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

// JSON and CSV renderings of simulator reports. Probabilities are rounded to
// 12 significant digits.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "loqc/circuit.hpp"
#include "loqc/gates.hpp"
#include "loqc/sources.hpp"

namespace loqc {

using json = nlohmann::ordered_json;

inline double round12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    double r = std::strtod(buf, nullptr);
    return r == 0 ? 0.0 : r;
}

inline std::string format12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", round12(v));
    return buf;
}

// --- run ------------------------------------------------------------------

inline json to_json(const CircuitReport &r) {
    json outputs = json::array();
    for (const auto &[value, p] : r.outputs) {
        outputs.push_back({{"value", value}, {"probability", round12(p)}});
    }
    json gates = json::array();
    for (double p : r.per_gate_acceptance) {
        gates.push_back(round12(p));
    }
    return {{"acceptance_probability", round12(r.acceptance_probability)},
            {"outputs", std::move(outputs)},
            {"per_gate_acceptance", std::move(gates)}};
}

/// One row per output value; the acceptance column repeats the run total.
inline std::string to_csv(const CircuitReport &r) {
    std::ostringstream out;
    out << "value,probability,acceptance_probability\n";
    for (const auto &[value, p] : r.outputs) {
        out << value << ',' << format12(p) << ',' << format12(r.acceptance_probability) << '\n';
    }
    return out.str();
}

// --- truth-table ----------------------------------------------------------

struct TruthTableEntry {
    std::string input;
    std::string output;
    /// Empty when the input is never accepted.
    std::optional<double> conditional_probability;
    double acceptance_probability = 0;
};

/// Every (input, output) pair over the logical basis, plus any "invalid"
/// outcome that actually occurs.
inline std::vector<TruthTableEntry> truth_table_entries(const GateReport &report, std::size_t output_bits) {
    std::vector<TruthTableEntry> entries;
    for (const auto &row : report.rows) {
        std::vector<std::string> values;
        for (std::size_t y = 0; y < (std::size_t{1} << output_bits); ++y) {
            values.push_back(bit_label(y, output_bits));
        }
        for (const auto &[k, p] : row.outputs) {
            if (std::find(values.begin(), values.end(), k) == values.end()) {
                values.push_back(k);
            }
        }
        for (const auto &v : values) {
            TruthTableEntry e{row.input, v, std::nullopt, row.acceptance};
            if (row.acceptance > 0) {
                auto it = row.outputs.find(v);
                e.conditional_probability = it == row.outputs.end() ? 0.0 : it->second;
            }
            entries.push_back(std::move(e));
        }
    }
    return entries;
}

inline json to_json(const GateReport &report, std::size_t output_bits) {
    json rows = json::array();
    for (const auto &e : truth_table_entries(report, output_bits)) {
        rows.push_back({{"input", e.input},
                        {"output", e.output},
                        {"conditional_probability",
                         e.conditional_probability ? json(round12(*e.conditional_probability)) : json(nullptr)},
                        {"acceptance_probability", round12(e.acceptance_probability)}});
    }
    return {{"gate", report.gate},
            {"overlap", report.overlap},
            {"rows", std::move(rows)},
            {"mean_acceptance", round12(report.mean_acceptance)},
            {"truth_table_fidelity", round12(report.truth_table_fidelity)},
            {"process_fidelity", round12(report.process_fidelity)}};
}

inline std::string to_csv(const GateReport &report, std::size_t output_bits) {
    std::ostringstream out;
    out << "input,output,conditional_probability,acceptance_probability\n";
    for (const auto &e : truth_table_entries(report, output_bits)) {
        out << e.input << ',' << e.output << ',' << (e.conditional_probability ? format12(*e.conditional_probability) : "")
            << ',' << format12(e.acceptance_probability) << '\n';
    }
    return out.str();
}

// --- source-stats ---------------------------------------------------------

struct PmfReport {
    std::string model;
    json parameters;
    std::vector<double> pmf;

    double tail() const {
        double s = 0;
        for (double p : pmf) {
            s += p;
        }
        return std::max(0.0, 1.0 - s);
    }
};

inline json to_json(const PmfReport &r) {
    json rows = json::array();
    for (std::size_t n = 0; n < r.pmf.size(); ++n) {
        rows.push_back({{"n", n}, {"probability", round12(r.pmf[n])}});
    }
    return {{"model", r.model},
            {"parameters", r.parameters},
            {"pmf", std::move(rows)},
            {"tail_probability", round12(r.tail())}};
}

inline std::string to_csv(const PmfReport &r) {
    std::ostringstream out;
    out << "n,probability\n";
    for (std::size_t n = 0; n < r.pmf.size(); ++n) {
        out << n << ',' << format12(r.pmf[n]) << '\n';
    }
    return out.str();
}

struct LoopReport {
    HeraldedLoop model;
    std::vector<std::uint64_t> schedule;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    std::vector<DeliveryStats> analytic;
    std::vector<DeliveryStats> monte_carlo;
};

inline json delivery_json(const DeliveryStats &s, bool sampled) {
    json j = {{"exactly_one", round12(s.exactly_one)},
              {"vacuum", round12(s.vacuum)},
              {"multi_photon", round12(s.multi_photon)},
              {"mean_cycles_stored", round12(s.mean_cycles_stored)}};
    if (sampled) {
        j["exactly_one_std_error"] = round12(s.exactly_one_std_error);
        j["trials"] = s.trials;
    }
    return j;
}

inline json to_json(const LoopReport &r) {
    json requests = json::array();
    for (std::size_t i = 0; i < r.analytic.size(); ++i) {
        requests.push_back({{"request_pulse", r.analytic[i].request_pulse},
                            {"analytic", delivery_json(r.analytic[i], false)},
                            {"monte_carlo", delivery_json(r.monte_carlo[i], true)}});
    }
    return {{"model", "loop"},
            {"parameters",
             {{"p", r.model.pair_probability},
              {"eta_sw", r.model.switch_transmission},
              {"eta_loop", r.model.loop_transmission},
              {"max_cycles", r.model.max_cycles},
              {"schedule", r.schedule}}},
            {"seed", r.seed},
            {"trials", r.trials},
            {"requests", std::move(requests)}};
}

inline std::string to_csv(const LoopReport &r) {
    std::ostringstream out;
    out << "request_pulse,analytic_exactly_one,mc_exactly_one,mc_std_error,analytic_vacuum,mc_vacuum,"
           "analytic_mean_cycles,mc_mean_cycles\n";
    for (std::size_t i = 0; i < r.analytic.size(); ++i) {
        const auto &a = r.analytic[i];
        const auto &m = r.monte_carlo[i];
        out << a.request_pulse << ',' << format12(a.exactly_one) << ',' << format12(m.exactly_one) << ','
            << format12(m.exactly_one_std_error) << ',' << format12(a.vacuum) << ',' << format12(m.vacuum) << ','
            << format12(a.mean_cycles_stored) << ',' << format12(m.mean_cycles_stored) << '\n';
    }
    return out.str();
}

}  // namespace loqc
