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

// loqc command-line front end.
//
// Exit status: 0 success, 1 bad input (parse/elaboration errors, missing
// files, unknown gates, invalid parameters), 2 runtime failure.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "loqc/circuit.hpp"
#include "loqc/gates.hpp"
#include "loqc/report_json.hpp"
#include "loqc/sources.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitRuntime = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputOptions {
    std::string format = "json";
    std::string out;
};

void add_output_options(CLI::App *cmd, OutputOptions &o) {
    cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    cmd->add_option("--out", o.out, "Write the report to this file instead of standard output");
}

void emit(const OutputOptions &o, const loqc::json &j, const std::string &csv) {
    std::string text = o.format == "csv" ? csv : j.dump(2) + "\n";
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f || !(f << text)) {
        throw std::runtime_error("cannot write '" + o.out + "'");
    }
}

std::string read_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw InputError("cannot open circuit file '" + path + "'");
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct RunArgs {
    std::string path;
    std::optional<std::uint64_t> seed;
    double connection_transmission = 1.0;
    OutputOptions out;
};

int cmd_run(const RunArgs &a) {
    loqc::CircuitProgram prog;
    try {
        auto ast = loqc::parse_circuit(read_file(a.path));
        prog = loqc::elaborate(ast, {a.connection_transmission});
    } catch (const loqc::ParseError &e) {
        for (const auto &d : e.diagnostics) {
            std::cerr << a.path << ": " << d.to_string() << "\n";
        }
        return kExitInput;
    } catch (const loqc::ElaborationError &e) {
        std::cerr << a.path << ": " << e.what() << "\n";
        return kExitInput;
    }
    auto report = loqc::run_circuit(prog, a.seed);
    emit(a.out, loqc::to_json(report), loqc::to_csv(report));
    return kExitOk;
}

struct TruthTableArgs {
    std::string gate;
    double overlap = 1.0;
    OutputOptions out;
};

int cmd_truth_table(const TruthTableArgs &a) {
    const auto &names = loqc::gate_names();
    if (std::find(names.begin(), names.end(), a.gate) == names.end()) {
        std::string list;
        for (const auto &n : names) {
            list += (list.empty() ? "" : "|") + n;
        }
        throw InputError("unknown gate '" + a.gate + "' (" + list + ")");
    }
    auto gate = loqc::build_gate(a.gate);
    auto report = loqc::truth_table(gate, a.overlap);
    emit(a.out, loqc::to_json(report, gate.outputs.size()), loqc::to_csv(report, gate.outputs.size()));
    return kExitOk;
}

struct SourceArgs {
    std::string model;
    double mu = 1.0;
    unsigned n_max = 10;
    double p = 0.05;
    bool double_pairs = false;
    double eta_sw = 1.0;
    double eta_loop = 1.0;
    unsigned max_cycles = 100;
    std::vector<std::uint64_t> schedule{4, 9, 19};
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    OutputOptions out;
};

int cmd_source_stats(const SourceArgs &a) {
    if (a.model == "loop") {
        loqc::HeraldedLoop loop;
        loop.pair_probability = a.p;
        loop.switch_transmission = a.eta_sw;
        loop.loop_transmission = a.eta_loop;
        loop.max_cycles = a.max_cycles;
        loqc::LoopReport r;
        try {
            loqc::validate(loqc::SourceModel{loop});
            r.analytic = loqc::analytic_delivery_stats(loop, a.schedule);
        } catch (const std::invalid_argument &e) {
            throw InputError(e.what());
        }
        if (a.trials == 0) {
            throw InputError("--trials must be at least 1");
        }
        r.model = loop;
        r.schedule = a.schedule;
        r.seed = a.seed;
        r.trials = a.trials;
        r.monte_carlo = loqc::simulate_heralded_source(loop, a.schedule, a.seed, a.trials);
        emit(a.out, loqc::to_json(r), loqc::to_csv(r));
        return kExitOk;
    }
    loqc::PmfReport r;
    loqc::SourceModel model;
    r.model = a.model;
    if (a.model == "poisson") {
        model = loqc::AttenuatedLaser{a.mu};
        r.parameters = {{"mu", a.mu}};
    } else {
        model = loqc::SpdcPair{a.p, a.double_pairs};
        r.parameters = {{"p", a.p}, {"double_pairs", a.double_pairs}};
    }
    try {
        loqc::validate(model);
    } catch (const std::invalid_argument &e) {
        throw InputError(e.what());
    }
    for (unsigned n = 0; n <= a.n_max; ++n) {
        r.pmf.push_back(loqc::photon_number_distribution(model, n));
    }
    emit(a.out, loqc::to_json(r), loqc::to_csv(r));
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Exact few-photon linear-optics simulator", "loqc"};
    app.require_subcommand(1);

    RunArgs run;
    auto *run_cmd = app.add_subcommand("run", "Simulate a circuit file");
    run_cmd->add_option("path", run.path, "Circuit file")->required();
    run_cmd->add_option("--seed", run.seed, "Accepted for symmetry; circuit runs are exact");
    run_cmd->add_option("--connection-transmission", run.connection_transmission, "Transmission of gate-input wires")
        ->check(CLI::Range(0.0, 1.0));
    add_output_options(run_cmd, run.out);

    TruthTableArgs tt;
    auto *tt_cmd = app.add_subcommand("truth-table", "Logical truth table of a built-in gate");
    tt_cmd->add_option("gate", tt.gate, "parity_check | xor | encoder | cnot")->required();
    tt_cmd->add_option("--overlap", tt.overlap, "Temporal-mode overlap v of the interfering photons")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    add_output_options(tt_cmd, tt.out);

    SourceArgs src;
    auto *src_cmd = app.add_subcommand("source-stats", "Photon-source statistics");
    src_cmd->add_option("model", src.model, "poisson | spdc | loop")
        ->required()
        ->check(CLI::IsMember({"poisson", "spdc", "loop"}));
    src_cmd->add_option("--mu", src.mu, "Mean photon number (poisson)")->capture_default_str();
    src_cmd->add_option("--n-max", src.n_max, "Largest photon number listed")
        ->check(CLI::Range(0u, 200u))
        ->capture_default_str();
    src_cmd->add_option("--p", src.p, "Pair probability per pulse (spdc, loop)")->capture_default_str();
    src_cmd->add_flag("--double-pairs", src.double_pairs, "Include second-order pair emission (spdc)");
    src_cmd->add_option("--eta-sw", src.eta_sw, "Switch transmission (loop)")->capture_default_str();
    src_cmd->add_option("--eta-loop", src.eta_loop, "Transmission per loop round trip (loop)")->capture_default_str();
    src_cmd->add_option("--max-cycles", src.max_cycles, "Longest storage in round trips (loop)")
        ->capture_default_str();
    src_cmd->add_option("--schedule", src.schedule, "Request pulses, increasing (loop)")
        ->delimiter(',')
        ->capture_default_str();
    src_cmd->add_option("--trials", src.trials, "Monte Carlo trials (loop)")->capture_default_str();
    src_cmd->add_option("--seed", src.seed, "Monte Carlo seed (loop)")->capture_default_str();
    add_output_options(src_cmd, src.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*run_cmd) {
            return cmd_run(run);
        }
        if (*tt_cmd) {
            return cmd_truth_table(tt);
        }
        return cmd_source_stats(src);
    } catch (const InputError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const loqc::PhotonCapExceeded &e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception &e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
