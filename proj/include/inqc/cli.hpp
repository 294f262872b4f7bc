// Copyright 2026 The inqc Authors
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
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "inqc/circuit.hpp"
#include "inqc/protocol.hpp"
#include "inqc/report_json.hpp"

namespace inqc::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailed = 1, kUsageError = 2 };

struct CliConfig {
    std::string subcommand;
    std::string circuit_path;
    std::uint64_t seed{0};
    std::size_t trials{1};
    std::optional<std::string> forced_outcomes;
    bool json{false};
    double tolerance{kFidelityTolerance};
    std::size_t max_wires{6};
    std::size_t max_gates{40};
};

/// Mixes a base seed with a trial index (splitmix64 finalizer).
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

inline ForcedOutcomes parse_forced(const std::optional<std::string> &bits) {
    ForcedOutcomes f;
    if (!bits) return f;
    for (char ch : *bits) {
        if (ch != '0' && ch != '1') throw UsageError("--force-outcomes expects a string of 0/1, got '" + *bits + "'");
        f.measurements.push_back(static_cast<Bit>(ch - '0'));
    }
    return f;
}

inline Circuit load_circuit(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open circuit file '" + path + "'");
    return parse_circuit(in);
}

inline RandomCircuitOptions sweep_options(const CliConfig &cfg) {
    RandomCircuitOptions opt;
    opt.max_wires = std::max<std::size_t>(1, cfg.max_wires);
    opt.min_wires = std::min(opt.min_wires, opt.max_wires);
    opt.max_gates = cfg.max_gates;
    opt.min_gates = std::min(opt.min_gates, opt.max_gates);
    return opt;
}

inline std::string fmt_fidelity(double f) {
    std::ostringstream os;
    os << std::setprecision(15) << f;
    return os.str();
}

inline void print_summary(const RunReport &r, double tolerance, std::ostream &out) {
    out << "circuit " << r.circuit_hash << "  seed " << r.seed << "\n";
    out << "resources: epr=" << r.epr_consumed << " nlb=" << r.nlb_consumed << " (estimate epr=" << r.estimate.epr
        << " nlb=" << r.estimate.nlb << ")\n";
    out << "ledger: " << (r.audit.passed ? "pass" : "FAIL") << ", final round A->B " << r.audit.bits_ab
        << " bits, B->A " << r.audit.bits_ba << " bits\n";
    for (const auto &v : r.audit.violations) out << "  violation at event " << v.event_index << ": " << v.message << "\n";
    for (const auto &o : r.outputs) {
        out << "output wire " << o.wire << " (" << party_letter(*o.owner) << ", "
            << (o.kind == OutputKind::Quantum ? "quantum" : "classical") << "): ";
        if (o.kind == OutputKind::Quantum) {
            out << "fidelity " << fmt_fidelity(o.fidelity) << "\n";
        } else {
            out << "bit " << int(*o.bit) << " (oracle p=" << fmt_fidelity(*o.oracle_probability) << ")\n";
        }
    }
    out << "oracle_fidelity_min " << fmt_fidelity(r.oracle_fidelity_min) << "\n";
    out << "result: " << (r.passed(tolerance) ? "PASS" : "FAIL") << "\n";
}

inline int cmd_run(const CliConfig &cfg, std::ostream &out) {
    Circuit c = load_circuit(cfg.circuit_path);
    ProtocolOptions opt;
    opt.forced = parse_forced(cfg.forced_outcomes);
    RunReport r = run_protocol(c, cfg.seed, std::move(opt));
    if (cfg.json) {
        out << report_to_json(r).dump() << "\n";
    } else {
        print_summary(r, cfg.tolerance, out);
    }
    return r.passed(cfg.tolerance) ? kSuccess : kVerificationFailed;
}

/// Runs one circuit under `trials` consecutive seeds.
inline int cmd_verify(const CliConfig &cfg, std::ostream &out) {
    Circuit c = load_circuit(cfg.circuit_path);
    double min_fid = 1.0;
    std::size_t failures = 0;
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        ProtocolOptions opt;
        opt.forced = parse_forced(cfg.forced_outcomes);
        RunReport r = run_protocol(c, cfg.seed + t, std::move(opt));
        min_fid = std::min(min_fid, r.oracle_fidelity_min);
        bool ok = r.passed(cfg.tolerance);
        failures += ok ? 0 : 1;
        runs.push_back({{"seed", r.seed}, {"passed", ok}, {"oracle_fidelity_min", r.oracle_fidelity_min}});
    }
    if (cfg.json) {
        nlohmann::json j = {{"schema", kReportSchemaVersion}, {"circuit_hash", circuit_hash(c)}, {"trials", cfg.trials},
                            {"failures", failures}, {"min_fidelity", min_fid}, {"runs", runs}};
        out << j.dump() << "\n";
    } else {
        out << "verify " << circuit_hash(c) << ": " << cfg.trials << " seeds, " << failures
            << " failures, min fidelity " << fmt_fidelity(min_fid) << "\n";
    }
    return failures == 0 ? kSuccess : kVerificationFailed;
}

inline int cmd_estimate(const CliConfig &cfg, std::ostream &out) {
    Circuit c = load_circuit(cfg.circuit_path);
    ResourceEstimate e = estimate_resources(c);
    if (cfg.json) {
        nlohmann::json j = {{"schema", kReportSchemaVersion}, {"circuit_hash", circuit_hash(c)}, {"epr", e.epr},
                            {"nlb", e.nlb}, {"bits_ab", e.classical_bits_ab}, {"bits_ba", e.classical_bits_ba}};
        out << j.dump() << "\n";
    } else {
        out << "epr=" << e.epr << " nlb=" << e.nlb << " bits_ab=" << e.classical_bits_ab
            << " bits_ba=" << e.classical_bits_ba << "\n";
    }
    return kSuccess;
}

/// Random circuits, one per trial, each run under its own derived seed.
inline int cmd_sweep(const CliConfig &cfg, std::ostream &out) {
    RandomCircuitOptions opt = sweep_options(cfg);
    double min_fid = 1.0;
    std::size_t failures = 0, audit_failures = 0, resource_mismatches = 0;
    nlohmann::json failed = nlohmann::json::array();
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        std::uint64_t s = trial_seed(cfg.seed, t);
        std::mt19937_64 gen(s);
        Circuit c = random_circuit(opt, gen);
        RunReport r = run_protocol(c, s);
        min_fid = std::min(min_fid, r.oracle_fidelity_min);
        audit_failures += r.audit.passed ? 0 : 1;
        resource_mismatches += r.resources_exact() ? 0 : 1;
        if (!r.passed(cfg.tolerance)) {
            ++failures;
            failed.push_back({{"trial", t}, {"seed", s}, {"circuit_hash", r.circuit_hash},
                              {"oracle_fidelity_min", r.oracle_fidelity_min}, {"audit_passed", r.audit.passed}});
        }
    }
    if (cfg.json) {
        nlohmann::json j = {{"schema", kReportSchemaVersion}, {"seed", cfg.seed},
                            {"trials", cfg.trials},          {"failures", failures},
                            {"audit_failures", audit_failures}, {"resource_mismatches", resource_mismatches},
                            {"min_fidelity", min_fid},       {"failed", failed}};
        out << j.dump() << "\n";
    } else {
        out << "sweep: " << cfg.trials << " circuits, " << failures << " failures, " << audit_failures
            << " ledger violations, " << resource_mismatches << " resource mismatches\n";
        out << "min_fidelity " << fmt_fidelity(min_fid) << "\n";
    }
    return failures == 0 ? kSuccess : kVerificationFailed;
}

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 verification failure, 2 usage or parse error.
inline int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Two-party instantaneous nonlocal quantum computation simulator", "inqc"};
    app.require_subcommand(1);

    CliConfig cfg;
    std::uint64_t default_seed = 0;
    if (const char *env = std::getenv("INQC_SEED")) {
        try {
            std::size_t used = 0;
            default_seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception &) {
            err << "error: INQC_SEED must be an unsigned integer, got '" << env << "'\n";
            return kUsageError;
        }
    }
    cfg.seed = default_seed;

    auto add_common = [&](CLI::App *sub, bool needs_circuit) {
        if (needs_circuit) sub->add_option("--circuit", cfg.circuit_path, "Circuit file")->required();
        sub->add_option("--seed", cfg.seed, "RNG seed (default: $INQC_SEED or 0)");
        sub->add_flag("--json", cfg.json, "Emit a single-line JSON report");
    };
    auto add_tolerance = [&](CLI::App *sub) {
        sub->add_option("--tolerance", cfg.tolerance, "Pass if fidelity >= 1 - tolerance")
            ->check([](const std::string &s) {
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
                bool ok = ec == std::errc{} && ptr == s.data() + s.size() && v > 0.0 && v < 1.0;
                return ok ? std::string{} : std::string("tolerance must be a number in (0, 1)");
            });
    };

    auto *run = app.add_subcommand("run", "Run the protocol once and check it against direct evaluation");
    add_common(run, true);
    add_tolerance(run);
    run->add_option("--force-outcomes", cfg.forced_outcomes, "Measurement outcomes to force, in run order");

    auto *verify = app.add_subcommand("verify", "Run one circuit under several seeds");
    add_common(verify, true);
    add_tolerance(verify);
    verify->add_option("--trials", cfg.trials, "Number of seeds")->check(CLI::PositiveNumber);
    verify->add_option("--force-outcomes", cfg.forced_outcomes, "Measurement outcomes to force, in run order");

    auto *estimate = app.add_subcommand("estimate", "Print resource requirements without running");
    add_common(estimate, true);

    auto *sweep = app.add_subcommand("sweep", "Run the protocol on random circuits");
    add_common(sweep, false);
    add_tolerance(sweep);
    sweep->add_option("--trials", cfg.trials, "Number of random circuits")->check(CLI::PositiveNumber);
    sweep->add_option("--max-wires", cfg.max_wires, "Largest wire count")->check(CLI::Range(1, 20));
    sweep->add_option("--max-gates", cfg.max_gates, "Largest gate count")->check(CLI::Range(1, 100000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kUsageError;
    }

    try {
        if (run->parsed()) return cmd_run(cfg, out);
        if (verify->parsed()) return cmd_verify(cfg, out);
        if (estimate->parsed()) return cmd_estimate(cfg, out);
        return cmd_sweep(cfg, out);
    } catch (const ParseError &e) {
        err << "parse error: " << e.what() << "\n";
        return kUsageError;
    } catch (const UsageError &e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
}

}  // namespace inqc::cli
