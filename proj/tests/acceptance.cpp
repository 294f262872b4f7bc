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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "inqc/protocol.hpp"
#include "test_util.hpp"

using namespace inqc;
using namespace inqc::testing;

namespace {

constexpr double kFidelityTol = 1e-9;
constexpr double kMatrixTol = 1e-12;
constexpr std::uint64_t kSweepSeed = 20260401;
constexpr int kSweepCircuits = 100;


struct Outcome {
    bool pass{true};
    std::string detail;
};

KeyShare share_from_bits(int bits) { return {static_cast<Bit>(bits & 1), static_cast<Bit>((bits >> 1) & 1)}; }

// ---------------------------------------------------------------------------

Outcome t_gadget_exhaustive() {
    std::mt19937_64 rng(1);
    double worst = 1.0;
    int cases = 0, key_mismatches = 0;
    for (int keys = 0; keys < 16; ++keys) {
        KeyShare a = share_from_bits(keys), b = share_from_bits(keys >> 2);
        for (int s = 0; s < 20; ++s) {
            Vec2 psi = random_qubit(rng);
            for (Bit c = 0; c < 2; ++c) {
                for (Bit d = 0; d < 2; ++d) {
                    StateVector st = state_of(psi);
                    QubitId q = st.qubits()[0];
                    Bit x = a.x ^ b.x, z = a.z ^ b.z;
                    st.apply_pauli(q, x, z);
                    KeyTable table(1);
                    table.set_share(Party::A, 0, a);
                    table.set_share(Party::B, 0, b);
                    auto epr = st.make_epr();
                    NlbInstance box(0, 0);
                    OutcomeSource src(rng(), ForcedOutcomes{{c, d}, {}});
                    GadgetResult r = run_t_gadget(st, table, 0, q, epr, box, src, GadgetSchedule::AliceFirst);

                    Bit kx = x ^ c;
                    Bit kz = x ^ z ^ (a.x & c) ^ ((a.x ^ c) & b.x) ^ d;
                    if (!(table.decrypt_key(0) == KeyShare{kx, kz})) ++key_mismatches;
                    if (kx) st.apply(GateKind::X, r.output);
                    if (kz) st.apply(GateKind::Z, r.output);
                    double f = overlap_abs(mat_t() * psi, st);
                    worst = std::min(worst, f * f);
                    ++cases;
                }
            }
        }
    }
    std::ostringstream os;
    os.precision(15);
    os << cases << " cases, min fidelity " << worst << ", key-table mismatches " << key_mismatches;
    return {worst >= 1 - kFidelityTol && cases == 1280 && key_mismatches == 0, os.str()};
}

Outcome derivation_identity() {
    int bad = 0;
    for (int bits = 0; bits < 64; ++bits) {
        Bit xa = bits & 1, xb = (bits >> 1) & 1, za = (bits >> 2) & 1, zb = (bits >> 3) & 1, c = (bits >> 4) & 1,
            d = (bits >> 5) & 1;
        Bit x = xa ^ xb, z = za ^ zb;
        Mat2 lhs =
            pow(mat_z(), d) * pow(mat_p(), xa + xb) * pow(mat_x(), c) * mat_t() * pow(mat_x(), x) * pow(mat_z(), z);
        Mat2 rhs = pow(mat_x(), x ^ c) * pow(mat_z(), x ^ z ^ (xa & c) ^ ((xa ^ c) & xb) ^ d) * mat_t();
        if (!equal_up_to_phase(lhs, rhs, kMatrixTol)) ++bad;
    }
    return {bad == 0, "64 combinations, " + std::to_string(bad) + " mismatches"};
}

Outcome gate_identities() {
    using K = GateKind;
    auto U = [](std::vector<K> seq) { return simulated_unitary(seq); };  // seq in application order
    struct Check {
        const char *name;
        Mat2 lhs, rhs;
    };
    std::vector<Check> checks = {
        {"P^2 = Z", U({K::P, K::P}), U({K::Z})},
        {"T^2 = P", U({K::T, K::T}), U({K::P})},
        {"T^8 = I", U(std::vector<K>(8, K::T)), mat_i()},
        {"TX = PXT", U({K::X, K::T}), U({K::T, K::X, K::P})},
        {"TZ = ZT", U({K::Z, K::T}), U({K::T, K::Z})},
        {"PX = XZP", U({K::X, K::P}), U({K::P, K::Z, K::X})},
    };
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            std::vector<K> lhs(static_cast<std::size_t>(a ^ b), K::P);
            std::vector<K> rhs(static_cast<std::size_t>(a + b), K::P);
            if (a & b) rhs.push_back(K::Z);
            checks.push_back({"P^{a^b} = Z^{ab} P^{a+b}", U(lhs), U(rhs)});
        }
    }
    std::string failed;
    for (const auto &c : checks) {
        if (!equal_up_to_phase(c.lhs, c.rhs, kMatrixTol)) failed += std::string(" ") + c.name;
    }
    return {failed.empty(), std::to_string(checks.size()) + " identities" + (failed.empty() ? "" : ", failed:" + failed)};
}

struct SweepStats {
    int runs{0};
    double min_fidelity{1.0};
    int resource_mismatches{0};
    int audit_failures{0};
    int t_cap_violations{0};
};

SweepStats run_sweep() {
    SweepStats s;
    std::mt19937_64 gen(kSweepSeed);
    RandomCircuitOptions opt;
    for (int i = 0; i < kSweepCircuits; ++i) {
        Circuit c = random_circuit(opt, gen);
        if (c.num_wires > 6 || c.gates.size() > 40 || c.count_t_gates() > 10) ++s.t_cap_violations;
        RunReport r = run_protocol(c, kSweepSeed + static_cast<std::uint64_t>(i));
        ++s.runs;
        s.min_fidelity = std::min(s.min_fidelity, r.oracle_fidelity_min);
        std::size_t expected_epr = c.count_inputs(Party::B) + c.count_t_gates() +
                                   c.count_outputs(Party::B, OutputKind::Quantum);
        if (r.epr_consumed != expected_epr || r.nlb_consumed != c.count_t_gates() || !r.resources_exact()) {
            ++s.resource_mismatches;
        }
        if (!r.audit.passed) ++s.audit_failures;
    }
    return s;
}

Outcome communication_collapse(int &audit_failures) {
    std::mt19937_64 gen(kSweepSeed + 7);
    RandomCircuitOptions opt;
    double worst = 1.0;
    int bit_mismatches = 0, runs = 0;
    for (int i = 0; i < 50; ++i) {
        Circuit c = random_circuit(opt, gen);
        for (auto &o : c.outputs) o = OutputSpec{};
        WireId w = static_cast<WireId>(i) % c.num_wires;
        bool classical = i % 2 == 1;
        c.outputs[w] = OutputSpec{Party::A, classical ? OutputKind::Classical : OutputKind::Quantum};
        RunReport r = run_single_output_variant(c, kSweepSeed + 1000 + static_cast<std::uint64_t>(i));
        ++runs;
        worst = std::min(worst, r.oracle_fidelity_min);
        std::size_t want_ba = classical ? 1 : 2;
        if (r.audit.bits_ba != want_ba || r.audit.bits_ab != 0) ++bit_mismatches;
        if (!r.audit.passed) ++audit_failures;
    }
    std::ostringstream os;
    os.precision(15);
    os << runs << " runs (quantum and classical), min fidelity " << worst << ", bit-count mismatches "
       << bit_mismatches;
    return {worst >= 1 - kFidelityTol && bit_mismatches == 0, os.str()};
}

Outcome nlb_contract() {
    int correlation_failures = 0, signalling = 0;
    for (int order = 0; order < 2; ++order) {
        for (Bit x = 0; x < 2; ++x) {
            for (Bit y = 0; y < 2; ++y) {
                for (Bit h = 0; h < 2; ++h) {
                    NlbInstance box(0, 0);
                    Bit a, b;
                    if (order == 0) {
                        a = box.query_with_hidden(Party::A, x, h);
                        b = box.query_with_hidden(Party::B, y, h);
                    } else {
                        b = box.query_with_hidden(Party::B, y, h);
                        a = box.query_with_hidden(Party::A, x, h);
                    }
                    if ((a ^ b) != (x & y)) ++correlation_failures;
                }
            }
        }
    }
    // Counterfactual: same hidden bit, Alice queries, then Bob with either input.
    for (Bit x = 0; x < 2; ++x) {
        for (Bit h = 0; h < 2; ++h) {
            NlbInstance with0(0, 0), with1(0, 0);
            Bit a0 = with0.query_with_hidden(Party::A, x, h);
            with0.query_with_hidden(Party::B, 0, h);
            Bit a1 = with1.query_with_hidden(Party::A, x, h);
            with1.query_with_hidden(Party::B, 1, h);
            if (a0 != a1) ++signalling;
        }
    }
    // Bob first: Alice's output distribution over the hidden bit is the same for either Bob input.
    for (Bit x = 0; x < 2; ++x) {
        int ones[2] = {0, 0};
        for (Bit y = 0; y < 2; ++y) {
            for (Bit h = 0; h < 2; ++h) {
                NlbInstance box(0, 0);
                box.query_with_hidden(Party::B, y, h);
                ones[y] += box.query_with_hidden(Party::A, x, h);
            }
        }
        if (ones[0] != ones[1]) ++signalling;
    }
    return {correlation_failures == 0 && signalling == 0,
            "16 exhaustive queries, correlation failures " + std::to_string(correlation_failures) +
                ", signalling cases " + std::to_string(signalling)};
}

// Unitary of a gate list on n qubits as realized by the simulator; column j is the image of |j>.
Eigen::MatrixXcd simulator_unitary(const std::vector<Gate> &gates, std::size_t n) {
    std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXcd u(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<Amplitude> amps(dim, 0.0);
        amps[j] = 1.0;
        StateVector s = StateVector::from_amplitudes(amps);
        for (const auto &g : gates) s.apply(g);
        for (std::size_t i = 0; i < dim; ++i) u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s.amplitude(i);
    }
    return u;
}

bool equal_up_to_phase_n(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b, double tol) {
    Eigen::Index r = 0, c = 0;
    b.cwiseAbs().maxCoeff(&r, &c);
    if (std::abs(b(r, c)) < tol) return false;
    Amplitude phase = a(r, c) / b(r, c);
    if (std::abs(std::abs(phase) - 1.0) > tol) return false;
    return (a - phase * b).cwiseAbs().maxCoeff() <= tol;
}

Mat2 pauli(KeyShare k) { return pow(mat_x(), k.x) * pow(mat_z(), k.z); }

Outcome clifford_key_updates() {
    int checked = 0, bad = 0;
    // Single-qubit rules: X, Z, P, H over all four shares of both parties.
    for (GateKind kind : {GateKind::X, GateKind::Z, GateKind::P, GateKind::H}) {
        Eigen::MatrixXcd u = simulator_unitary({Gate::single(kind, QubitId{0})}, 1);
        for (int bits = 0; bits < 16; ++bits) {
            KeyTable t(1);
            t.set_share(Party::A, 0, share_from_bits(bits));
            t.set_share(Party::B, 0, share_from_bits(bits >> 2));
            Mat2 before = pauli(t.decrypt_key(0));
            t.clifford_update(GateOp::single(kind, 0));
            Mat2 after = pauli(t.decrypt_key(0));
            ++checked;
            if (!equal_up_to_phase_n(u * before, after * u, kMatrixTol)) ++bad;
        }
    }
    // CNOT in both orientations over all eight key bits of each party.
    for (int orient = 0; orient < 2; ++orient) {
        WireId ctl = orient == 0 ? 0 : 1, tgt = 1 - ctl;
        Eigen::MatrixXcd u = simulator_unitary(
            {Gate::cnot(QubitId{static_cast<std::uint32_t>(ctl)}, QubitId{static_cast<std::uint32_t>(tgt)})}, 2);
        for (int bits = 0; bits < 256; ++bits) {
            KeyTable t(2);
            t.set_share(Party::A, 0, share_from_bits(bits));
            t.set_share(Party::A, 1, share_from_bits(bits >> 2));
            t.set_share(Party::B, 0, share_from_bits(bits >> 4));
            t.set_share(Party::B, 1, share_from_bits(bits >> 6));
            Mat4 before = kron(pauli(t.decrypt_key(1)), pauli(t.decrypt_key(0)));
            t.clifford_update(GateOp::cnot(ctl, tgt));
            Mat4 after = kron(pauli(t.decrypt_key(1)), pauli(t.decrypt_key(0)));
            ++checked;
            if (!equal_up_to_phase_n(u * before, after * u, kMatrixTol)) ++bad;
        }
    }
    return {bad == 0, std::to_string(checked) + " conjugations over X, Z, P, H, CNOT; " + std::to_string(bad) +
                          " mismatches"};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char *name, const Outcome &o) {
        std::printf("[%s] criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        failures += o.pass ? 0 : 1;
    };

    report(1, "T-gadget exhaustive correctness", t_gadget_exhaustive());
    report(2, "algebraic derivation identity", derivation_identity());
    report(3, "gate identities", gate_identities());

    auto start = std::chrono::steady_clock::now();
    SweepStats sweep = run_sweep();
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    int collapse_audit_failures = 0;
    Outcome collapse = communication_collapse(collapse_audit_failures);

    {
        std::ostringstream os;
        os.precision(15);
        os << sweep.runs << " random circuits, min fidelity " << sweep.min_fidelity << ", bound violations "
           << sweep.t_cap_violations << ", " << seconds << " s";
        report(4, "end-to-end sweep", {sweep.min_fidelity >= 1 - kFidelityTol && sweep.t_cap_violations == 0, os.str()});
    }
    report(5, "linear resource consumption",
           {sweep.resource_mismatches == 0, std::to_string(sweep.resource_mismatches) + " mismatches in " +
                                                std::to_string(sweep.runs) + " runs"});
    report(6, "single classical round",
           {sweep.audit_failures == 0 && collapse_audit_failures == 0,
            std::to_string(sweep.audit_failures + collapse_audit_failures) + " ledger audit failures"});
    report(7, "communication collapse for a single Alice output", collapse);
    report(8, "NLB contract", nlb_contract());
    report(9, "Clifford key-update soundness", clifford_key_updates());

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
