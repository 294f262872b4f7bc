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

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "inqc/circuit.hpp"
#include "inqc/pauli_frame.hpp"
#include "inqc/qsim.hpp"
#include "inqc/resources.hpp"

namespace inqc {

class ProtocolError : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

/// Outcome prefixes to force, consumed in the order the run performs measurements
/// (Bell measurements take two bits, m_x then m_z). Past the prefix, outcomes are sampled.
struct ForcedOutcomes {
    std::deque<Bit> measurements;
    std::deque<Bit> nlb_hidden;
};

/// The single seeded randomness source of a run, plus any forced prefixes.
class OutcomeSource {
   public:
    explicit OutcomeSource(std::uint64_t seed, ForcedOutcomes forced = {}) : rng_(seed), forced_(std::move(forced)) {}

    std::optional<Bit> next_measurement() { return pop(forced_.measurements); }

    std::optional<std::pair<Bit, Bit>> next_bell() {
        if (forced_.measurements.empty()) return std::nullopt;
        if (forced_.measurements.size() < 2) {
            throw std::invalid_argument("forced outcome list ends in the middle of a Bell measurement");
        }
        Bit mx = *pop(forced_.measurements);
        Bit mz = *pop(forced_.measurements);
        return std::pair<Bit, Bit>{mx, mz};
    }

    std::optional<Bit> next_hidden() { return pop(forced_.nlb_hidden); }

    std::mt19937_64 &rng() noexcept { return rng_; }

   private:
    static std::optional<Bit> pop(std::deque<Bit> &q) {
        if (q.empty()) return std::nullopt;
        Bit b = q.front();
        q.pop_front();
        return static_cast<Bit>(b & 1);
    }

    std::mt19937_64 rng_;
    ForcedOutcomes forced_;
};

enum class GadgetSchedule : std::uint8_t { AliceFirst, BobFirst };

struct GadgetResult {
    Bit c{0};
    Bit d{0};
    Bit nlb_a{0};
    Bit nlb_b{0};
    /// Joint probability of the (c, d) branch taken.
    double probability{1.0};
    /// Alice's half of the EPR pair, which now carries the wire.
    QubitId output;
};

/// Entanglement + NLB evaluation of T on an encrypted wire.
///
/// Alice: T on the wire, CNOT from her EPR half onto the wire, measure the wire (c),
/// then P^{x^A} on her EPR half. Bob: P^{x^B} and H on his EPR half, measure (d).
/// The box is queried with x^A ^ c (Alice) and x^B (Bob), so nlb_a ^ nlb_b = (x^A ^ c) x^B,
/// and both parties then update their own key shares. No classical message is exchanged.
inline GadgetResult run_t_gadget(StateVector &state, KeyTable &keys, WireId wire, QubitId wire_qubit,
                                 std::pair<QubitId, QubitId> epr, NlbInstance &nlb, OutcomeSource &src,
                                 GadgetSchedule schedule = GadgetSchedule::AliceFirst) {
    const auto [alice_half, bob_half] = epr;
    const KeyShare alice_pre = keys.share(Party::A, wire);
    const KeyShare bob_pre = keys.share(Party::B, wire);
    GadgetResult r;
    r.output = alice_half;

    auto query = [&](Party side, Bit input) {
        if (!nlb.used(other(side)) && !nlb.used(side)) {
            if (auto h = src.next_hidden()) return nlb.query_with_hidden(side, input, *h);
        }
        return nlb.query(side, input, src.rng());
    };

    auto alice_steps = [&] {
        state.apply(GateKind::T, wire_qubit);
        state.apply(Gate::cnot(alice_half, wire_qubit));
        auto m = state.measure_z(wire_qubit, src.next_measurement(), src.rng());
        r.c = m.bit;
        r.probability *= m.probability;
        if (alice_pre.x) state.apply(GateKind::P, alice_half);
        r.nlb_a = query(Party::A, static_cast<Bit>(alice_pre.x ^ r.c));
    };
    auto bob_steps = [&] {
        if (bob_pre.x) state.apply(GateKind::P, bob_half);
        state.apply(GateKind::H, bob_half);
        auto m = state.measure_z(bob_half, src.next_measurement(), src.rng());
        r.d = m.bit;
        r.probability *= m.probability;
        r.nlb_b = query(Party::B, bob_pre.x);
    };

    if (schedule == GadgetSchedule::AliceFirst) {
        alice_steps();
        bob_steps();
    } else {
        bob_steps();
        alice_steps();
    }
    keys.apply_t_update(wire, r.c, r.d, r.nlb_a, r.nlb_b);
    return r;
}

/// Direct, unencrypted evaluation. Wire w is the qubit at position w of `state`.
struct OracleResult {
    StateVector state;

    /// Exact Born probability that measuring `wire` gives 1.
    double probability_of_one(WireId wire) const { return state.probability_of_one(QubitId{static_cast<std::uint32_t>(wire)}); }
};

inline OracleResult oracle_evaluate(const Circuit &c) {
    c.validate();
    StateVector s;
    for (std::size_t w = 0; w < c.num_wires; ++w) {
        auto a = c.initial_states[w].amplitudes();
        s.add_qubit(a[0], a[1]);
    }
    auto q = [](WireId w) { return QubitId{static_cast<std::uint32_t>(w)}; };
    for (const auto &g : c.gates) {
        if (g.kind == GateKind::CNOT) {
            s.apply(Gate::cnot(q(g.control()), q(g.cnot_target())));
        } else {
            s.apply(g.kind, q(g.target()));
        }
    }
    return OracleResult{std::move(s)};
}

struct TranscriptEntry {
    std::string step;
    Party party{Party::A};
    WireId wire{0};
    std::optional<std::size_t> gate;
    std::vector<Bit> bits;

    bool operator==(const TranscriptEntry &) const = default;
};

/// Data a party produced locally during a T gadget.
struct GadgetRecord {
    std::size_t gate_index{0};
    Bit measurement{0};
    Bit nlb_output{0};
};

/// What one party holds. Key shares live in the run's KeyTable and are read through
/// `KeyTable::shares(party)`; nothing from the other party arrives before FINAL_EXCHANGE.
struct PartyState {
    Party party{Party::A};
    std::map<WireId, QubitId> wire_map;
    std::vector<GadgetRecord> pending_gadget_outcomes;
    /// Encrypted results of this party's terminal measurements, by wire.
    std::map<WireId, Bit> measured;
    /// The other party's final message, available only after the exchange.
    std::vector<Bit> received;
};

struct OutputRecord {
    WireId wire{0};
    std::optional<Party> owner;
    OutputKind kind{OutputKind::Quantum};
    double fidelity{0.0};
    std::optional<Bit> bit;
    std::optional<double> oracle_probability;
};

struct RunReport {
    std::string circuit_hash;
    std::uint64_t seed{0};
    std::vector<Phase> phase_log;
    ResourceEstimate estimate;
    std::size_t epr_consumed{0};
    std::size_t nlb_consumed{0};
    std::vector<LedgerEvent> ledger;
    AuditResult audit;
    KeyTable keys_final;
    std::vector<OutputRecord> outputs;
    double joint_fidelity{0.0};
    double oracle_fidelity_min{0.0};
    std::vector<TranscriptEntry> transcript;

    bool resources_exact() const {
        return epr_consumed == estimate.epr && nlb_consumed == estimate.nlb;
    }

    bool passed(double tolerance = kFidelityTolerance) const {
        return audit.passed && resources_exact() && oracle_fidelity_min >= 1.0 - tolerance;
    }
};

/// FNV-1a over the canonical text form, as 16 hex digits.
inline std::string circuit_hash(const Circuit &c) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : print_circuit(c)) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    return out;
}

/// Compares the decrypted protocol outputs against direct evaluation. `measured_bits`
/// holds the decrypted value of every classical and discarded wire; `outputs` is the
/// protocol's joint state of the quantum output wires, in wire order.
struct OracleComparison {
    double joint_fidelity{0.0};
    std::map<WireId, double> wire_fidelity;
    std::map<WireId, double> conditional_probability;
    bool bits_consistent{true};
};

inline OracleComparison compare_with_oracle(const OracleResult &oracle, const std::map<WireId, Bit> &measured_bits,
                                            const StateVector &outputs) {
    OracleComparison cmp;
    StateVector conditioned = oracle.state;
    std::mt19937_64 unused(0);
    for (const auto &[wire, bit] : measured_bits) {
        QubitId q{static_cast<std::uint32_t>(wire)};
        double p1 = conditioned.probability_of_one(q);
        double p = bit ? p1 : 1.0 - p1;
        cmp.conditional_probability[wire] = std::max(0.0, p);
        if (p <= kZeroBranchProbability) {
            cmp.bits_consistent = false;
            cmp.joint_fidelity = 0.0;
            return cmp;
        }
        conditioned.measure_z(q, bit, unused);
    }
    cmp.joint_fidelity = fidelity(conditioned, outputs);
    for (std::size_t k = 0; k < conditioned.num_qubits(); ++k) {
        QubitId oq = conditioned.qubits()[k];
        cmp.wire_fidelity[oq.value] =
            density_fidelity(conditioned.reduced_density(oq), outputs.reduced_density(outputs.qubits()[k]));
    }
    return cmp;
}

struct ProtocolOptions {
    GadgetSchedule schedule{GadgetSchedule::AliceFirst};
    ForcedOutcomes forced;
};

/// One execution of the two-party protocol over a shared simulator:
/// SETUP -> DISTRIBUTE -> EVALUATE -> FINAL_EXCHANGE -> DONE.
/// Both parties are interleaved deterministically on one thread; all cross-party
/// interaction goes through the ledger.
class ProtocolRun {
   public:
    ProtocolRun(Circuit circuit, std::uint64_t seed, ProtocolOptions options = {})
        : circuit_(std::move(circuit)),
          seed_(seed),
          schedule_(options.schedule),
          src_(seed, std::move(options.forced)),
          keys_(circuit_.num_wires) {
        circuit_.validate();
        alice_.party = Party::A;
        bob_.party = Party::B;
        phase_log_.push_back(Phase::Setup);
    }

    Phase phase() const noexcept { return phase_; }
    const Circuit &circuit() const noexcept { return circuit_; }
    const StateVector &state() const noexcept { return state_; }
    const KeyTable &keys() const noexcept { return keys_; }
    const ResourcePool &pool() const noexcept { return pool_; }
    const CommLedger &ledger() const noexcept { return ledger_; }
    const PartyState &party(Party p) const noexcept { return p == Party::A ? alice_ : bob_; }
    const std::vector<TranscriptEntry> &transcript() const noexcept { return transcript_; }
    std::size_t next_gate() const noexcept { return next_gate_; }

    /// Pre-agreed resources and the parties' input qubits.
    void setup() {
        require(Phase::Setup, "setup");
        pool_ = allocate_resources(circuit_, &ledger_);
        for (WireId w = 0; w < circuit_.num_wires; ++w) {
            auto a = circuit_.initial_states[w].amplitudes();
            QubitId q = state_.add_qubit(a[0], a[1]);
            holder(circuit_.input_owner[w]).wire_map[w] = q;
        }
        advance(Phase::Distribute);
    }

    /// Bob teleports each of his inputs to Alice and keeps the Bell outcomes as his key shares.
    void distribute_inputs() {
        require(Phase::Distribute, "distribute_inputs");
        for (WireId w = 0; w < circuit_.num_wires; ++w) {
            if (circuit_.input_owner[w] != Party::B) continue;
            auto slot = pool_.find_epr(EprPurpose::InputTeleport, w);
            auto [alice_half, bob_half] = pool_.consume_epr(slot, state_);
            QubitId input = bob_.wire_map.at(w);
            auto m = state_.bell_measure(input, bob_half, src_.next_bell(), src_.rng());
            keys_.teleport_update(Party::B, w, m.m_x, m.m_z);
            bob_.wire_map.erase(w);
            alice_.wire_map[w] = alice_half;
            transcript_.push_back({"input_teleport", Party::B, w, std::nullopt, {m.m_x, m.m_z}});
        }
        advance(Phase::Evaluate);
    }

    /// Gates must be evaluated in circuit order.
    void evaluate_gate(std::size_t gate_index) {
        require(Phase::Evaluate, "evaluate_gate");
        if (gate_index != next_gate_ || gate_index >= circuit_.gates.size()) {
            throw ProtocolError("gate " + std::to_string(gate_index) + " evaluated out of order (next is " +
                                std::to_string(next_gate_) + ")");
        }
        const GateOp &g = circuit_.gates[gate_index];
        if (g.kind == GateKind::T) {
            t_gadget(g.target(), gate_index);
        } else {
            if (g.kind == GateKind::CNOT) {
                state_.apply(Gate::cnot(alice_.wire_map.at(g.control()), alice_.wire_map.at(g.cnot_target())));
            } else {
                state_.apply(g.kind, alice_.wire_map.at(g.target()));
            }
            keys_.clifford_update(g);
        }
        ++next_gate_;
    }

    void evaluate_all() {
        while (next_gate_ < circuit_.gates.size()) evaluate_gate(next_gate_);
    }

    GadgetResult t_gadget(WireId wire, std::size_t gate_index) {
        require(Phase::Evaluate, "t_gadget");
        auto slot = pool_.find_epr(EprPurpose::TGadget, gate_index);
        auto &box = pool_.nlb(pool_.find_nlb(gate_index));
        if (box.used(Party::A) || box.used(Party::B)) {
            throw ProtocolError("NLB for gate " + std::to_string(gate_index) + " already used");
        }
        auto epr = pool_.consume_epr(slot, state_);
        auto r = run_t_gadget(state_, keys_, wire, alice_.wire_map.at(wire), epr, box, src_, schedule_);
        alice_.wire_map[wire] = r.output;
        alice_.pending_gadget_outcomes.push_back({gate_index, r.c, r.nlb_a});
        bob_.pending_gadget_outcomes.push_back({gate_index, r.d, r.nlb_b});
        const Party first = box.first_querier().value_or(Party::A);
        ledger_.record(LedgerEvent{Phase::Evaluate, first, other(first), Channel::Nlb, 0});
        ledger_.record(LedgerEvent{Phase::Evaluate, other(first), first, Channel::Nlb, 0});
        transcript_.push_back({"gadget_c", Party::A, wire, gate_index, {r.c}});
        transcript_.push_back({"gadget_d", Party::B, wire, gate_index, {r.d}});
        transcript_.push_back({"nlb", Party::A, wire, gate_index, {r.nlb_a}});
        transcript_.push_back({"nlb", Party::B, wire, gate_index, {r.nlb_b}});
        return r;
    }

    /// Output teleports, the one simultaneous key exchange, local decryption, and the oracle check.
    RunReport finalize() {
        require(Phase::Evaluate, "finalize");
        if (next_gate_ != circuit_.gates.size()) {
            throw ProtocolError("finalize called with " + std::to_string(circuit_.gates.size() - next_gate_) +
                                " gates left");
        }
        advance(Phase::FinalExchange);

        // Local steps before the barrier. Alice holds every wire at this point.
        std::map<WireId, Bit> discarded;
        for (WireId w = 0; w < circuit_.num_wires; ++w) {
            const auto &o = circuit_.outputs[w];
            QubitId q = alice_.wire_map.at(w);
            if (o.owner == Party::B && o.kind == OutputKind::Quantum) {
                auto slot = pool_.find_epr(EprPurpose::OutputTeleport, w);
                auto [alice_half, bob_half] = pool_.consume_epr(slot, state_);
                auto m = state_.bell_measure(q, alice_half, src_.next_bell(), src_.rng());
                keys_.teleport_update(Party::A, w, m.m_x, m.m_z);
                alice_.wire_map.erase(w);
                bob_.wire_map[w] = bob_half;
                transcript_.push_back({"output_teleport", Party::A, w, std::nullopt, {m.m_x, m.m_z}});
            } else if (o.discarded() || o.kind == OutputKind::Classical) {
                auto m = state_.measure_z(q, src_.next_measurement(), src_.rng());
                alice_.wire_map.erase(w);
                if (o.discarded()) {
                    discarded[w] = m.bit;
                    transcript_.push_back({"measure_discard", Party::A, w, std::nullopt, {m.bit}});
                } else {
                    alice_.measured[w] = m.bit;
                    transcript_.push_back({"measure_classical", Party::A, w, std::nullopt, {m.bit}});
                }
            }
        }

        // Both messages are built from pre-barrier state, then delivered together.
        std::vector<Bit> to_bob = outgoing_message(Party::A);
        std::vector<Bit> to_alice = outgoing_message(Party::B);
        ledger_.record(LedgerEvent{Phase::FinalExchange, Party::A, Party::B, Channel::Classical, to_bob.size()});
        ledger_.record(LedgerEvent{Phase::FinalExchange, Party::B, Party::A, Channel::Classical, to_alice.size()});
        bob_.received = std::move(to_bob);
        alice_.received = std::move(to_alice);

        std::map<WireId, Bit> decrypted_bits;
        decrypt(alice_, decrypted_bits);
        decrypt(bob_, decrypted_bits);

        // Verifier view: the discarded wires are decrypted with both shares.
        std::map<WireId, Bit> measured_bits = decrypted_bits;
        for (const auto &[w, m] : discarded) measured_bits[w] = static_cast<Bit>(m ^ keys_.decrypt_key(w).x);

        advance(Phase::Done);
        return build_report(decrypted_bits, measured_bits);
    }

    RunReport run() {
        setup();
        distribute_inputs();
        evaluate_all();
        return finalize();
    }

   private:
    void require(Phase p, const char *op) const {
        if (phase_ != p) {
            throw ProtocolError(std::string(op) + " requires phase " + std::string(phase_name(p)) + ", run is in " +
                                std::string(phase_name(phase_)));
        }
    }

    void advance(Phase p) {
        phase_ = p;
        phase_log_.push_back(p);
    }

    PartyState &holder(Party p) { return p == Party::A ? alice_ : bob_; }

    /// What `sender` owes the other party: 2 key bits per quantum output, 1 bit per classical output.
    std::vector<Bit> outgoing_message(Party sender) const {
        const PartyState &me = party(sender);
        std::vector<Bit> msg;
        for (WireId w = 0; w < circuit_.num_wires; ++w) {
            const auto &o = circuit_.outputs[w];
            if (o.owner != other(sender)) continue;
            const KeyShare &s = keys_.share(sender, w);
            if (o.kind == OutputKind::Quantum) {
                msg.push_back(s.x);
                msg.push_back(s.z);
            } else if (auto it = me.measured.find(w); it != me.measured.end()) {
                msg.push_back(static_cast<Bit>(it->second ^ s.x));
            } else {
                msg.push_back(s.x);
            }
        }
        return msg;
    }

    void decrypt(PartyState &me, std::map<WireId, Bit> &bits) {
        std::size_t cursor = 0;
        for (WireId w = 0; w < circuit_.num_wires; ++w) {
            const auto &o = circuit_.outputs[w];
            if (o.owner != me.party) continue;
            const KeyShare &mine = keys_.share(me.party, w);
            if (o.kind == OutputKind::Quantum) {
                Bit x = static_cast<Bit>(mine.x ^ me.received.at(cursor++));
                Bit z = static_cast<Bit>(mine.z ^ me.received.at(cursor++));
                QubitId q = me.wire_map.at(w);
                if (x) state_.apply(GateKind::X, q);
                if (z) state_.apply(GateKind::Z, q);
            } else if (auto it = me.measured.find(w); it != me.measured.end()) {
                bits[w] = static_cast<Bit>(it->second ^ mine.x ^ me.received.at(cursor++));
            } else {
                bits[w] = static_cast<Bit>(me.received.at(cursor++) ^ mine.x);
            }
        }
    }

    RunReport build_report(const std::map<WireId, Bit> &decrypted_bits, const std::map<WireId, Bit> &measured_bits) {
        RunReport rep;
        rep.circuit_hash = circuit_hash(circuit_);
        rep.seed = seed_;
        rep.phase_log = phase_log_;
        rep.estimate = estimate_resources(circuit_);
        rep.epr_consumed = pool_.epr_consumed();
        rep.nlb_consumed = pool_.nlb_fully_used();
        rep.ledger = ledger_.events();
        rep.audit = ledger_.audit();
        rep.keys_final = keys_;
        rep.transcript = transcript_;

        std::vector<QubitId> order;
        for (WireId w = 0; w < circuit_.num_wires; ++w) {
            const auto &o = circuit_.outputs[w];
            if (o.owner && o.kind == OutputKind::Quantum) order.push_back(holder(*o.owner).wire_map.at(w));
        }
        StateVector outputs = state_.reordered(order);
        auto cmp = compare_with_oracle(oracle_evaluate(circuit_), measured_bits, outputs);

        rep.joint_fidelity = cmp.joint_fidelity;
        rep.oracle_fidelity_min = cmp.bits_consistent ? cmp.joint_fidelity : 0.0;
        for (WireId w = 0; w < circuit_.num_wires; ++w) {
            const auto &o = circuit_.outputs[w];
            if (o.discarded()) continue;
            OutputRecord r{w, o.owner, o.kind, 0.0, std::nullopt, std::nullopt};
            if (o.kind == OutputKind::Quantum) {
                auto it = cmp.wire_fidelity.find(w);
                r.fidelity = it == cmp.wire_fidelity.end() ? 0.0 : it->second;
            } else {
                r.bit = decrypted_bits.at(w);
                auto it = cmp.conditional_probability.find(w);
                r.oracle_probability = it == cmp.conditional_probability.end() ? 0.0 : it->second;
                r.fidelity = *r.oracle_probability > kZeroBranchProbability ? 1.0 : 0.0;
            }
            rep.oracle_fidelity_min = std::min(rep.oracle_fidelity_min, r.fidelity);
            rep.outputs.push_back(r);
        }
        return rep;
    }

    Circuit circuit_;
    std::uint64_t seed_;
    GadgetSchedule schedule_;
    OutcomeSource src_;
    Phase phase_{Phase::Setup};
    std::vector<Phase> phase_log_;
    StateVector state_;
    KeyTable keys_;
    ResourcePool pool_;
    CommLedger ledger_;
    PartyState alice_;
    PartyState bob_;
    std::size_t next_gate_{0};
    std::vector<TranscriptEntry> transcript_;
};

inline RunReport run_protocol(const Circuit &c, std::uint64_t seed, ProtocolOptions options = {}) {
    return ProtocolRun(c, seed, std::move(options)).run();
}

/// Only Alice receives output, on a single wire. Bob's final message shrinks to his two
/// key bits (quantum output) or his x bit (classical output); Alice's message is empty.
inline RunReport run_single_output_variant(const Circuit &c, std::uint64_t seed, ProtocolOptions options = {}) {
    std::size_t outputs = 0;
    for (const auto &o : c.outputs) {
        if (o.discarded()) continue;
        if (o.owner != Party::A) throw std::invalid_argument("single-output variant: Bob must receive no output");
        ++outputs;
    }
    if (outputs != 1) {
        throw std::invalid_argument("single-output variant needs exactly one output wire, found " +
                                    std::to_string(outputs));
    }
    return run_protocol(c, seed, std::move(options));
}

}  // namespace inqc
