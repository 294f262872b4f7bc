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
#include <array>
#include <cstddef>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "inqc/circuit.hpp"
#include "inqc/pauli_frame.hpp"
#include "inqc/qsim.hpp"

namespace inqc {

enum class Phase : std::uint8_t { Setup, Distribute, Evaluate, FinalExchange, Done };

constexpr std::string_view phase_name(Phase p) noexcept {
    switch (p) {
        case Phase::Setup:
            return "SETUP";
        case Phase::Distribute:
            return "DISTRIBUTE";
        case Phase::Evaluate:
            return "EVALUATE";
        case Phase::FinalExchange:
            return "FINAL_EXCHANGE";
        case Phase::Done:
            return "DONE";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// EPR slots
// ---------------------------------------------------------------------------

enum class EprPurpose : std::uint8_t { InputTeleport, TGadget, OutputTeleport };

constexpr std::string_view purpose_name(EprPurpose p) noexcept {
    switch (p) {
        case EprPurpose::InputTeleport:
            return "input_teleport";
        case EprPurpose::TGadget:
            return "t_gadget";
        case EprPurpose::OutputTeleport:
            return "output_teleport";
    }
    return "?";
}

/// A pre-agreed EPR pair. `target` is the wire (teleports) or gate index (T gadget) it serves.
/// The pair is materialized in the state vector when the slot is consumed.
struct EprSlot {
    std::size_t id{0};
    EprPurpose purpose{EprPurpose::InputTeleport};
    std::size_t target{0};
    std::optional<QubitId> alice_qubit;
    std::optional<QubitId> bob_qubit;
    bool consumed{false};
};

// ---------------------------------------------------------------------------
// Nonlocal box
// ---------------------------------------------------------------------------

/// Popescu-Rohrlich box: outputs satisfy a ^ b = x & y. The hidden bit is drawn at the
/// first query and returned to the first querier; the second querier receives
/// hidden ^ (x & y). Each side's marginal is therefore uniform whatever the other side's input.
class NlbInstance {
   public:
    NlbInstance() = default;
    NlbInstance(std::size_t id, std::size_t gate_index) : id_(id), gate_index_(gate_index) {}

    std::size_t id() const noexcept { return id_; }
    std::size_t gate_index() const noexcept { return gate_index_; }
    bool used(Party side) const noexcept { return side == Party::A ? input_a_.has_value() : input_b_.has_value(); }
    bool fully_used() const noexcept { return input_a_ && input_b_; }
    std::optional<Bit> hidden_bit() const noexcept { return hidden_; }
    std::optional<Party> first_querier() const noexcept { return first_; }

    template <RandomBitSource Rng>
    Bit query(Party side, Bit input, Rng &rng) {
        return query_impl(side, input, [&] { return static_cast<Bit>(std::uniform_int_distribution<int>(0, 1)(rng)); });
    }

    /// Same as query, with the hidden bit supplied instead of sampled (ignored if already drawn).
    Bit query_with_hidden(Party side, Bit input, Bit hidden) {
        return query_impl(side, input, [hidden] { return static_cast<Bit>(hidden & 1); });
    }

   private:
    template <typename Draw>
    Bit query_impl(Party side, Bit input, Draw &&draw) {
        auto &mine = side == Party::A ? input_a_ : input_b_;
        const auto &theirs = side == Party::A ? input_b_ : input_a_;
        if (mine) {
            throw std::logic_error("NLB " + std::to_string(id_) + " already queried by party " + party_letter(side));
        }
        mine = static_cast<Bit>(input & 1);
        if (!theirs) {
            hidden_ = draw();
            first_ = side;
            return *hidden_;
        }
        return static_cast<Bit>(*hidden_ ^ (*input_a_ & *input_b_));
    }

    std::size_t id_{0};
    std::size_t gate_index_{0};
    std::optional<Bit> input_a_;
    std::optional<Bit> input_b_;
    std::optional<Bit> hidden_;
    std::optional<Party> first_;
};

// ---------------------------------------------------------------------------
// Communication ledger
// ---------------------------------------------------------------------------

enum class Channel : std::uint8_t { EprSetup, Nlb, Classical };

constexpr std::string_view channel_name(Channel c) noexcept {
    switch (c) {
        case Channel::EprSetup:
            return "epr_setup";
        case Channel::Nlb:
            return "nlb";
        case Channel::Classical:
            return "classical";
    }
    return "?";
}

struct LedgerEvent {
    Phase phase{Phase::Setup};
    Party from{Party::A};
    Party to{Party::B};
    Channel channel{Channel::Classical};
    std::size_t payload_bits{0};

    bool operator==(const LedgerEvent &) const = default;
};

struct AuditViolation {
    std::size_t event_index{0};
    std::string message;
};

struct AuditResult {
    bool passed{true};
    std::vector<AuditViolation> violations;
    std::array<std::size_t, 3> events_per_channel{};
    std::array<std::size_t, 5> events_per_phase{};
    std::size_t bits_ab{0};
    std::size_t bits_ba{0};
    std::size_t messages_ab{0};
    std::size_t messages_ba{0};

    std::size_t classical_events() const noexcept { return events_per_channel[2]; }
};

/// Ordered record of every cross-party interaction.
class CommLedger {
   public:
    void record(const LedgerEvent &e) { events_.push_back(e); }
    const std::vector<LedgerEvent> &events() const noexcept { return events_; }

    /// Checks the single-round discipline. Never throws; problems come back as violations.
    AuditResult audit() const {
        AuditResult r;
        auto violate = [&](std::size_t i, std::string msg) {
            r.passed = false;
            r.violations.push_back({i, std::move(msg)});
        };
        for (std::size_t i = 0; i < events_.size(); ++i) {
            const auto &e = events_[i];
            r.events_per_channel[static_cast<std::size_t>(e.channel)]++;
            r.events_per_phase[static_cast<std::size_t>(e.phase)]++;
            if (e.from == e.to) violate(i, "event from a party to itself");
            switch (e.channel) {
                case Channel::EprSetup:
                    if (e.phase != Phase::Setup) {
                        violate(i, "EPR setup during " + std::string(phase_name(e.phase)));
                    }
                    if (e.payload_bits != 0) violate(i, "EPR setup carries classical payload");
                    break;
                case Channel::Nlb:
                    if (e.payload_bits != 0) violate(i, "NLB invocation carries classical payload");
                    if (e.phase != Phase::Evaluate) {
                        violate(i, "NLB invocation during " + std::string(phase_name(e.phase)));
                    }
                    break;
                case Channel::Classical:
                    if (e.phase != Phase::FinalExchange) {
                        violate(i, "classical message during " + std::string(phase_name(e.phase)));
                        break;
                    }
                    if (e.from == Party::A) {
                        r.messages_ab++;
                        r.bits_ab += e.payload_bits;
                    } else {
                        r.messages_ba++;
                        r.bits_ba += e.payload_bits;
                    }
                    break;
            }
        }
        if (r.messages_ab != 1) {
            violate(events_.size(), "expected exactly one Alice->Bob message in FINAL_EXCHANGE, found " +
                                        std::to_string(r.messages_ab));
        }
        if (r.messages_ba != 1) {
            violate(events_.size(), "expected exactly one Bob->Alice message in FINAL_EXCHANGE, found " +
                                        std::to_string(r.messages_ba));
        }
        return r;
    }

   private:
    std::vector<LedgerEvent> events_;
};

// ---------------------------------------------------------------------------
// Resource pool
// ---------------------------------------------------------------------------

/// Every nonlocal resource a run will use, fixed before the run starts. Slots are in the
/// canonical order both parties agree on: input teleports by wire, T gadgets by gate
/// index, output teleports by wire.
class ResourcePool {
   public:
    const std::vector<EprSlot> &epr_slots() const noexcept { return epr_; }
    const std::vector<NlbInstance> &nlbs() const noexcept { return nlb_; }

    std::size_t epr_consumed() const {
        return static_cast<std::size_t>(std::count_if(epr_.begin(), epr_.end(), [](const auto &s) { return s.consumed; }));
    }
    std::size_t nlb_fully_used() const {
        return static_cast<std::size_t>(std::count_if(nlb_.begin(), nlb_.end(), [](const auto &n) { return n.fully_used(); }));
    }

    std::size_t find_epr(EprPurpose purpose, std::size_t target) const {
        for (const auto &s : epr_) {
            if (s.purpose == purpose && s.target == target) return s.id;
        }
        throw std::out_of_range("no EPR slot for " + std::string(purpose_name(purpose)) + " " + std::to_string(target));
    }

    std::size_t find_nlb(std::size_t gate_index) const {
        for (const auto &n : nlb_) {
            if (n.gate_index() == gate_index) return n.id();
        }
        throw std::out_of_range("no NLB for gate " + std::to_string(gate_index));
    }

    /// Marks the slot consumed and materializes its pair in `state`. Returns (alice, bob) qubits.
    std::pair<QubitId, QubitId> consume_epr(std::size_t slot_id, StateVector &state) {
        EprSlot &s = epr_.at(slot_id);
        if (s.consumed) {
            throw std::logic_error("EPR slot " + std::to_string(slot_id) + " consumed twice");
        }
        auto [a, b] = state.make_epr();
        s.alice_qubit = a;
        s.bob_qubit = b;
        s.consumed = true;
        return {a, b};
    }

    NlbInstance &nlb(std::size_t id) { return nlb_.at(id); }

    void add_epr(EprPurpose purpose, std::size_t target) {
        epr_.push_back(EprSlot{epr_.size(), purpose, target, std::nullopt, std::nullopt, false});
    }
    void add_nlb(std::size_t gate_index) { nlb_.emplace_back(nlb_.size(), gate_index); }

   private:
    std::vector<EprSlot> epr_;
    std::vector<NlbInstance> nlb_;
};

/// Builds the pool for `c` and records one SETUP epr_setup event per slot.
inline ResourcePool allocate_resources(const Circuit &c, CommLedger *ledger = nullptr) {
    c.validate();
    ResourcePool pool;
    for (std::size_t w = 0; w < c.num_wires; ++w) {
        if (c.input_owner[w] == Party::B) pool.add_epr(EprPurpose::InputTeleport, w);
    }
    for (std::size_t g = 0; g < c.gates.size(); ++g) {
        if (c.gates[g].kind == GateKind::T) {
            pool.add_epr(EprPurpose::TGadget, g);
            pool.add_nlb(g);
        }
    }
    for (std::size_t w = 0; w < c.num_wires; ++w) {
        const auto &o = c.outputs[w];
        if (o.owner == Party::B && o.kind == OutputKind::Quantum) pool.add_epr(EprPurpose::OutputTeleport, w);
    }
    if (ledger) {
        for (std::size_t i = 0; i < pool.epr_slots().size(); ++i) {
            ledger->record(LedgerEvent{Phase::Setup, Party::A, Party::B, Channel::EprSetup, 0});
        }
    }
    return pool;
}

}  // namespace inqc
