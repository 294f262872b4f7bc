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
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "inqc/gates.hpp"

namespace inqc {

enum class Party : std::uint8_t { A, B };

constexpr Party other(Party p) noexcept { return p == Party::A ? Party::B : Party::A; }
constexpr char party_letter(Party p) noexcept { return p == Party::A ? 'A' : 'B'; }

using WireId = std::size_t;
using GateOp = BasicGate<WireId>;

/// One party's share of a wire's one-time-pad key.
struct KeyShare {
    Bit x{0};
    Bit z{0};

    KeyShare operator^(const KeyShare &o) const noexcept {
        return KeyShare{static_cast<Bit>(x ^ o.x), static_cast<Bit>(z ^ o.z)};
    }
    bool operator==(const KeyShare &) const = default;
};

/// Local update rules. Each one sees exactly one party's shares.
namespace key_rules {

/// Conjugation of the pad X^x Z^z through a Clifford gate, applied to one party's shares.
/// All five rules are XOR-linear, so applying them share-wise updates the global key.
inline void clifford(std::span<KeyShare> shares, const GateOp &gate) {
    switch (gate.kind) {
        case GateKind::X:
        case GateKind::Z:
            return;
        case GateKind::H:
            std::swap(shares[gate.target()].x, shares[gate.target()].z);
            return;
        case GateKind::P:
            shares[gate.target()].z ^= shares[gate.target()].x;
            return;
        case GateKind::CNOT: {
            KeyShare &c = shares[gate.control()];
            KeyShare &t = shares[gate.cnot_target()];
            t.x ^= c.x;
            c.z ^= t.z;
            return;
        }
        case GateKind::T:
            throw std::invalid_argument("T has no Clifford key rule; use the T-gadget update");
    }
}

/// Alice's half of the T-gadget update. `nlb_out` is her box output for input x^A xor c.
inline KeyShare t_gadget_alice(KeyShare pre, Bit c, Bit nlb_out) noexcept {
    return KeyShare{static_cast<Bit>(pre.x ^ c),
                    static_cast<Bit>(nlb_out ^ pre.x ^ pre.z ^ (pre.x & c))};
}

/// Bob's half of the T-gadget update. `nlb_out` is his box output for input x^B.
inline KeyShare t_gadget_bob(KeyShare pre, Bit d, Bit nlb_out) noexcept {
    return KeyShare{pre.x, static_cast<Bit>(nlb_out ^ pre.x ^ pre.z ^ d)};
}

}  // namespace key_rules

/// Distributed one-time-pad keys: for every live wire, both parties hold a KeyShare and
/// the state of wire i is recovered by X^{xA^xB} Z^{zA^zB}.
class KeyTable {
   public:
    KeyTable() = default;
    explicit KeyTable(std::size_t num_wires) : alice_(num_wires), bob_(num_wires), live_(num_wires, true) {}

    std::size_t num_wires() const noexcept { return live_.size(); }
    bool is_live(WireId w) const noexcept { return w < live_.size() && live_[w]; }

    const KeyShare &share(Party p, WireId w) const {
        check_live(w);
        return shares(p)[w];
    }

    void set_share(Party p, WireId w, KeyShare s) {
        check_live(w);
        mutable_shares(p)[w] = s;
    }

    std::span<const KeyShare> shares(Party p) const noexcept { return p == Party::A ? alice_ : bob_; }

    void clifford_update(const GateOp &gate) {
        check_live(gate.targets[0]);
        if (arity(gate.kind) == 2) {
            check_live(gate.targets[1]);
            if (gate.targets[0] == gate.targets[1]) {
                throw std::invalid_argument("CNOT targets must be distinct");
            }
        }
        if (gate.kind == GateKind::T) {
            throw std::invalid_argument("T has no Clifford key rule; use apply_t_update");
        }
        key_rules::clifford(alice_, gate);
        key_rules::clifford(bob_, gate);
    }

    /// The sender of a teleport absorbs the Bell outcome into its own share.
    void teleport_update(Party sender, WireId w, Bit m_x, Bit m_z) {
        check_live(w);
        mutable_shares(sender)[w] = share(sender, w) ^ KeyShare{m_x, m_z};
    }

    /// Requires nlb_a ^ nlb_b == (x^A ^ c) & x^B for the keys held before this call.
    void apply_t_update(WireId w, Bit c, Bit d, Bit nlb_a, Bit nlb_b) {
        check_live(w);
        KeyShare a = key_rules::t_gadget_alice(alice_[w], c, nlb_a);
        KeyShare b = key_rules::t_gadget_bob(bob_[w], d, nlb_b);
        alice_[w] = a;
        bob_[w] = b;
    }

    /// Global key (x, z) of wire w.
    KeyShare decrypt_key(WireId w) const {
        check_live(w);
        return alice_[w] ^ bob_[w];
    }

    void retire(WireId w) {
        check_live(w);
        live_[w] = false;
    }

    bool operator==(const KeyTable &) const = default;

   private:
    std::span<KeyShare> mutable_shares(Party p) noexcept { return p == Party::A ? std::span<KeyShare>(alice_) : bob_; }

    void check_live(WireId w) const {
        if (w >= live_.size()) {
            throw std::out_of_range("wire " + std::to_string(w) + " out of range");
        }
        if (!live_[w]) {
            throw std::invalid_argument("wire " + std::to_string(w) + " is no longer live");
        }
    }

    std::vector<KeyShare> alice_;
    std::vector<KeyShare> bob_;
    std::vector<bool> live_;
};

}  // namespace inqc
