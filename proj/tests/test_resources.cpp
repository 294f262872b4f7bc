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

#include "inqc/resources.hpp"

#include <gtest/gtest.h>

#include <random>

#include "inqc/circuit.hpp"
#include "inqc/protocol.hpp"

using namespace inqc;

namespace {

Circuit make(std::size_t wires, std::vector<Party> in, std::vector<OutputSpec> out, std::vector<GateOp> gates) {
    Circuit c;
    c.num_wires = wires;
    c.input_owner = std::move(in);
    c.outputs = std::move(out);
    c.initial_states.assign(wires, InitialState{});
    c.gates = std::move(gates);
    return c;
}

const OutputSpec kAq{Party::A, OutputKind::Quantum};
const OutputSpec kBq{Party::B, OutputKind::Quantum};

}  // namespace

TEST(resources, allocation_counts_and_order) {
    Circuit c = make(2, {Party::B, Party::A}, {kAq, kBq},
                     {GateOp::single(GateKind::T, 0), GateOp::single(GateKind::H, 1), GateOp::single(GateKind::T, 1)});
    CommLedger ledger;
    ResourcePool pool = allocate_resources(c, &ledger);
    ASSERT_EQ(pool.epr_slots().size(), 4u);
    ASSERT_EQ(pool.nlbs().size(), 2u);
    EXPECT_EQ(pool.epr_slots()[0].purpose, EprPurpose::InputTeleport);
    EXPECT_EQ(pool.epr_slots()[0].target, 0u);
    EXPECT_EQ(pool.epr_slots()[1].purpose, EprPurpose::TGadget);
    EXPECT_EQ(pool.epr_slots()[1].target, 0u);
    EXPECT_EQ(pool.epr_slots()[2].target, 2u);
    EXPECT_EQ(pool.epr_slots()[3].purpose, EprPurpose::OutputTeleport);
    EXPECT_EQ(pool.epr_slots()[3].target, 1u);
    EXPECT_EQ(pool.nlbs()[1].gate_index(), 2u);
    EXPECT_EQ(ledger.events().size(), 4u);
    for (const auto &e : ledger.events()) EXPECT_EQ(e.channel, Channel::EprSetup);
}

TEST(resources, all_alice_clifford_needs_nothing) {
    Circuit c = make(2, {Party::A, Party::A}, {kAq, kAq}, {GateOp::cnot(0, 1)});
    ResourcePool pool = allocate_resources(c);
    EXPECT_TRUE(pool.epr_slots().empty());
    EXPECT_TRUE(pool.nlbs().empty());
}

TEST(resources, three_t_on_one_alice_wire) {
    Circuit c = make(1, {Party::A}, {kAq}, std::vector<GateOp>(3, GateOp::single(GateKind::T, 0)));
    ResourcePool pool = allocate_resources(c);
    EXPECT_EQ(pool.epr_slots().size(), 3u);
    EXPECT_EQ(pool.nlbs().size(), 3u);
}

TEST(resources, epr_slot_consumed_once) {
    Circuit c = make(1, {Party::B}, {kAq}, {});
    ResourcePool pool = allocate_resources(c);
    StateVector s;
    auto [a, b] = pool.consume_epr(0, s);
    EXPECT_NE(a, b);
    EXPECT_TRUE(pool.epr_slots()[0].consumed);
    EXPECT_EQ(pool.epr_consumed(), 1u);
    EXPECT_THROW(pool.consume_epr(0, s), std::logic_error);
    EXPECT_THROW(pool.consume_epr(7, s), std::out_of_range);
}

TEST(resources, nlb_correlation_exhaustive_both_orders) {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 8; ++rep) {
        for (Bit x = 0; x < 2; ++x) {
            for (Bit y = 0; y < 2; ++y) {
                NlbInstance ab(0, 0);
                Bit a = ab.query(Party::A, x, rng);
                Bit b = ab.query(Party::B, y, rng);
                EXPECT_EQ(a ^ b, x & y);
                EXPECT_TRUE(ab.fully_used());

                NlbInstance ba(0, 0);
                Bit b2 = ba.query(Party::B, y, rng);
                Bit a2 = ba.query(Party::A, x, rng);
                EXPECT_EQ(a2 ^ b2, x & y);
            }
        }
    }
}

TEST(resources, nlb_examples) {
    for (Bit h = 0; h < 2; ++h) {
        NlbInstance n(0, 0);
        Bit a = n.query_with_hidden(Party::A, 0, h);
        Bit b = n.query_with_hidden(Party::B, 1, 1 - h);
        EXPECT_EQ(a, h);
        EXPECT_EQ(b, a);

        NlbInstance m(0, 0);
        Bit a1 = m.query_with_hidden(Party::A, 1, h);
        Bit b1 = m.query_with_hidden(Party::B, 1, h);
        EXPECT_EQ(b1, a1 ^ 1);
    }
}

TEST(resources, nlb_double_query_throws) {
    std::mt19937_64 rng(2);
    NlbInstance n(3, 9);
    n.query(Party::B, 1, rng);
    EXPECT_THROW(n.query(Party::B, 0, rng), std::logic_error);
    n.query(Party::A, 1, rng);
    EXPECT_THROW(n.query(Party::A, 1, rng), std::logic_error);
}

TEST(resources, nlb_alice_marginal_uniform) {
    std::mt19937_64 rng(12345);
    int ones = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        NlbInstance n(0, 0);
        Bit y = static_cast<Bit>(t & 1);
        Bit x = static_cast<Bit>((t >> 1) & 1);
        // Bob queries first half the time so Alice's output is sometimes the correlated one.
        Bit a;
        if ((t >> 2) & 1) {
            n.query(Party::B, y, rng);
            a = n.query(Party::A, x, rng);
        } else {
            a = n.query(Party::A, x, rng);
            n.query(Party::B, y, rng);
        }
        ones += a;
    }
    EXPECT_LT(std::abs(double(ones) / trials - 0.5), 0.02);
}

TEST(resources, nlb_first_querier_output_ignores_other_input) {
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        for (Bit x = 0; x < 2; ++x) {
            Bit outs[2];
            for (Bit y = 0; y < 2; ++y) {
                std::mt19937_64 rng(seed);
                NlbInstance n(0, 0);
                outs[y] = n.query(Party::A, x, rng);
                n.query(Party::B, y, rng);
            }
            EXPECT_EQ(outs[0], outs[1]);
            // Symmetric statement with Bob first.
            for (Bit y = 0; y < 2; ++y) {
                std::mt19937_64 rng(seed);
                NlbInstance n(0, 0);
                outs[y] = n.query(Party::B, x, rng);
                n.query(Party::A, y, rng);
            }
            EXPECT_EQ(outs[0], outs[1]);
        }
    }
}

TEST(resources, ledger_audit_accepts_correct_run) {
    Circuit c = make(2, {Party::A, Party::B}, {kAq, kBq}, {GateOp::single(GateKind::T, 1), GateOp::cnot(1, 0)});
    RunReport r = run_protocol(c, 17);
    EXPECT_TRUE(r.audit.passed);
    EXPECT_EQ(r.audit.classical_events(), 2u);
    EXPECT_TRUE(r.audit.violations.empty());
}

TEST(resources, ledger_audit_flags_classical_message_during_evaluation) {
    CommLedger l;
    l.record({Phase::Setup, Party::A, Party::B, Channel::EprSetup, 0});
    l.record({Phase::Evaluate, Party::B, Party::A, Channel::Classical, 1});
    l.record({Phase::FinalExchange, Party::A, Party::B, Channel::Classical, 2});
    l.record({Phase::FinalExchange, Party::B, Party::A, Channel::Classical, 2});
    AuditResult r = l.audit();
    EXPECT_FALSE(r.passed);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].event_index, 1u);
    EXPECT_NE(r.violations[0].message.find("EVALUATE"), std::string::npos);
}

TEST(resources, ledger_audit_other_violations) {
    CommLedger missing;
    missing.record({Phase::FinalExchange, Party::A, Party::B, Channel::Classical, 2});
    EXPECT_FALSE(missing.audit().passed);

    CommLedger doubled;
    doubled.record({Phase::FinalExchange, Party::A, Party::B, Channel::Classical, 2});
    doubled.record({Phase::FinalExchange, Party::A, Party::B, Channel::Classical, 2});
    doubled.record({Phase::FinalExchange, Party::B, Party::A, Channel::Classical, 0});
    EXPECT_FALSE(doubled.audit().passed);

    CommLedger late_epr;
    late_epr.record({Phase::Evaluate, Party::A, Party::B, Channel::EprSetup, 0});
    late_epr.record({Phase::FinalExchange, Party::A, Party::B, Channel::Classical, 0});
    late_epr.record({Phase::FinalExchange, Party::B, Party::A, Channel::Classical, 0});
    EXPECT_FALSE(late_epr.audit().passed);

    CommLedger signalling_box;
    signalling_box.record({Phase::Evaluate, Party::A, Party::B, Channel::Nlb, 1});
    signalling_box.record({Phase::FinalExchange, Party::A, Party::B, Channel::Classical, 0});
    signalling_box.record({Phase::FinalExchange, Party::B, Party::A, Channel::Classical, 0});
    EXPECT_FALSE(signalling_box.audit().passed);
}

TEST(resources, single_output_run_ledger_is_one_way) {
    Circuit c = make(2, {Party::A, Party::B}, {kAq, OutputSpec{}}, {GateOp::cnot(1, 0), GateOp::single(GateKind::T, 0)});
    RunReport r = run_single_output_variant(c, 4);
    EXPECT_TRUE(r.audit.passed);
    EXPECT_EQ(r.audit.bits_ba, 2u);
    EXPECT_EQ(r.audit.bits_ab, 0u);
}
