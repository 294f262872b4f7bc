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

#include <string>

#include "json.hpp"

#include "inqc/protocol.hpp"

namespace inqc {

inline constexpr int kReportSchemaVersion = 1;

inline nlohmann::json keys_to_json(const KeyTable &keys) {
    auto out = nlohmann::json::array();
    for (WireId w = 0; w < keys.num_wires(); ++w) {
        if (!keys.is_live(w)) continue;
        const auto &a = keys.share(Party::A, w);
        const auto &b = keys.share(Party::B, w);
        out.push_back({{"wire", w}, {"xA", a.x}, {"zA", a.z}, {"xB", b.x}, {"zB", b.z}});
    }
    return out;
}

inline nlohmann::json ledger_to_json(const std::vector<LedgerEvent> &events) {
    auto out = nlohmann::json::array();
    for (const auto &e : events) {
        out.push_back({{"phase", phase_name(e.phase)},
                       {"from", std::string(1, party_letter(e.from))},
                       {"to", std::string(1, party_letter(e.to))},
                       {"channel", channel_name(e.channel)},
                       {"payload_bits", e.payload_bits}});
    }
    return out;
}

inline nlohmann::json audit_to_json(const AuditResult &a) {
    nlohmann::json violations = nlohmann::json::array();
    for (const auto &v : a.violations) violations.push_back({{"event", v.event_index}, {"message", v.message}});
    return {{"passed", a.passed},
            {"violations", violations},
            {"classical_events", a.classical_events()},
            {"nlb_events", a.events_per_channel[1]},
            {"epr_setup_events", a.events_per_channel[0]},
            {"bits_ab", a.bits_ab},
            {"bits_ba", a.bits_ba}};
}

/// RunReport as JSON. Key order is fixed (nlohmann sorts object keys), so equal reports
/// serialize to identical bytes.
inline nlohmann::json report_to_json(const RunReport &r) {
    nlohmann::json phases = nlohmann::json::array();
    for (auto p : r.phase_log) phases.push_back(phase_name(p));

    nlohmann::json outputs = nlohmann::json::array();
    for (const auto &o : r.outputs) {
        nlohmann::json j = {{"wire", o.wire},
                            {"owner", std::string(1, party_letter(*o.owner))},
                            {"kind", o.kind == OutputKind::Quantum ? "quantum" : "classical"},
                            {"fidelity", o.fidelity}};
        if (o.bit) j["bit"] = *o.bit;
        if (o.oracle_probability) j["oracle_probability"] = *o.oracle_probability;
        outputs.push_back(std::move(j));
    }

    nlohmann::json transcript = nlohmann::json::array();
    for (const auto &t : r.transcript) {
        nlohmann::json j = {{"step", t.step}, {"party", std::string(1, party_letter(t.party))}, {"wire", t.wire}, {"bits", t.bits}};
        if (t.gate) j["gate"] = *t.gate;
        transcript.push_back(std::move(j));
    }

    return {{"schema", kReportSchemaVersion},
            {"circuit_hash", r.circuit_hash},
            {"seed", r.seed},
            {"phase_log", phases},
            {"resources",
             {{"epr", r.epr_consumed},
              {"nlb", r.nlb_consumed},
              {"estimate",
               {{"epr", r.estimate.epr},
                {"nlb", r.estimate.nlb},
                {"bits_ab", r.estimate.classical_bits_ab},
                {"bits_ba", r.estimate.classical_bits_ba}}}}},
            {"ledger", ledger_to_json(r.ledger)},
            {"audit", audit_to_json(r.audit)},
            {"keys_final", keys_to_json(r.keys_final)},
            {"outputs", outputs},
            {"joint_fidelity", r.joint_fidelity},
            {"oracle_fidelity_min", r.oracle_fidelity_min},
            {"transcript", transcript}};
}

}  // namespace inqc
