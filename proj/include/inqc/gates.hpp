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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace inqc {

/// A classical bit. Always 0 or 1.
using Bit = std::uint8_t;

/// The six gates of the universal gateset. T is the pi/8 gate |j> -> e^{ij pi/4}|j>.
enum class GateKind : std::uint8_t { X, Z, P, H, CNOT, T };

constexpr std::size_t arity(GateKind kind) noexcept { return kind == GateKind::CNOT ? 2 : 1; }

constexpr bool is_clifford(GateKind kind) noexcept { return kind != GateKind::T; }

constexpr std::string_view gate_name(GateKind kind) noexcept {
    switch (kind) {
        case GateKind::X:
            return "X";
        case GateKind::Z:
            return "Z";
        case GateKind::P:
            return "P";
        case GateKind::H:
            return "H";
        case GateKind::CNOT:
            return "CNOT";
        case GateKind::T:
            return "T";
    }
    return "?";
}

/// Accepts the canonical names plus "R" as an alias for T.
inline std::optional<GateKind> parse_gate_kind(std::string_view name) noexcept {
    if (name == "X") return GateKind::X;
    if (name == "Z") return GateKind::Z;
    if (name == "P") return GateKind::P;
    if (name == "H") return GateKind::H;
    if (name == "CNOT") return GateKind::CNOT;
    if (name == "T" || name == "R") return GateKind::T;
    return std::nullopt;
}

/// A gate bound to targets of some index type (qubit handles in the simulator, wire numbers in circuits).
/// For CNOT, targets[0] is the control and targets[1] the target.
template <typename Index>
struct BasicGate {
    GateKind kind{GateKind::X};
    std::array<Index, 2> targets{};

    static BasicGate single(GateKind kind, Index q) {
        if (arity(kind) != 1) {
            throw std::invalid_argument(std::string(gate_name(kind)) + " takes two targets");
        }
        return BasicGate{kind, {q, q}};
    }

    static BasicGate cnot(Index control, Index target) {
        if (control == target) {
            throw std::invalid_argument("CNOT targets must be distinct");
        }
        return BasicGate{GateKind::CNOT, {control, target}};
    }

    Index target() const noexcept { return targets[0]; }
    Index control() const noexcept { return targets[0]; }
    Index cnot_target() const noexcept { return targets[1]; }

    bool operator==(const BasicGate &other) const {
        if (kind != other.kind) return false;
        return arity(kind) == 1 ? targets[0] == other.targets[0] : targets == other.targets;
    }
};

}  // namespace inqc
