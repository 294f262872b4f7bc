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
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "inqc/gates.hpp"
#include "inqc/pauli_frame.hpp"
#include "inqc/qsim.hpp"

namespace inqc {

enum class OutputKind : std::uint8_t { Quantum, Classical };

enum class BasisLabel : std::uint8_t { Zero, One, Plus, Minus, PlusI, MinusI };

/// Single-qubit product input: a named state or an explicit normalized pair (a0, a1).
struct InitialState {
    std::variant<BasisLabel, std::array<Amplitude, 2>> value{BasisLabel::Zero};

    std::array<Amplitude, 2> amplitudes() const {
        if (const auto *amps = std::get_if<std::array<Amplitude, 2>>(&value)) {
            return *amps;
        }
        const double r = kInvSqrt2;
        switch (std::get<BasisLabel>(value)) {
            case BasisLabel::Zero:
                return {Amplitude{1, 0}, Amplitude{0, 0}};
            case BasisLabel::One:
                return {Amplitude{0, 0}, Amplitude{1, 0}};
            case BasisLabel::Plus:
                return {Amplitude{r, 0}, Amplitude{r, 0}};
            case BasisLabel::Minus:
                return {Amplitude{r, 0}, Amplitude{-r, 0}};
            case BasisLabel::PlusI:
                return {Amplitude{r, 0}, Amplitude{0, r}};
            case BasisLabel::MinusI:
                return {Amplitude{r, 0}, Amplitude{0, -r}};
        }
        return {Amplitude{1, 0}, Amplitude{0, 0}};
    }

    bool operator==(const InitialState &) const = default;
};

constexpr std::string_view label_name(BasisLabel b) noexcept {
    switch (b) {
        case BasisLabel::Zero:
            return "zero";
        case BasisLabel::One:
            return "one";
        case BasisLabel::Plus:
            return "plus";
        case BasisLabel::Minus:
            return "minus";
        case BasisLabel::PlusI:
            return "i";
        case BasisLabel::MinusI:
            return "-i";
    }
    return "?";
}

inline std::optional<BasisLabel> parse_label(std::string_view s) noexcept {
    for (auto b : {BasisLabel::Zero, BasisLabel::One, BasisLabel::Plus, BasisLabel::Minus, BasisLabel::PlusI,
                   BasisLabel::MinusI}) {
        if (label_name(b) == s) return b;
    }
    return std::nullopt;
}

/// Where a wire ends up. An absent owner means the wire is discarded.
struct OutputSpec {
    std::optional<Party> owner;
    OutputKind kind{OutputKind::Quantum};

    bool discarded() const noexcept { return !owner.has_value(); }
    bool operator==(const OutputSpec &) const = default;
};

/// A two-party circuit: per-wire input owner, output destination and initial state,
/// followed by an ordered gate list over the six-gate set.
struct Circuit {
    std::size_t num_wires{0};
    std::vector<Party> input_owner;
    std::vector<OutputSpec> outputs;
    std::vector<InitialState> initial_states;
    std::vector<GateOp> gates;

    std::size_t count_inputs(Party p) const {
        return static_cast<std::size_t>(std::count(input_owner.begin(), input_owner.end(), p));
    }

    std::size_t count_outputs(Party p, OutputKind kind) const {
        return static_cast<std::size_t>(std::count_if(outputs.begin(), outputs.end(), [&](const OutputSpec &o) {
            return o.owner == p && o.kind == kind;
        }));
    }

    std::size_t count_t_gates() const {
        return static_cast<std::size_t>(
            std::count_if(gates.begin(), gates.end(), [](const GateOp &g) { return g.kind == GateKind::T; }));
    }

    /// Throws std::invalid_argument if any per-wire table has the wrong size or a gate is out of range.
    void validate() const {
        if (input_owner.size() != num_wires || outputs.size() != num_wires || initial_states.size() != num_wires) {
            throw std::invalid_argument("per-wire tables do not match the wire count");
        }
        for (const auto &g : gates) {
            for (std::size_t k = 0; k < arity(g.kind); ++k) {
                if (g.targets[k] >= num_wires) {
                    throw std::invalid_argument("gate target out of range");
                }
            }
            if (g.kind == GateKind::CNOT && g.targets[0] == g.targets[1]) {
                throw std::invalid_argument("CNOT targets must be distinct");
            }
        }
    }

    bool operator==(const Circuit &) const = default;
};

class ParseError : public std::runtime_error {
   public:
    ParseError(std::size_t line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

   private:
    std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_words(std::string_view line) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) words.push_back(line.substr(i, j - i));
        i = j;
    }
    return words;
}

inline std::size_t parse_index(std::string_view word, std::size_t line, const char *what) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
    if (ec != std::errc{} || ptr != word.data() + word.size()) {
        throw ParseError(line, std::string("expected ") + what + ", got '" + std::string(word) + "'");
    }
    return v;
}

inline double parse_real(std::string_view word, std::size_t line) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
    if (ec != std::errc{} || ptr != word.data() + word.size() || !std::isfinite(v)) {
        throw ParseError(line, "expected a real number, got '" + std::string(word) + "'");
    }
    return v;
}

inline std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline Party parse_party(std::string_view w, std::size_t line) {
    if (w == "A") return Party::A;
    if (w == "B") return Party::B;
    throw ParseError(line, "expected party A or B, got '" + std::string(w) + "'");
}

}  // namespace detail

/// Parses the line-oriented circuit format:
///
///     wires <n>
///     owner <wire> <A|B>
///     out <wire> <A|B|none> [quantum|classical]
///     init <wire> <zero|one|plus|minus|i|-i|amp re0 im0 re1 im1>
///     <X|Z|P|H|T|R> <wire>
///     CNOT <control> <target>
///
/// '#' starts a comment. Every wire needs an owner and an out line; init defaults to zero.
inline Circuit parse_circuit(std::string_view text) {
    Circuit c;
    bool have_wires = false;
    std::vector<bool> owner_seen, out_seen, init_seen;
    std::size_t line_no = 0;
    std::size_t last_line = 0;

    auto wire_arg = [&](std::string_view w) {
        std::size_t v = detail::parse_index(w, line_no, "wire index");
        if (v >= c.num_wires) {
            throw ParseError(line_no, "wire " + std::to_string(v) + " out of range (wires " +
                                          std::to_string(c.num_wires) + ")");
        }
        return v;
    };

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto words = detail::split_words(line);
        if (words.empty()) {
            if (end == text.size()) break;
            continue;
        }
        last_line = line_no;
        std::string_view head = words[0];

        if (head == "wires") {
            if (have_wires) throw ParseError(line_no, "duplicate wires declaration");
            if (words.size() != 2) throw ParseError(line_no, "usage: wires <n>");
            c.num_wires = detail::parse_index(words[1], line_no, "wire count");
            c.input_owner.assign(c.num_wires, Party::A);
            c.outputs.assign(c.num_wires, OutputSpec{});
            c.initial_states.assign(c.num_wires, InitialState{});
            owner_seen.assign(c.num_wires, false);
            out_seen.assign(c.num_wires, false);
            init_seen.assign(c.num_wires, false);
            have_wires = true;
            continue;
        }
        if (!have_wires) throw ParseError(line_no, "'wires <n>' must come first");

        if (head == "owner") {
            if (words.size() != 3) throw ParseError(line_no, "usage: owner <wire> <A|B>");
            std::size_t w = wire_arg(words[1]);
            if (owner_seen[w]) throw ParseError(line_no, "duplicate owner declaration for wire " + std::to_string(w));
            c.input_owner[w] = detail::parse_party(words[2], line_no);
            owner_seen[w] = true;
        } else if (head == "out") {
            if (words.size() != 3 && words.size() != 4) {
                throw ParseError(line_no, "usage: out <wire> <A|B|none> [quantum|classical]");
            }
            std::size_t w = wire_arg(words[1]);
            if (out_seen[w]) throw ParseError(line_no, "duplicate out declaration for wire " + std::to_string(w));
            OutputSpec spec;
            if (words[2] != "none") spec.owner = detail::parse_party(words[2], line_no);
            if (words.size() == 4) {
                if (words[3] == "quantum") {
                    spec.kind = OutputKind::Quantum;
                } else if (words[3] == "classical") {
                    spec.kind = OutputKind::Classical;
                } else {
                    throw ParseError(line_no, "expected quantum or classical, got '" + std::string(words[3]) + "'");
                }
            }
            c.outputs[w] = spec;
            out_seen[w] = true;
        } else if (head == "init") {
            if (words.size() < 3) throw ParseError(line_no, "usage: init <wire> <state>");
            std::size_t w = wire_arg(words[1]);
            if (init_seen[w]) throw ParseError(line_no, "duplicate init declaration for wire " + std::to_string(w));
            if (words[2] == "amp") {
                if (words.size() != 7) throw ParseError(line_no, "usage: init <wire> amp <re0> <im0> <re1> <im1>");
                Amplitude a0{detail::parse_real(words[3], line_no), detail::parse_real(words[4], line_no)};
                Amplitude a1{detail::parse_real(words[5], line_no), detail::parse_real(words[6], line_no)};
                if (std::abs(std::norm(a0) + std::norm(a1) - 1.0) > 1e-9) {
                    throw ParseError(line_no, "amplitudes are not normalized");
                }
                c.initial_states[w].value = std::array<Amplitude, 2>{a0, a1};
            } else {
                if (words.size() != 3) throw ParseError(line_no, "usage: init <wire> <state>");
                auto label = parse_label(words[2]);
                if (!label) throw ParseError(line_no, "unknown initial state '" + std::string(words[2]) + "'");
                c.initial_states[w].value = *label;
            }
            init_seen[w] = true;
        } else if (auto kind = parse_gate_kind(head)) {
            if (words.size() != 1 + arity(*kind)) {
                throw ParseError(line_no, std::string(gate_name(*kind)) + " takes " + std::to_string(arity(*kind)) +
                                              " wire argument(s)");
            }
            if (*kind == GateKind::CNOT) {
                std::size_t a = wire_arg(words[1]);
                std::size_t b = wire_arg(words[2]);
                if (a == b) throw ParseError(line_no, "CNOT has duplicate targets");
                c.gates.push_back(GateOp::cnot(a, b));
            } else {
                c.gates.push_back(GateOp::single(*kind, wire_arg(words[1])));
            }
        } else {
            throw ParseError(line_no, "unknown gate or directive '" + std::string(head) + "'");
        }
        if (end == text.size()) break;
    }

    if (!have_wires) throw ParseError(line_no == 0 ? 1 : line_no, "missing 'wires <n>' declaration");
    for (std::size_t w = 0; w < c.num_wires; ++w) {
        if (!owner_seen[w]) throw ParseError(last_line, "missing owner declaration for wire " + std::to_string(w));
        if (!out_seen[w]) throw ParseError(last_line, "missing out declaration for wire " + std::to_string(w));
    }
    return c;
}

inline Circuit parse_circuit(std::istream &in) {
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_circuit(ss.str());
}

/// Canonical text form; parse_circuit(print_circuit(c)) == c.
inline std::string print_circuit(const Circuit &c) {
    std::string out = "wires " + std::to_string(c.num_wires) + "\n";
    for (std::size_t w = 0; w < c.num_wires; ++w) {
        out += "owner " + std::to_string(w) + " " + party_letter(c.input_owner[w]) + "\n";
    }
    for (std::size_t w = 0; w < c.num_wires; ++w) {
        const auto &o = c.outputs[w];
        out += "out " + std::to_string(w) + " ";
        out += o.owner ? std::string(1, party_letter(*o.owner)) : std::string("none");
        out += o.kind == OutputKind::Quantum ? " quantum\n" : " classical\n";
    }
    for (std::size_t w = 0; w < c.num_wires; ++w) {
        out += "init " + std::to_string(w) + " ";
        const auto &v = c.initial_states[w].value;
        if (const auto *label = std::get_if<BasisLabel>(&v)) {
            out += label_name(*label);
        } else {
            const auto &a = std::get<std::array<Amplitude, 2>>(v);
            out += "amp " + detail::format_real(a[0].real()) + " " + detail::format_real(a[0].imag()) + " " +
                   detail::format_real(a[1].real()) + " " + detail::format_real(a[1].imag());
        }
        out += "\n";
    }
    for (const auto &g : c.gates) {
        out += gate_name(g.kind);
        out += " " + std::to_string(g.targets[0]);
        if (g.kind == GateKind::CNOT) out += " " + std::to_string(g.targets[1]);
        out += "\n";
    }
    return out;
}

struct ResourceEstimate {
    std::size_t epr{0};
    std::size_t nlb{0};
    std::size_t classical_bits_ab{0};
    std::size_t classical_bits_ba{0};

    bool operator==(const ResourceEstimate &) const = default;
};

/// Resources the protocol will consume, computed from the circuit alone.
/// EPR pairs: one per Bob input, one per T gate, one per Bob quantum output.
/// Final message bits: 2 per quantum output and 1 per classical output, sent by the non-owner.
inline ResourceEstimate estimate_resources(const Circuit &c) {
    ResourceEstimate e;
    e.nlb = c.count_t_gates();
    e.epr = c.count_inputs(Party::B) + e.nlb + c.count_outputs(Party::B, OutputKind::Quantum);
    e.classical_bits_ab = 2 * c.count_outputs(Party::B, OutputKind::Quantum) + c.count_outputs(Party::B, OutputKind::Classical);
    e.classical_bits_ba = 2 * c.count_outputs(Party::A, OutputKind::Quantum) + c.count_outputs(Party::A, OutputKind::Classical);
    return e;
}

struct RandomCircuitOptions {
    std::size_t min_wires{2};
    std::size_t max_wires{6};
    std::size_t min_gates{10};
    std::size_t max_gates{40};
    double t_fraction{0.2};
    std::size_t max_t_gates{10};
    /// Probability that a wire's output is classical (otherwise quantum); applied after discard.
    double classical_fraction{0.2};
    double discard_fraction{0.1};
    bool explicit_amplitudes{true};
};

/// Draws a circuit with uniform ownership, random product inputs and a Clifford+T gate list.
template <RandomBitSource Rng>
Circuit random_circuit(const RandomCircuitOptions &opt, Rng &rng) {
    if (opt.min_wires < 1 || opt.max_wires < opt.min_wires || opt.max_gates < opt.min_gates) {
        throw std::invalid_argument("bad random circuit bounds");
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };

    Circuit c;
    c.num_wires = pick(opt.min_wires, opt.max_wires);
    for (std::size_t w = 0; w < c.num_wires; ++w) {
        c.input_owner.push_back(pick(0, 1) ? Party::B : Party::A);
        OutputSpec o;
        if (u(rng) >= opt.discard_fraction) o.owner = pick(0, 1) ? Party::B : Party::A;
        o.kind = u(rng) < opt.classical_fraction ? OutputKind::Classical : OutputKind::Quantum;
        c.outputs.push_back(o);
        InitialState init;
        if (opt.explicit_amplitudes && pick(0, 1)) {
            std::normal_distribution<double> g;
            Amplitude a0{g(rng), g(rng)};
            Amplitude a1{g(rng), g(rng)};
            double n = std::sqrt(std::norm(a0) + std::norm(a1));
            init.value = std::array<Amplitude, 2>{a0 / n, a1 / n};
        } else {
            init.value = static_cast<BasisLabel>(pick(0, 5));
        }
        c.initial_states.push_back(init);
    }

    std::size_t num_gates = pick(opt.min_gates, opt.max_gates);
    std::size_t t_count = 0;
    constexpr GateKind cliffords[] = {GateKind::X, GateKind::Z, GateKind::P, GateKind::H, GateKind::CNOT};
    for (std::size_t i = 0; i < num_gates; ++i) {
        GateKind kind;
        if (u(rng) < opt.t_fraction && t_count < opt.max_t_gates) {
            kind = GateKind::T;
            ++t_count;
        } else {
            kind = cliffords[pick(0, c.num_wires > 1 ? 4 : 3)];
        }
        if (kind == GateKind::CNOT) {
            std::size_t a = pick(0, c.num_wires - 1);
            std::size_t b = pick(0, c.num_wires - 2);
            if (b >= a) ++b;
            c.gates.push_back(GateOp::cnot(a, b));
        } else {
            c.gates.push_back(GateOp::single(kind, pick(0, c.num_wires - 1)));
        }
    }
    return c;
}

}  // namespace inqc
