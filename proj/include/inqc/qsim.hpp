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
#include <cmath>
#include <complex>
#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "inqc/gates.hpp"

namespace inqc {

using Amplitude = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kFidelityTolerance = 1e-9;
/// Branches at or below this probability cannot be forced.
inline constexpr double kZeroBranchProbability = 1e-12;
inline constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

/// Stable handle to a simulated qubit. Handles are never reused within a StateVector,
/// so a handle stays meaningful after other qubits are measured away.
struct QubitId {
    std::uint32_t value{0};
    auto operator<=>(const QubitId &) const = default;
};

using Gate = BasicGate<QubitId>;

template <typename G>
concept RandomBitSource = std::uniform_random_bit_generator<std::remove_cvref_t<G>>;

struct MeasurementOutcome {
    Bit bit{0};
    double probability{0.0};
    bool forced{false};
};

/// Labeled so that teleporting |psi> through (|00>+|11>)/sqrt2 leaves the receiver
/// holding X^{m_x} Z^{m_z}|psi>; the receiver correction is Z^{m_z} X^{m_x}.
struct BellOutcome {
    Bit m_x{0};
    Bit m_z{0};
    double probability{0.0};
    bool forced{false};
};

/// Dense pure state. Qubit positions are little-endian: the qubit at position k is bit k
/// of the amplitude index. Measured qubits are projected out of the vector and their
/// handles become dead; any later use of a dead handle throws.
class StateVector {
   public:
    /// The empty register: zero qubits, scalar amplitude 1.
    StateVector() : amps_{Amplitude{1.0, 0.0}} {}

    explicit StateVector(std::size_t num_qubits) : StateVector() {
        for (std::size_t k = 0; k < num_qubits; ++k) {
            add_qubit(1.0, 0.0);
        }
    }

    static StateVector from_amplitudes(std::vector<Amplitude> amps) {
        if (amps.empty() || (amps.size() & (amps.size() - 1)) != 0) {
            throw std::invalid_argument("amplitude vector length must be a power of two");
        }
        StateVector s;
        std::size_t n = 0;
        while ((std::size_t{1} << n) < amps.size()) ++n;
        for (std::size_t k = 0; k < n; ++k) {
            s.register_qubit();
        }
        s.amps_ = std::move(amps);
        if (std::abs(s.norm() - 1.0) > 1e-9) {
            throw std::invalid_argument("amplitude vector is not normalized");
        }
        s.renormalize();
        return s;
    }

    std::size_t num_qubits() const noexcept { return id_at_.size(); }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    Amplitude amplitude(std::size_t index) const { return amps_.at(index); }

    /// Live qubits in position order.
    const std::vector<QubitId> &qubits() const noexcept { return id_at_; }

    bool is_live(QubitId q) const noexcept {
        return q.value < position_of_.size() && position_of_[q.value] >= 0;
    }

    std::size_t position(QubitId q) const {
        if (q.value >= position_of_.size()) {
            throw std::out_of_range("unknown qubit " + std::to_string(q.value));
        }
        if (position_of_[q.value] < 0) {
            throw std::invalid_argument("qubit " + std::to_string(q.value) + " has been consumed");
        }
        return static_cast<std::size_t>(position_of_[q.value]);
    }

    /// Tensors a new qubit in state a0|0> + a1|1> onto the most significant position.
    QubitId add_qubit(Amplitude a0, Amplitude a1) {
        double n2 = std::norm(a0) + std::norm(a1);
        if (std::abs(n2 - 1.0) > 1e-9) {
            throw std::invalid_argument("single-qubit amplitudes are not normalized");
        }
        double scale = 1.0 / std::sqrt(n2);
        a0 *= scale;
        a1 *= scale;
        std::size_t half = amps_.size();
        amps_.resize(2 * half);
        for (std::size_t i = 0; i < half; ++i) {
            amps_[half + i] = amps_[i] * a1;
            amps_[i] *= a0;
        }
        return register_qubit();
    }

    /// Appends (|00>+|11>)/sqrt2 on two new qubits.
    std::pair<QubitId, QubitId> make_epr() {
        QubitId a = add_qubit(1.0, 0.0);
        QubitId b = add_qubit(1.0, 0.0);
        apply(Gate::single(GateKind::H, a));
        apply(Gate::cnot(a, b));
        return {a, b};
    }

    void apply(const Gate &gate) {
        if (gate.kind == GateKind::CNOT) {
            std::size_t c = position(gate.control());
            std::size_t t = position(gate.cnot_target());
            if (c == t) {
                throw std::invalid_argument("CNOT targets must be distinct");
            }
            std::size_t cmask = std::size_t{1} << c;
            std::size_t tmask = std::size_t{1} << t;
            for (std::size_t i = 0; i < amps_.size(); ++i) {
                if ((i & cmask) && !(i & tmask)) {
                    std::swap(amps_[i], amps_[i | tmask]);
                }
            }
            return;
        }
        std::size_t mask = std::size_t{1} << position(gate.target());
        switch (gate.kind) {
            case GateKind::X:
                for_each_pair(mask, [](Amplitude &a0, Amplitude &a1) { std::swap(a0, a1); });
                break;
            case GateKind::Z:
                for_each_pair(mask, [](Amplitude &, Amplitude &a1) { a1 = -a1; });
                break;
            case GateKind::P:
                for_each_pair(mask, [](Amplitude &, Amplitude &a1) { a1 *= Amplitude{0.0, 1.0}; });
                break;
            case GateKind::T: {
                const Amplitude phase = std::polar(1.0, std::numbers::pi / 4);
                for_each_pair(mask, [&](Amplitude &, Amplitude &a1) { a1 *= phase; });
                break;
            }
            case GateKind::H: {
                const double r = kInvSqrt2;
                for_each_pair(mask, [r](Amplitude &a0, Amplitude &a1) {
                    Amplitude s = a0 + a1;
                    Amplitude d = a0 - a1;
                    a0 = r * s;
                    a1 = r * d;
                });
                break;
            }
            case GateKind::CNOT:
                break;
        }
    }

    void apply(GateKind kind, QubitId q) { apply(Gate::single(kind, q)); }

    /// Applies X^x Z^z as an operator, i.e. Z first.
    void apply_pauli(QubitId q, Bit x, Bit z) {
        if (z) apply(GateKind::Z, q);
        if (x) apply(GateKind::X, q);
    }

    double probability_of_one(QubitId q) const {
        std::size_t mask = std::size_t{1} << position(q);
        double p = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & mask) p += std::norm(amps_[i]);
        }
        return p;
    }

    /// Computational-basis measurement. The measured qubit is removed from the register.
    template <RandomBitSource Rng>
    MeasurementOutcome measure_z(QubitId q, std::optional<Bit> forced, Rng &rng) {
        std::size_t pos = position(q);
        double p1 = std::clamp(probability_of_one(q), 0.0, 1.0);
        MeasurementOutcome out;
        if (forced) {
            out.bit = *forced ? 1 : 0;
            out.forced = true;
            out.probability = out.bit ? p1 : 1.0 - p1;
            if (out.probability <= kZeroBranchProbability) {
                throw std::invalid_argument("cannot force a zero-probability measurement outcome");
            }
        } else {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            out.bit = u(rng) < p1 ? 1 : 0;
            out.probability = out.bit ? p1 : 1.0 - p1;
        }
        project_out(pos, out.bit);
        position_of_[q.value] = -1;
        id_at_.erase(id_at_.begin() + static_cast<std::ptrdiff_t>(pos));
        for (std::size_t k = pos; k < id_at_.size(); ++k) {
            position_of_[id_at_[k].value] = static_cast<std::int32_t>(k);
        }
        return out;
    }

    /// Bell-basis measurement of (q1, q2); both qubits are consumed. When teleporting,
    /// q1 carries the payload and q2 is the sender's half of the EPR pair.
    template <RandomBitSource Rng>
    BellOutcome bell_measure(QubitId q1, QubitId q2, std::optional<std::pair<Bit, Bit>> forced, Rng &rng) {
        if (position(q1) == position(q2)) {
            throw std::invalid_argument("Bell measurement needs two distinct qubits");
        }
        Gate cx = Gate::cnot(q1, q2);
        apply(cx);
        apply(GateKind::H, q1);
        if (forced) {
            if (joint_probability(q1, forced->second, q2, forced->first) <= kZeroBranchProbability) {
                apply(GateKind::H, q1);
                apply(cx);
                throw std::invalid_argument("cannot force a zero-probability Bell outcome");
            }
        }
        auto mz = measure_z(q1, forced ? std::optional<Bit>(forced->second) : std::nullopt, rng);
        auto mx = measure_z(q2, forced ? std::optional<Bit>(forced->first) : std::nullopt, rng);
        return BellOutcome{mx.bit, mz.bit, mz.probability * mx.probability, forced.has_value()};
    }

    /// Copy with qubit order[k] moved to position k. `order` must list every live qubit once.
    StateVector reordered(std::span<const QubitId> order) const {
        if (order.size() != num_qubits()) {
            throw std::invalid_argument("reorder must list every live qubit");
        }
        std::vector<std::size_t> src(order.size());
        std::vector<bool> seen(order.size(), false);
        for (std::size_t k = 0; k < order.size(); ++k) {
            src[k] = position(order[k]);
            if (seen[src[k]]) {
                throw std::invalid_argument("reorder lists a qubit twice");
            }
            seen[src[k]] = true;
        }
        std::vector<Amplitude> out(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            std::size_t j = 0;
            for (std::size_t k = 0; k < src.size(); ++k) {
                j |= ((i >> src[k]) & 1u) << k;
            }
            out[j] = amps_[i];
        }
        return from_amplitudes(std::move(out));
    }

    /// Reduced density matrix of one qubit, row-major {rho00, rho01, rho10, rho11}.
    std::array<Amplitude, 4> reduced_density(QubitId q) const {
        std::size_t mask = std::size_t{1} << position(q);
        std::array<Amplitude, 4> rho{};
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & mask) continue;
            Amplitude a0 = amps_[i];
            Amplitude a1 = amps_[i | mask];
            rho[0] += a0 * std::conj(a0);
            rho[1] += a0 * std::conj(a1);
            rho[2] += a1 * std::conj(a0);
            rho[3] += a1 * std::conj(a1);
        }
        return rho;
    }

    double norm() const {
        double s = 0.0;
        for (const auto &a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

   private:
    QubitId register_qubit() {
        QubitId id{static_cast<std::uint32_t>(position_of_.size())};
        position_of_.push_back(static_cast<std::int32_t>(id_at_.size()));
        id_at_.push_back(id);
        return id;
    }

    template <typename F>
    void for_each_pair(std::size_t mask, F &&f) {
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (!(i & mask)) f(amps_[i], amps_[i | mask]);
        }
    }

    double joint_probability(QubitId a, Bit va, QubitId b, Bit vb) const {
        std::size_t ma = std::size_t{1} << position(a);
        std::size_t mb = std::size_t{1} << position(b);
        double p = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (((i & ma) != 0) == (va != 0) && ((i & mb) != 0) == (vb != 0)) p += std::norm(amps_[i]);
        }
        return p;
    }

    void project_out(std::size_t pos, Bit bit) {
        std::size_t low = (std::size_t{1} << pos) - 1;
        std::vector<Amplitude> out(amps_.size() / 2);
        for (std::size_t j = 0; j < out.size(); ++j) {
            std::size_t i = (j & low) | ((j & ~low) << 1) | (std::size_t{bit} << pos);
            out[j] = amps_[i];
        }
        amps_ = std::move(out);
        renormalize();
    }

    void renormalize() {
        double n = norm();
        for (auto &a : amps_) a /= n;
    }

    std::vector<Amplitude> amps_;
    std::vector<std::int32_t> position_of_;
    std::vector<QubitId> id_at_;
};

/// <a|b> with qubits matched by position.
inline Amplitude inner_product(const StateVector &a, const StateVector &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw std::invalid_argument("state dimension mismatch");
    }
    Amplitude s{};
    auto x = a.amplitudes();
    auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

/// |<a|b>|^2.
inline double fidelity(const StateVector &a, const StateVector &b) { return std::norm(inner_product(a, b)); }

inline bool states_equal_up_to_phase(const StateVector &a, const StateVector &b, double tol = kFidelityTolerance) {
    return std::abs(inner_product(a, b)) >= 1.0 - tol;
}

/// Fidelity of two single-qubit density matrices: tr(rho sigma) + 2 sqrt(det rho det sigma).
inline double density_fidelity(const std::array<Amplitude, 4> &rho, const std::array<Amplitude, 4> &sigma) {
    Amplitude tr = rho[0] * sigma[0] + rho[1] * sigma[2] + rho[2] * sigma[1] + rho[3] * sigma[3];
    double det_r = std::max(0.0, (rho[0] * rho[3] - rho[1] * rho[2]).real());
    double det_s = std::max(0.0, (sigma[0] * sigma[3] - sigma[1] * sigma[2]).real());
    return std::clamp(tr.real() + 2.0 * std::sqrt(det_r * det_s), 0.0, 1.0);
}

}  // namespace inqc
