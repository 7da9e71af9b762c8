// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "uq/circuit.hpp"
#include "uq/instance.hpp"

namespace uq {

using cplx = std::complex<double>;

// Hard ceiling on simulated register width (2^26 amplitudes = 1 GiB).
inline constexpr int kQubitGuard = 26;

// Ceiling for full-unitary extraction; matrices are 4^m entries.
inline constexpr int kUnitaryGuard = 12;

// Dense double-precision amplitude vector over m qubits.
// Qubit 0 is the most significant bit of the amplitude index.
class StateVector {
public:
    explicit StateVector(int m, std::uint64_t basis_index = 0) : m_(check_width(m)), amps_(dim(), cplx{0.0, 0.0}) {
        if (basis_index >= dim()) throw std::invalid_argument("basis index out of range");
        amps_[basis_index] = 1.0;
    }

    int qubits() const { return m_; }
    std::uint64_t dim() const { return std::uint64_t{1} << m_; }
    const std::vector<cplx>& amplitudes() const { return amps_; }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

    void apply(const GateOp& g) {
        g.validate(m_);
        switch (g.kind) {
            case GateKind::X: apply_2x2(kX, g.targets[0], -1); break;
            case GateKind::Z: apply_2x2(kZ, g.targets[0], -1); break;
            case GateKind::H: apply_2x2(kH, g.targets[0], -1); break;
            case GateKind::RY: apply_2x2(ry_matrix(g.theta), g.targets[0], -1); break;
            case GateKind::RX: apply_2x2(rx_matrix(g.theta), g.targets[0], -1); break;
            case GateKind::CNOT: apply_2x2(kX, g.targets[0], g.controls[0]); break;
            case GateKind::CRY: apply_2x2(ry_matrix(g.theta), g.targets[0], g.controls[0]); break;
            case GateKind::DiagPhase: apply_diag_phase(g); break;
        }
    }

    void apply(const Circuit& c) {
        if (c.m != m_) throw std::invalid_argument("circuit width does not match state width");
        for (const auto& g : c.ops) apply(g);
    }

    // P(qubit = outcome).
    double marginal_probability(int qubit, int outcome) const {
        check_qubit(qubit);
        if (outcome != 0 && outcome != 1) throw std::invalid_argument("outcome must be 0 or 1");
        const std::uint64_t mask = bit_mask(qubit);
        double p = 0.0;
        for (std::uint64_t i = 0; i < dim(); ++i)
            if (((i & mask) != 0) == (outcome == 1)) p += std::norm(amps_[i]);
        return p;
    }

    // P(0) - P(1) on one qubit; the implicit-measurement readout of the
    // Hadamard test.
    double ancilla_expectation(int qubit) const {
        return marginal_probability(qubit, 0) - marginal_probability(qubit, 1);
    }

    // Exact marginal distribution over the listed qubits. The first listed
    // qubit is the most significant bit of the outcome key.
    std::vector<double> probabilities(const std::vector<int>& qubits) const {
        if (qubits.empty()) throw std::invalid_argument("qubit list must be non-empty");
        for (int q : qubits) check_qubit(q);
        if (qubits.size() > 30) throw CapacityError("marginal over too many qubits");
        std::vector<double> p(std::size_t{1} << qubits.size(), 0.0);
        for (std::uint64_t i = 0; i < dim(); ++i) {
            std::uint64_t key = 0;
            for (int q : qubits) key = (key << 1) | ((i >> (m_ - 1 - q)) & 1u);
            p[key] += std::norm(amps_[i]);
        }
        return p;
    }

    // Seeded multinomial readout; keys are bit-strings in listed-qubit order.
    // Only outcomes that occurred appear in the map.
    std::map<std::string, std::int64_t> sample(const std::vector<int>& qubits, std::int64_t shots,
                                               std::uint64_t seed) const {
        if (shots < 1) throw std::invalid_argument("shot count must be positive");
        const auto p = probabilities(qubits);
        std::vector<double> cdf(p.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            acc += p[i];
            cdf[i] = acc;
        }
        cdf.back() = 1.0;  // absorb rounding so every draw lands
        std::mt19937_64 rng(seed);
        std::vector<std::int64_t> counts(p.size(), 0);
        for (std::int64_t s = 0; s < shots; ++s) {
            const double u = canonical_uniform(rng);
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            ++counts[static_cast<std::size_t>(it - cdf.begin())];
        }
        std::map<std::string, std::int64_t> out;
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (counts[i] > 0) out[key_string(i, qubits.size())] = counts[i];
        return out;
    }

    static std::string key_string(std::uint64_t key, std::size_t width) {
        std::string s(width, '0');
        for (std::size_t b = 0; b < width; ++b)
            if ((key >> (width - 1 - b)) & 1u) s[b] = '1';
        return s;
    }

private:
    using Mat2 = std::array<cplx, 4>;  // row-major [[a, b], [c, d]]

    static constexpr Mat2 kX{cplx{0, 0}, cplx{1, 0}, cplx{1, 0}, cplx{0, 0}};
    static constexpr Mat2 kZ{cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{-1, 0}};
    // 1/sqrt(2) spelled out so the matrix is constexpr.
    static constexpr double kInvSqrt2 = 0.70710678118654752440;
    static constexpr Mat2 kH{cplx{kInvSqrt2, 0}, cplx{kInvSqrt2, 0}, cplx{kInvSqrt2, 0}, cplx{-kInvSqrt2, 0}};

    static Mat2 ry_matrix(double theta) {
        const double c = std::cos(theta / 2), s = std::sin(theta / 2);
        return {cplx{c, 0}, cplx{-s, 0}, cplx{s, 0}, cplx{c, 0}};
    }

    static Mat2 rx_matrix(double theta) {
        const double c = std::cos(theta / 2), s = std::sin(theta / 2);
        return {cplx{c, 0}, cplx{0, -s}, cplx{0, -s}, cplx{c, 0}};
    }

    static int check_width(int m) {
        if (m < 1) throw std::invalid_argument("register needs at least one qubit");
        if (m > kQubitGuard)
            throw CapacityError("register of " + std::to_string(m) + " qubits exceeds guard " +
                                std::to_string(kQubitGuard));
        return m;
    }

    void check_qubit(int q) const {
        if (q < 0 || q >= m_) throw std::invalid_argument("qubit index out of range");
    }

    std::uint64_t bit_mask(int qubit) const { return std::uint64_t{1} << (m_ - 1 - qubit); }

    // control < 0 means unconditional.
    void apply_2x2(const Mat2& u, int target, int control) {
        const std::uint64_t tmask = bit_mask(target);
        const std::uint64_t cmask = control >= 0 ? bit_mask(control) : 0;
        for (std::uint64_t i = 0; i < dim(); ++i) {
            if (i & tmask) continue;
            if (cmask && !(i & cmask)) continue;
            const cplx a0 = amps_[i], a1 = amps_[i | tmask];
            amps_[i] = u[0] * a0 + u[1] * a1;
            amps_[i | tmask] = u[2] * a0 + u[3] * a1;
        }
    }

    void apply_diag_phase(const GateOp& g) {
        for (std::uint64_t i = 0; i < dim(); ++i) {
            std::uint64_t key = 0;
            for (int q : g.targets) key = (key << 1) | ((i >> (m_ - 1 - q)) & 1u);
            const double phi = g.gamma * g.phases[key];
            amps_[i] *= cplx{std::cos(phi), -std::sin(phi)};
        }
    }

    int m_;
    std::vector<cplx> amps_;
};

// Small dense complex matrix, row-major; only used for oracle-size circuits.
struct DenseMatrix {
    std::uint64_t n = 0;
    std::vector<cplx> a;

    explicit DenseMatrix(std::uint64_t dim = 0) : n(dim), a(dim * dim, cplx{0.0, 0.0}) {}

    cplx& at(std::uint64_t r, std::uint64_t c) { return a[r * n + c]; }
    const cplx& at(std::uint64_t r, std::uint64_t c) const { return a[r * n + c]; }
};

// Full unitary of a circuit, column by column. Guarded: matrices grow as 4^m.
inline DenseMatrix circuit_unitary(const Circuit& c, int guard = kUnitaryGuard) {
    if (c.m > guard)
        throw CapacityError("unitary of " + std::to_string(c.m) + " qubits exceeds guard " + std::to_string(guard));
    const std::uint64_t dim = std::uint64_t{1} << c.m;
    DenseMatrix u(dim);
    for (std::uint64_t col = 0; col < dim; ++col) {
        StateVector sv(c.m, col);
        sv.apply(c);
        for (std::uint64_t row = 0; row < dim; ++row) u.at(row, col) = sv.amplitudes()[row];
    }
    return u;
}

}  // namespace uq
