// SPDX-License-Identifier: Apache-2.0
// Shared fixtures and matrix helpers for the test binaries.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "uq/instance.hpp"
#include "uq/statevector.hpp"

namespace uqtest {

// Weighted triangle with a unique (up to complement) optimum:
// c_min = -4 at 001/110, c_max = 6, sum of |w| = 6.
inline uq::IsingInstance triangle() {
    uq::IsingInstance inst;
    inst.n = 3;
    inst.set_pair(1, 2, 1.0);
    inst.set_pair(1, 3, 2.0);
    inst.set_pair(2, 3, 3.0);
    return inst;
}

// Single edge of weight 1: diagonal [1, -1, -1, 1], K = 2/pi at the default
// multiplier.
inline uq::IsingInstance two_node() {
    uq::IsingInstance inst;
    inst.n = 2;
    inst.set_pair(1, 2, 1.0);
    return inst;
}

inline double max_abs_diff(const uq::DenseMatrix& a, const uq::DenseMatrix& b) {
    double m = 0.0;
    for (std::uint64_t r = 0; r < a.n; ++r)
        for (std::uint64_t c = 0; c < a.n; ++c) m = std::max(m, std::abs(a.at(r, c) - b.at(r, c)));
    return m;
}

// Largest deviation of A from the identity-conjugated product A^dagger A.
inline double unitarity_defect(const uq::DenseMatrix& u) {
    double m = 0.0;
    for (std::uint64_t r = 0; r < u.n; ++r)
        for (std::uint64_t c = 0; c < u.n; ++c) {
            uq::cplx s = 0.0;
            for (std::uint64_t k = 0; k < u.n; ++k) s += std::conj(u.at(k, r)) * u.at(k, c);
            m = std::max(m, std::abs(s - (r == c ? 1.0 : 0.0)));
        }
    return m;
}

inline double hermiticity_defect(const uq::DenseMatrix& u) {
    double m = 0.0;
    for (std::uint64_t r = 0; r < u.n; ++r)
        for (std::uint64_t c = 0; c < u.n; ++c) m = std::max(m, std::abs(u.at(r, c) - std::conj(u.at(c, r))));
    return m;
}

// The target unitary: [[sin(C/K), cos(C/K)], [cos(C/K), -sin(C/K)]] over the
// cost qubit, diagonal in the working basis.
inline uq::DenseMatrix expected_block_unitary(const uq::IsingInstance& inst, double k) {
    const auto d = uq::hamiltonian_diagonal(inst);
    const std::uint64_t half = d.size();
    uq::DenseMatrix u(2 * half);
    for (std::uint64_t q = 0; q < half; ++q) {
        const double c = d[q] / k;
        u.at(q, q) = std::sin(c);
        u.at(q, q + half) = std::cos(c);
        u.at(q + half, q) = std::cos(c);
        u.at(q + half, q + half) = -std::sin(c);
    }
    return u;
}

}  // namespace uqtest
