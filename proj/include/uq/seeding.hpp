// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace uq {

// splitmix64 finalizer; the avalanche stage of the derived-seed hash.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Documented seed derivation: fold each coordinate through the splitmix64
// finalizer so (base, a, b, c) tuples map to independent streams. Used for
// per-instance seeds (base = master, a = n, b = index, c = role) and for
// per-evaluation sampling seeds (base = run seed, a = domain, b = iteration,
// c = component/sign).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = mix64(base);
    h = mix64(h ^ mix64(a));
    h = mix64(h ^ mix64(b));
    h = mix64(h ^ mix64(c));
    return h;
}

// Canonical 53-bit uniform in [0, 1); avoids distribution objects so streams
// are identical across standard libraries.
inline double canonical_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller standard normal from canonical uniforms, same portability note.
inline double standard_normal(std::mt19937_64& rng) {
    const double u1 = canonical_uniform(rng);
    const double u2 = canonical_uniform(rng);
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace uq
