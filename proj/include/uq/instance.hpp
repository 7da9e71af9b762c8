// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "uq/seeding.hpp"

namespace uq {

// Thrown when a request would enumerate or allocate beyond the configured guard.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an instance has no usable spectrum (all weights zero, or a
// single repeated cost value where a spread is required).
struct DegenerateInstance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on file access or file format failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Default ceiling for 2^n enumeration (spectrum, diagonal, agreement).
inline constexpr int kEnumGuard = 26;

// Default rescaling ratio: K = (2/pi) * sum|w| keeps every scaled cost in
// [-pi/2, pi/2], the monotone branch of the sine.
inline constexpr double kDefaultLambda = 2.0 * std::numbers::inv_pi;

// Weighted Ising cost model over n nodes, 1-based indices.
// Sparse: absent entries are weight zero. Pairwise keys are (i, j) with i < j.
// A MaxCut instance is the special case with no unary terms.
struct IsingInstance {
    int n = 0;
    std::map<int, double> unary;
    std::map<std::pair<int, int>, double> pairwise;

    void set_unary(int i, double w) {
        check_node(i);
        unary[i] = w;
    }

    void set_pair(int i, int j, double w) {
        check_node(i);
        check_node(j);
        if (i == j) throw std::invalid_argument("self-pair (" + std::to_string(i) + ") is forbidden");
        if (i > j) std::swap(i, j);
        pairwise[{i, j}] = w;
    }

    bool is_maxcut() const {
        return std::all_of(unary.begin(), unary.end(), [](const auto& e) { return e.second == 0.0; });
    }

    // Sum of |w| over all stored terms; the natural scale bound of the spectrum.
    double total_abs_weight() const {
        double s = 0.0;
        for (const auto& [i, w] : unary) s += std::abs(w);
        for (const auto& [e, w] : pairwise) s += std::abs(w);
        return s;
    }

    // Stored edges, unary and quadratic alike.
    int edge_count() const { return static_cast<int>(unary.size() + pairwise.size()); }

    bool operator==(const IsingInstance&) const = default;

private:
    void check_node(int i) const {
        if (i < 1 || i > n)
            throw std::invalid_argument("node index " + std::to_string(i) + " outside [1, " + std::to_string(n) + "]");
    }
};

// Bit assignment q_1 ... q_n, one bit per node, q_1 the most significant bit
// of the basis index.
struct CutAssignment {
    std::vector<std::uint8_t> bits;

    CutAssignment() = default;
    explicit CutAssignment(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

    static CutAssignment from_index(int n, std::uint64_t index) {
        if (n < 1 || n > 63) throw std::invalid_argument("node count outside [1, 63]");
        if (index >> n) throw std::invalid_argument("basis index out of range for " + std::to_string(n) + " nodes");
        std::vector<std::uint8_t> b(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = (index >> (n - 1 - i)) & 1u;
        return CutAssignment(std::move(b));
    }

    static CutAssignment from_string(const std::string& s) {
        std::vector<std::uint8_t> b;
        b.reserve(s.size());
        for (char c : s) {
            if (c != '0' && c != '1') throw std::invalid_argument("bit-string may contain only '0' and '1'");
            b.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        if (b.empty()) throw std::invalid_argument("bit-string must be non-empty");
        return CutAssignment(std::move(b));
    }

    std::uint64_t index() const {
        std::uint64_t v = 0;
        for (auto b : bits) v = (v << 1) | b;
        return v;
    }

    CutAssignment complement() const {
        CutAssignment c(*this);
        for (auto& b : c.bits) b ^= 1u;
        return c;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(bits.size());
        for (auto b : bits) s.push_back(b ? '1' : '0');
        return s;
    }

    bool operator==(const CutAssignment&) const = default;
};

// Cost of an assignment: sum_i (-1)^{q_i} C_ii + sum_{i<j} (-1)^{q_i+q_j} C_ij.
// Every cost in this library flows through this accumulation order, so equal
// costs compare equal bit for bit.
inline double cut_cost(const IsingInstance& inst, const CutAssignment& q) {
    if (static_cast<int>(q.bits.size()) != inst.n)
        throw std::invalid_argument("assignment length does not match node count");
    double c = 0.0;
    for (const auto& [i, w] : inst.unary) c += (q.bits[static_cast<std::size_t>(i - 1)] ? -w : w);
    for (const auto& [e, w] : inst.pairwise) {
        const auto parity = q.bits[static_cast<std::size_t>(e.first - 1)] ^ q.bits[static_cast<std::size_t>(e.second - 1)];
        c += (parity ? -w : w);
    }
    return c;
}

// Full 2^n cost table, entry [index(q)] = cut_cost(q).
inline std::vector<double> hamiltonian_diagonal(const IsingInstance& inst, int guard = kEnumGuard) {
    if (inst.n < 1) throw std::invalid_argument("instance has no nodes");
    if (inst.n > guard)
        throw CapacityError("diagonal of " + std::to_string(inst.n) + " nodes exceeds enumeration guard " +
                            std::to_string(guard));
    const std::uint64_t dim = std::uint64_t{1} << inst.n;
    std::vector<double> d(dim);
    for (std::uint64_t q = 0; q < dim; ++q) d[q] = cut_cost(inst, CutAssignment::from_index(inst.n, q));
    return d;
}

// Instance together with the normalization constant K = lambda * sum|w|.
struct ScaledInstance {
    IsingInstance inst;
    double lambda = kDefaultLambda;
    double k = 0.0;

    double scaled(double w) const { return w / k; }
};

inline ScaledInstance rescale_k(const IsingInstance& inst, double lambda = kDefaultLambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    const double s = inst.total_abs_weight();
    if (s == 0.0) throw DegenerateInstance("all weights are zero; no scale exists");
    return ScaledInstance{inst, lambda, lambda * s};
}

// Exhaustive spectrum summary. Ties for the minimum are enumerated with exact
// floating-point equality (identical costs come from identical arithmetic).
struct SpectrumReport {
    double c_min = 0.0;
    double c_max = 0.0;
    std::vector<CutAssignment> argmins;
    std::optional<std::vector<double>> diagonal;
};

inline SpectrumReport brute_force(const IsingInstance& inst, bool include_diagonal = false, int guard = kEnumGuard) {
    auto d = hamiltonian_diagonal(inst, guard);
    SpectrumReport r;
    r.c_min = *std::min_element(d.begin(), d.end());
    r.c_max = *std::max_element(d.begin(), d.end());
    for (std::uint64_t q = 0; q < d.size(); ++q)
        if (d[q] == r.c_min) r.argmins.push_back(CutAssignment::from_index(inst.n, q));
    if (include_diagonal) r.diagonal = std::move(d);
    return r;
}

// Seeded random instance. Pairwise weights are drawn first in ascending (i, j)
// order, then unary weights in ascending i, so a MaxCut draw and an Ising draw
// with the same seed share their quadratic part. Each weight is uniform in
// [low, high]; with signed_weights a fair coin flips its sign.
inline IsingInstance random_instance(int n, double low, double high, bool signed_weights, bool maxcut_only,
                                     std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("node count must be at least 1");
    if (!(low <= high) || low < 0.0) throw std::invalid_argument("weight range requires 0 <= low <= high");
    std::mt19937_64 rng(seed);
    IsingInstance inst;
    inst.n = n;
    auto draw = [&]() {
        double w = low + canonical_uniform(rng) * (high - low);
        if (signed_weights && (rng() & 1u)) w = -w;
        return w;
    };
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) inst.set_pair(i, j, draw());
    if (!maxcut_only)
        for (int i = 1; i <= n; ++i) inst.set_unary(i, draw());
    return inst;
}

// Fraction of adjacent pairs of the ascending-sorted true costs whose order
// survives the sine transform sin(cost / K) with K = lambda * sum|w|.
// Ties in the true costs count as preserved either way.
inline double order_agreement(const IsingInstance& inst, double lambda, int guard = kEnumGuard) {
    const auto d = hamiltonian_diagonal(inst, guard);
    const double k = rescale_k(inst, lambda).k;
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    std::size_t preserved = 0;
    for (std::size_t p = 0; p + 1 < order.size(); ++p) {
        const std::size_t a = order[p], b = order[p + 1];
        if (d[a] == d[b] || std::sin(d[a] / k) <= std::sin(d[b] / k)) ++preserved;
    }
    return static_cast<double>(preserved) / static_cast<double>(order.size() - 1);
}

// Approximation ratio r = (energy - c_max) / (c_min - c_max): 1 at the optimum,
// 0 at the worst assignment. Sampling noise can push the raw value outside
// [0, 1]; the reported value is clamped and the event flagged.
struct ApproxRatio {
    double value = 0.0;
    bool clamped = false;
};

inline ApproxRatio approximation_ratio(const SpectrumReport& spectrum, double energy) {
    if (spectrum.c_min == spectrum.c_max)
        throw DegenerateInstance("flat spectrum; approximation ratio undefined");
    const double raw = (energy - spectrum.c_max) / (spectrum.c_min - spectrum.c_max);
    ApproxRatio r;
    r.value = std::clamp(raw, 0.0, 1.0);
    r.clamped = (raw != r.value);
    return r;
}

inline ApproxRatio approximation_ratio(const IsingInstance& inst, double energy, int guard = kEnumGuard) {
    return approximation_ratio(brute_force(inst, false, guard), energy);
}

// 1 when the proposed assignment attains the exact optimum. For MaxCut the
// spectrum is complement-symmetric, so symmetric_pair accepts the bit
// complement as well.
inline int approximation_index(const IsingInstance& inst, const SpectrumReport& spectrum, const CutAssignment& proposal,
                               bool symmetric_pair) {
    if (cut_cost(inst, proposal) == spectrum.c_min) return 1;
    if (symmetric_pair && cut_cost(inst, proposal.complement()) == spectrum.c_min) return 1;
    return 0;
}

inline int approximation_index(const IsingInstance& inst, const CutAssignment& proposal, bool symmetric_pair,
                               int guard = kEnumGuard) {
    return approximation_index(inst, brute_force(inst, false, guard), proposal, symmetric_pair);
}

// ---- JSON format ----
// {"n": 3, "unary": [[i, w], ...], "pairwise": [[i, j, w], ...]}
// 1-based indices, i < j, duplicates and self-pairs rejected.

inline nlohmann::json instance_to_json(const IsingInstance& inst) {
    nlohmann::json j;
    j["n"] = inst.n;
    j["unary"] = nlohmann::json::array();
    for (const auto& [i, w] : inst.unary) j["unary"].push_back({i, w});
    j["pairwise"] = nlohmann::json::array();
    for (const auto& [e, w] : inst.pairwise) j["pairwise"].push_back({e.first, e.second, w});
    return j;
}

inline IsingInstance instance_from_json(const nlohmann::json& j) {
    try {
        IsingInstance inst;
        inst.n = j.at("n").get<int>();
        if (inst.n < 1) throw std::invalid_argument("n must be at least 1");
        if (j.contains("unary")) {
            for (const auto& e : j.at("unary")) {
                if (!e.is_array() || e.size() != 2) throw std::invalid_argument("unary entry must be [i, w]");
                const int i = e.at(0).get<int>();
                if (inst.unary.count(i)) throw std::invalid_argument("duplicate unary entry for node " + std::to_string(i));
                inst.set_unary(i, e.at(1).get<double>());
            }
        }
        if (j.contains("pairwise")) {
            for (const auto& e : j.at("pairwise")) {
                if (!e.is_array() || e.size() != 3) throw std::invalid_argument("pairwise entry must be [i, j, w]");
                const int a = e.at(0).get<int>(), b = e.at(1).get<int>();
                if (a >= b) throw std::invalid_argument("pairwise entry requires i < j");
                if (inst.pairwise.count({a, b}))
                    throw std::invalid_argument("duplicate pairwise entry (" + std::to_string(a) + ", " + std::to_string(b) + ")");
                inst.set_pair(a, b, e.at(2).get<double>());
            }
        }
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed instance JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("invalid instance: ") + e.what());
    }
}

inline IsingInstance read_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return instance_from_json(j);
}

inline void write_instance(const std::string& path, const IsingInstance& inst) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << instance_to_json(inst).dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace uq
