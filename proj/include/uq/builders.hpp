// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "uq/circuit.hpp"
#include "uq/instance.hpp"

namespace uq {

// Circuit builders for the universal cost encoding
//
//   U(C, K) = [[sin(C/K), cos(C/K)], [cos(C/K), -sin(C/K)]]
//
// block-structured over the cost qubit, where C/K is the scaled diagonal cost
// operator. U is Hermitian and unitary at once, so the same object serves as
// observable and gate. For each working basis state q the cost qubit sees
// RY(-2 c_q) X with c_q = cost(q)/K; the circuit realizes the RY as a chain of
// parity-conditioned rotations, one per stored edge:
//
//   X on cost, then per quadratic edge (i, j):
//       CNOT(q_i->cost) CNOT(q_j->cost) RY(-2 w_ij/K) CNOT(q_i->cost) CNOT(q_j->cost)
//   then per unary edge i:
//       CNOT(q_i->cost) RY(-2 w_ii/K) CNOT(q_i->cost)
//
// Edges are processed in ascending index order, quadratic before unary. Both
// sandwich sides list controls in ascending order; the two CNOTs commute, and
// this ordering provably creates no adjacent identical pair on complete
// graphs, keeping the built gate census equal to the closed-form resource
// count.
//
// The controlled variant conditions exactly the rotations on the ancilla via
//   [RY(t)]^a = X^a RY(-t/2) X^a RY(t/2)
// (two CNOTs, two half-angle rotations, no double-controlled gate) and turns
// the leading X into CNOT(ancilla->cost), which gives the genuine
// |0><0| (x) I + |1><1| (x) U block form used by the Hadamard test.

namespace detail {

inline void append_conditioned_ry(Circuit& c, double theta, int cost, std::optional<int> ancilla) {
    if (!ancilla) {
        c.add(GateOp::ry(theta, cost));
        return;
    }
    c.add(GateOp::ry(theta / 2, cost));
    c.add(GateOp::cnot(*ancilla, cost));
    c.add(GateOp::ry(-theta / 2, cost));
    c.add(GateOp::cnot(*ancilla, cost));
}

// Shared gate sequence of the plain and controlled encodings. node0 is the
// qubit hosting node 1; node i sits at node0 + i - 1.
inline void append_encoding(Circuit& c, const ScaledInstance& s, int cost, int node0, std::optional<int> ancilla) {
    if (ancilla)
        c.add(GateOp::cnot(*ancilla, cost));
    else
        c.add(GateOp::x(cost));
    for (const auto& [e, w] : s.inst.pairwise) {
        const int qi = node0 + e.first - 1, qj = node0 + e.second - 1;
        const double theta = -2.0 * s.scaled(w);
        c.add(GateOp::cnot(qi, cost));
        c.add(GateOp::cnot(qj, cost));
        append_conditioned_ry(c, theta, cost, ancilla);
        c.add(GateOp::cnot(qi, cost));
        c.add(GateOp::cnot(qj, cost));
    }
    for (const auto& [i, w] : s.inst.unary) {
        const int qi = node0 + i - 1;
        const double theta = -2.0 * s.scaled(w);
        c.add(GateOp::cnot(qi, cost));
        append_conditioned_ry(c, theta, cost, ancilla);
        c.add(GateOp::cnot(qi, cost));
    }
}

// Fan out from the first listed qubit to the others (descending), one H, fan
// back (ascending). Maps |b1 b2 .. bn> to (|b1 b2 .. bn> +- |complement>)/sqrt2.
inline void append_entanglement(Circuit& c, const std::vector<int>& wq) {
    const int head = wq[0];
    for (std::size_t k = wq.size(); k-- > 1;) c.add(GateOp::cnot(head, wq[k]));
    c.add(GateOp::h(head));
    for (std::size_t k = 1; k < wq.size(); ++k) c.add(GateOp::cnot(head, wq[k]));
}

}  // namespace detail

// Plain encoding on 1 + n qubits: cost qubit 0, node i at qubit i.
inline Circuit build_block_encoding(const ScaledInstance& s) {
    Circuit c;
    c.m = s.inst.n + 1;
    c.roles.cost = 0;
    for (int i = 1; i <= s.inst.n; ++i) c.roles.working.push_back(i);
    detail::append_encoding(c, s, 0, 1, std::nullopt);
    return c;
}

// Controlled encoding on 1 + 1 + n qubits: ancilla 0, cost 1, node i at
// qubit i + 1. Unitary equals |0><0| (x) I + |1><1| (x) U(C, K).
inline Circuit build_controlled_block_encoding(const ScaledInstance& s) {
    Circuit c;
    c.m = s.inst.n + 2;
    c.roles.ancilla = 0;
    c.roles.cost = 1;
    for (int i = 1; i <= s.inst.n; ++i) c.roles.working.push_back(i + 1);
    detail::append_encoding(c, s, 1, 2, 0);
    return c;
}

// Product ansatz: RY(theta_i) on qubit i.
inline Circuit build_ansatz(const std::vector<double>& thetas) {
    if (thetas.empty()) throw std::invalid_argument("ansatz needs at least one angle");
    Circuit c;
    c.m = static_cast<int>(thetas.size());
    for (int i = 0; i < c.m; ++i) {
        c.roles.working.push_back(i);
        c.add(GateOp::ry(thetas[static_cast<std::size_t>(i)], i));
    }
    return c;
}

// Standalone entanglement circuit on n qubits. Columns pair every basis state
// with its bit complement: |b> -> (|b> + |~b>)/sqrt2 for b in the lower half,
// (|~b> - |b>)/sqrt2 for b in the upper half.
inline Circuit build_entanglement(int n) {
    if (n < 2) throw std::invalid_argument("entanglement circuit needs at least 2 qubits");
    Circuit c;
    c.m = n;
    for (int i = 0; i < n; ++i) c.roles.working.push_back(i);
    detail::append_entanglement(c, c.roles.working);
    return c;
}

// Full loss-evaluation circuit on 1 + 1 + n qubits:
// ansatz on the working register (optionally followed by the entanglement
// pattern, in which case thetas has n - 1 entries and node 1 stays |0>),
// then H(ancilla), controlled encoding, H(ancilla).
// After running on |0...0>, P(ancilla=0) - P(ancilla=1) = <psi| sin(C/K) |psi>.
inline Circuit build_workflow(const ScaledInstance& s, const std::vector<double>& thetas, bool entangle) {
    const int n = s.inst.n;
    const auto expected = static_cast<std::size_t>(entangle ? n - 1 : n);
    if (entangle && n < 2) throw std::invalid_argument("entangled workflow needs at least 2 nodes");
    if (thetas.size() != expected)
        throw std::invalid_argument("workflow expects " + std::to_string(expected) + " angles, got " +
                                    std::to_string(thetas.size()));
    Circuit c;
    c.m = n + 2;
    c.roles.ancilla = 0;
    c.roles.cost = 1;
    for (int i = 1; i <= n; ++i) c.roles.working.push_back(i + 1);
    if (entangle) {
        for (int i = 0; i < n - 1; ++i) c.add(GateOp::ry(thetas[static_cast<std::size_t>(i)], i + 3));
        detail::append_entanglement(c, c.roles.working);
    } else {
        for (int i = 0; i < n; ++i) c.add(GateOp::ry(thetas[static_cast<std::size_t>(i)], i + 2));
    }
    c.add(GateOp::h(0));
    detail::append_encoding(c, s, 1, 2, 0);
    c.add(GateOp::h(0));
    return c;
}

// QAOA circuit on n qubits: |+>^n, then p alternating layers of the cost
// phase exp(-i gamma_k C) (as one diagonal gate over the true, unscaled
// costs) and the mixer RX(2 beta_k) on every qubit.
inline Circuit build_qaoa(const IsingInstance& inst, const std::vector<double>& gammas,
                          const std::vector<double>& betas, int guard = kEnumGuard) {
    if (gammas.empty() || gammas.size() != betas.size())
        throw std::invalid_argument("qaoa needs p >= 1 with matching gamma/beta counts");
    const auto diag = hamiltonian_diagonal(inst, guard);
    Circuit c;
    c.m = inst.n;
    for (int i = 0; i < inst.n; ++i) c.roles.working.push_back(i);
    for (int i = 0; i < inst.n; ++i) c.add(GateOp::h(i));
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        c.add(GateOp::diag_phase(gammas[k], c.roles.working, diag));
        for (int i = 0; i < inst.n; ++i) c.add(GateOp::rx(2.0 * betas[k], i));
    }
    return c;
}

// ---- Resource accounting ----

enum class Method { UqIsing, Qaoa };

// Closed-form gate and width counts. |S| is the node count, |E| the number of
// stored edges, unary and quadratic alike. The uqising row describes the
// controlled encoding inside the Hadamard test (the 1 is the ancilla->cost
// CNOT, the 2 Hadamards are the test's sandwich); its CNOT term assumes one
// unary edge per node, so for sparser instances the built census can only sit
// at or above the formula. Negative formula values are floored at zero and
// flagged.
struct ResourceReport {
    std::string method;
    int qubits = 0;
    long long cnot = 0;
    long long rotations = 0;
    long long hadamard = 0;
    std::string connectivity;
    std::vector<std::string> notes;
};

inline ResourceReport count_resources(const IsingInstance& inst, Method method, int p = 1) {
    const long long s = inst.n;
    const long long e = inst.edge_count();
    ResourceReport r;
    auto floored = [&r](long long v, const char* what) {
        if (v < 0) {
            r.notes.push_back(std::string(what) + "_floored");
            return 0ll;
        }
        return v;
    };
    if (e == 0) r.notes.push_back("empty_edge_set");
    switch (method) {
        case Method::UqIsing:
            r.method = "uqising";
            r.qubits = inst.n + 2;
            r.cnot = floored(1 + 6 * e - 2 * s, "cnot");
            r.rotations = 2 * e;
            r.hadamard = 2;
            r.connectivity = "one-to-all(" + std::to_string(s + 1) + ")";
            break;
        case Method::Qaoa:
            if (p < 1) throw std::invalid_argument("qaoa depth must be at least 1");
            r.method = "qaoa(" + std::to_string(p) + ")";
            r.qubits = inst.n;
            r.cnot = floored(p * (2 * e - 2 * s), "cnot");
            r.rotations = p * (e + s);
            r.hadamard = s;
            r.connectivity = "graph-dependent(" + std::to_string(std::max(0ll, e - s)) + ")";
            break;
    }
    return r;
}

inline nlohmann::json resource_report_to_json(const ResourceReport& r) {
    nlohmann::json j;
    j["method"] = r.method;
    j["qubits"] = r.qubits;
    j["cnot"] = r.cnot;
    j["rotations"] = r.rotations;
    j["hadamard"] = r.hadamard;
    j["connectivity"] = r.connectivity;
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

// Actual gate census of a built circuit, for comparison against the formulas.
struct GateCensus {
    int qubits = 0;
    long long cnot = 0;
    long long rotations = 0;
    long long hadamard = 0;
};

inline GateCensus gate_census(const Circuit& c) {
    GateCensus g;
    g.qubits = c.m;
    for (const auto& op : c.ops) {
        switch (op.kind) {
            case GateKind::CNOT: ++g.cnot; break;
            case GateKind::RY:
            case GateKind::RX:
            case GateKind::CRY: ++g.rotations; break;
            case GateKind::H: ++g.hadamard; break;
            default: break;
        }
    }
    return g;
}

// Removes adjacent identical CNOT pairs: same control, same target, and no
// gate in between that touches either qubit. Gates on disjoint qubits commute
// past, so the scan skips them; removals cascade to a fixed point. The
// circuit unitary is unchanged.
inline Circuit cancel_adjacent_cnots(const Circuit& in) {
    Circuit out;
    out.m = in.m;
    out.roles = in.roles;
    auto& ops = out.ops;
    for (const auto& g : in.ops) {
        if (g.kind == GateKind::CNOT) {
            bool cancelled = false;
            for (std::size_t k = ops.size(); k-- > 0;) {
                const auto& prev = ops[k];
                if (prev.kind == GateKind::CNOT && prev.controls == g.controls && prev.targets == g.targets) {
                    ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(k));
                    cancelled = true;
                    break;
                }
                if (prev.touches(g.targets[0]) || prev.touches(g.controls[0])) break;
            }
            if (cancelled) continue;
        }
        ops.push_back(g);
    }
    return out;
}

}  // namespace uq
