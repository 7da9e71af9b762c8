// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "uq/instance.hpp"

namespace uq {

// Gate vocabulary. Rotation conventions:
//   RY(t) = exp(-i t Y / 2) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
//   RX(t) = exp(-i t X / 2)
//   CRY(t) applies RY(t) on the target when the control is 1.
//   DiagPhase multiplies amplitude |b> by exp(-i gamma * phases[b]) where b is
//   read from the listed targets, first target = most significant bit.
enum class GateKind { X, Z, H, RY, RX, CNOT, CRY, DiagPhase };

inline const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::X: return "X";
        case GateKind::Z: return "Z";
        case GateKind::H: return "H";
        case GateKind::RY: return "RY";
        case GateKind::RX: return "RX";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CRY: return "CRY";
        case GateKind::DiagPhase: return "DIAG_PHASE";
    }
    throw std::invalid_argument("unknown gate kind");
}

inline GateKind gate_kind_from_name(const std::string& s) {
    if (s == "X") return GateKind::X;
    if (s == "Z") return GateKind::Z;
    if (s == "H") return GateKind::H;
    if (s == "RY") return GateKind::RY;
    if (s == "RX") return GateKind::RX;
    if (s == "CNOT") return GateKind::CNOT;
    if (s == "CRY") return GateKind::CRY;
    if (s == "DIAG_PHASE") return GateKind::DiagPhase;
    throw std::invalid_argument("unknown gate kind '" + s + "'");
}

struct GateOp {
    GateKind kind = GateKind::X;
    std::vector<int> targets;
    std::vector<int> controls;
    double theta = 0.0;                // RY / RX / CRY angle
    double gamma = 0.0;                // DiagPhase scale
    std::vector<double> phases;        // DiagPhase table, size 2^targets

    static GateOp make(GateKind k, std::vector<int> targets, std::vector<int> controls, double theta = 0.0) {
        GateOp g;
        g.kind = k;
        g.targets = std::move(targets);
        g.controls = std::move(controls);
        g.theta = theta;
        return g;
    }
    static GateOp x(int t) { return make(GateKind::X, {t}, {}); }
    static GateOp z(int t) { return make(GateKind::Z, {t}, {}); }
    static GateOp h(int t) { return make(GateKind::H, {t}, {}); }
    static GateOp ry(double theta, int t) { return make(GateKind::RY, {t}, {}, theta); }
    static GateOp rx(double theta, int t) { return make(GateKind::RX, {t}, {}, theta); }
    static GateOp cnot(int control, int t) { return make(GateKind::CNOT, {t}, {control}); }
    static GateOp cry(double theta, int control, int t) { return make(GateKind::CRY, {t}, {control}, theta); }
    static GateOp diag_phase(double gamma, std::vector<int> targets, std::vector<double> phases) {
        GateOp g = make(GateKind::DiagPhase, std::move(targets), {});
        g.gamma = gamma;
        g.phases = std::move(phases);
        return g;
    }

    bool touches(int qubit) const {
        for (int t : targets)
            if (t == qubit) return true;
        for (int c : controls)
            if (c == qubit) return true;
        return false;
    }

    // Structural sanity against a register of m qubits.
    void validate(int m) const {
        auto in_range = [m](int q) { return q >= 0 && q < m; };
        if (targets.empty()) throw std::invalid_argument("gate has no targets");
        for (int t : targets)
            if (!in_range(t)) throw std::invalid_argument("gate target out of range");
        for (int c : controls)
            if (!in_range(c)) throw std::invalid_argument("gate control out of range");
        for (int c : controls)
            for (int t : targets)
                if (c == t) throw std::invalid_argument("gate control equals target");
        const bool controlled = kind == GateKind::CNOT || kind == GateKind::CRY;
        if (controlled && controls.size() != 1) throw std::invalid_argument("controlled gate needs exactly one control");
        if (!controlled && !controls.empty()) throw std::invalid_argument("plain gate must not list controls");
        if (kind == GateKind::DiagPhase) {
            if (targets.size() > 30) throw CapacityError("diagonal phase table too large");
            if (phases.size() != (std::size_t{1} << targets.size()))
                throw std::invalid_argument("diagonal phase table size must be 2^targets");
        } else if (targets.size() != 1) {
            throw std::invalid_argument("gate takes exactly one target");
        }
    }

    bool operator==(const GateOp&) const = default;
};

// Register bookkeeping: which qubit plays which part. All roles optional;
// builders fill what they use. working[i] hosts node i+1.
struct QubitRoles {
    std::optional<int> ancilla;
    std::optional<int> cost;
    std::vector<int> working;

    bool operator==(const QubitRoles&) const = default;
};

struct Circuit {
    int m = 0;
    QubitRoles roles;
    std::vector<GateOp> ops;

    void add(GateOp g) {
        g.validate(m);
        ops.push_back(std::move(g));
    }

    void validate() const {
        if (m < 1) throw std::invalid_argument("circuit needs at least one qubit");
        std::vector<char> used(static_cast<std::size_t>(m), 0);
        auto claim = [&](int q) {
            if (q < 0 || q >= m) throw std::invalid_argument("role qubit out of range");
            if (used[static_cast<std::size_t>(q)]) throw std::invalid_argument("role map must be injective");
            used[static_cast<std::size_t>(q)] = 1;
        };
        if (roles.ancilla) claim(*roles.ancilla);
        if (roles.cost) claim(*roles.cost);
        for (int w : roles.working) claim(w);
        for (const auto& g : ops) g.validate(m);
    }

    std::size_t count(GateKind k) const {
        std::size_t c = 0;
        for (const auto& g : ops)
            if (g.kind == k) ++c;
        return c;
    }

    bool operator==(const Circuit&) const = default;
};

// ---- JSON format ----
// {"m": 4, "roles": {"ancilla": 0, "cost": 1, "working": [2, 3]},
//  "ops": [{"kind": "CNOT", "targets": [1], "controls": [0]},
//          {"kind": "RY", "targets": [1], "theta": 0.25}, ...]}
// DIAG_PHASE ops carry "gamma" and "phases" instead of "theta".

inline nlohmann::json circuit_to_json(const Circuit& c) {
    nlohmann::json j;
    j["m"] = c.m;
    j["roles"] = nlohmann::json::object();
    if (c.roles.ancilla) j["roles"]["ancilla"] = *c.roles.ancilla;
    if (c.roles.cost) j["roles"]["cost"] = *c.roles.cost;
    j["roles"]["working"] = c.roles.working;
    j["ops"] = nlohmann::json::array();
    for (const auto& g : c.ops) {
        nlohmann::json op;
        op["kind"] = gate_name(g.kind);
        op["targets"] = g.targets;
        if (!g.controls.empty()) op["controls"] = g.controls;
        if (g.kind == GateKind::RY || g.kind == GateKind::RX || g.kind == GateKind::CRY) op["theta"] = g.theta;
        if (g.kind == GateKind::DiagPhase) {
            op["gamma"] = g.gamma;
            op["phases"] = g.phases;
        }
        j["ops"].push_back(std::move(op));
    }
    return j;
}

inline Circuit circuit_from_json(const nlohmann::json& j) {
    try {
        Circuit c;
        c.m = j.at("m").get<int>();
        if (j.contains("roles")) {
            const auto& r = j.at("roles");
            if (r.contains("ancilla")) c.roles.ancilla = r.at("ancilla").get<int>();
            if (r.contains("cost")) c.roles.cost = r.at("cost").get<int>();
            if (r.contains("working")) c.roles.working = r.at("working").get<std::vector<int>>();
        }
        for (const auto& op : j.at("ops")) {
            GateOp g;
            g.kind = gate_kind_from_name(op.at("kind").get<std::string>());
            g.targets = op.at("targets").get<std::vector<int>>();
            if (op.contains("controls")) g.controls = op.at("controls").get<std::vector<int>>();
            if (op.contains("theta")) g.theta = op.at("theta").get<double>();
            if (op.contains("gamma")) g.gamma = op.at("gamma").get<double>();
            if (op.contains("phases")) g.phases = op.at("phases").get<std::vector<double>>();
            c.add(std::move(g));
        }
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed circuit JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("invalid circuit: ") + e.what());
    }
}

inline Circuit read_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return circuit_from_json(j);
}

inline void write_circuit(const std::string& path, const Circuit& c) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << circuit_to_json(c).dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace uq
