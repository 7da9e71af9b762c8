// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uq/builders.hpp"
#include "uq/circuit.hpp"
#include "uq/instance.hpp"
#include "uq/seeding.hpp"
#include "uq/statevector.hpp"

namespace uq {

enum class LossMode { Exact, Shots };
enum class InitAngles { Auto, Zeros, HalfPi, Explicit };
enum class ZeroGradPolicy { Kick, Skip };
enum class QaoaOptimizer { NgdShift, Simplex };

// Seed sub-stream domains; see derive_seed.
inline constexpr std::uint64_t kSeedLoss = 1;
inline constexpr std::uint64_t kSeedKick = 2;
inline constexpr std::uint64_t kSeedReadout = 3;
inline constexpr std::uint64_t kSeedSimplex = 4;

struct OptimizerConfig {
    int k_max = 100;
    LossMode mode = LossMode::Exact;
    std::int64_t shots = 1024;          // per loss evaluation in shots mode
    std::int64_t readout_shots = 1024;  // final measurement budget
    std::uint64_t seed = 0;
    InitAngles init = InitAngles::Auto;
    std::vector<double> init_values;    // used when init == Explicit
    bool entangle = false;
    double lambda = kDefaultLambda;
    // Step-size dimension of the update rule: number of optimized angles by
    // default, node count when set.
    bool dim_from_node_count = false;
    // With exact expectations the pinned starting angles are true stationary
    // points (the loss is even in every angle at zero; at pi/2 the MaxCut
    // complement symmetry kills every component), so a pure skip would freeze
    // the whole run. Kick takes the scheduled step along a seeded random unit
    // direction instead, which is what sampling noise does for free in shots
    // mode. Skip restores the inert behavior.
    ZeroGradPolicy zero_grad = ZeroGradPolicy::Kick;
    double zero_grad_tol = 1e-12;

    void validate() const {
        if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
        if (mode == LossMode::Shots && shots < 1) throw std::invalid_argument("shots must be at least 1");
        if (readout_shots < 1) throw std::invalid_argument("readout_shots must be at least 1");
    }
};

// Identifies one loss evaluation inside a run so its sampling seed is a pure
// function of position, independent of scheduling.
struct EvalTag {
    std::uint64_t iter = 0;
    std::uint64_t component = 0;
    std::uint64_t sign = 0;
};

// Hadamard-test loss L(Theta) = <psi(Theta)| sin(C/K) |psi(Theta)>, read off
// the ancilla as p(0) - p(1).
inline double loss(const ScaledInstance& s, const std::vector<double>& thetas, const OptimizerConfig& cfg,
                   EvalTag tag = {}) {
    const Circuit c = build_workflow(s, thetas, cfg.entangle);
    StateVector sv(c.m);
    sv.apply(c);
    if (cfg.mode == LossMode::Exact) return sv.ancilla_expectation(*c.roles.ancilla);
    const auto counts =
        sv.sample({*c.roles.ancilla}, cfg.shots, derive_seed(cfg.seed, kSeedLoss, tag.iter, 2 * tag.component + tag.sign));
    std::int64_t diff = 0;
    if (auto it = counts.find("0"); it != counts.end()) diff += it->second;
    if (auto it = counts.find("1"); it != counts.end()) diff -= it->second;
    return static_cast<double>(diff) / static_cast<double>(cfg.shots);
}

// Recovers the cost from a loss value: <C> = K * arcsin(L). The loss is
// clamped into [-1, 1] first so floating dust at the extremes cannot leave
// the arcsine domain.
inline double cost_from_loss(const ScaledInstance& s, double loss_value) {
    return s.k * std::asin(std::clamp(loss_value, -1.0, 1.0));
}

// Exact gradient by the parameter-shift rule: dL/dtheta_i =
// (L(Theta + pi/2 e_i) - L(Theta - pi/2 e_i)) / 2. Exactly 2 * dim loss
// evaluations; the iter tag keeps shots-mode seeds distinct across calls.
inline std::vector<double> parameter_shift_grad(const ScaledInstance& s, const std::vector<double>& thetas,
                                                const OptimizerConfig& cfg, std::uint64_t iter = 0,
                                                std::int64_t* evals = nullptr) {
    constexpr double kShift = std::numbers::pi / 2;
    std::vector<double> g(thetas.size());
    std::vector<double> shifted = thetas;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        shifted[i] = thetas[i] + kShift;
        const double up = loss(s, shifted, cfg, {iter, i, 0});
        shifted[i] = thetas[i] - kShift;
        const double down = loss(s, shifted, cfg, {iter, i, 1});
        shifted[i] = thetas[i];
        g[i] = 0.5 * (up - down);
        if (evals) *evals += 2;
    }
    return g;
}

inline double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Step magnitude sqrt(pi * dim / 2) * exp(-4 k^2 / k_max^2): a first step
// large enough to flip any angle by about pi/2, decaying to exp(-4) of that.
inline double ngd_step_scale(int k, int k_max, int dim) {
    if (k_max < 1 || k < 0 || dim < 1) throw std::invalid_argument("ngd schedule needs k >= 0, k_max >= 1, dim >= 1");
    const double kk = static_cast<double>(k) / static_cast<double>(k_max);
    return std::sqrt(std::numbers::pi * dim / 2.0) * std::exp(-4.0 * kk * kk);
}

// One normalized-gradient-descent update. Returns nothing when the gradient
// norm is at or below tol: the caller owns the zero-gradient policy.
inline std::optional<std::vector<double>> ngd_step(const std::vector<double>& thetas, const std::vector<double>& grad,
                                                   int k, int k_max, int dim, double tol = 1e-12) {
    if (grad.size() != thetas.size()) throw std::invalid_argument("gradient arity mismatch");
    const double gn = l2_norm(grad);
    if (gn <= tol) return std::nullopt;
    const double scale = ngd_step_scale(k, k_max, dim);
    std::vector<double> out = thetas;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= scale * grad[i] / gn;
    return out;
}

struct TraceRow {
    int k = 0;
    double loss = 0.0;
    double grad_norm = 0.0;
    double step_size = 0.0;
};

struct TrainTrace {
    std::vector<TraceRow> rows;          // one per iteration plus a final record
    std::vector<double> thetas_star;
    std::int64_t zero_grad_events = 0;
};

inline void write_trace_csv(const std::string& path, const TrainTrace& t) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "k,loss,grad_norm,step_size\n";
    char buf[160];
    for (const auto& r : t.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.k, r.loss, r.grad_norm, r.step_size);
        out << buf;
    }
    if (!out) throw IoError("failed writing " + path);
}

// Iteration index of the first best (lowest) recorded loss.
inline int iterations_to_best(const TrainTrace& t) {
    int best_k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : t.rows)
        if (r.loss < best) {
            best = r.loss;
            best_k = r.k;
        }
    return best_k;
}

struct Solution {
    std::vector<double> thetas;
    CutAssignment most_likely;
    double energy = 0.0;
    std::map<std::string, double> readout;  // counts; exact mode stores readout_shots * probability
    TrainTrace trace;
};

namespace detail {

// Fixed-budget NGD loop shared by the universal solver and the QAOA-ngd
// baseline. lossf(thetas, tag) evaluates the objective; dim feeds the step
// schedule. Runs exactly cfg.k_max iterations, no stopping test; the trace
// gets one row per iteration (pre-update loss) plus a final record.
template <typename LossFn>
std::pair<std::vector<double>, TrainTrace> run_ngd(LossFn&& lossf, std::vector<double> thetas,
                                                   const OptimizerConfig& cfg, int dim) {
    TrainTrace trace;
    const auto arity = thetas.size();
    for (int k = 0; k < cfg.k_max; ++k) {
        const auto ku = static_cast<std::uint64_t>(k);
        const double l = lossf(thetas, EvalTag{ku, arity, 0});
        std::vector<double> g(arity);
        std::vector<double> shifted = thetas;
        constexpr double kShift = std::numbers::pi / 2;
        for (std::size_t i = 0; i < arity; ++i) {
            shifted[i] = thetas[i] + kShift;
            const double up = lossf(shifted, EvalTag{ku, i, 0});
            shifted[i] = thetas[i] - kShift;
            const double down = lossf(shifted, EvalTag{ku, i, 1});
            shifted[i] = thetas[i];
            g[i] = 0.5 * (up - down);
        }
        const double gn = l2_norm(g);
        const double scale = ngd_step_scale(k, cfg.k_max, dim);
        TraceRow row{k, l, gn, 0.0};
        if (auto next = ngd_step(thetas, g, k, cfg.k_max, dim, cfg.zero_grad_tol)) {
            thetas = std::move(*next);
            row.step_size = scale;
        } else {
            ++trace.zero_grad_events;
            if (cfg.zero_grad == ZeroGradPolicy::Kick) {
                std::mt19937_64 rng(derive_seed(cfg.seed, kSeedKick, ku));
                std::vector<double> dir(arity);
                for (auto& d : dir) d = standard_normal(rng);
                const double dn = l2_norm(dir);
                for (std::size_t i = 0; i < arity; ++i) thetas[i] -= scale * dir[i] / dn;
                row.step_size = scale;
            }
        }
        trace.rows.push_back(row);
    }
    trace.rows.push_back(TraceRow{cfg.k_max, lossf(thetas, EvalTag{static_cast<std::uint64_t>(cfg.k_max), arity, 0}), 0.0, 0.0});
    trace.thetas_star = thetas;
    return {std::move(thetas), std::move(trace)};
}

// Most-likely readout of a prepared state over the given qubits. Exact mode
// takes the distribution argmax (ties resolve to the lexicographically
// smallest bit-string) and stores expected counts; shots mode samples and
// takes the most frequent key, same tie rule.
inline void read_out(const StateVector& sv, const std::vector<int>& qubits, const OptimizerConfig& cfg,
                     Solution& sol) {
    const int n = static_cast<int>(qubits.size());
    if (cfg.mode == LossMode::Exact) {
        const auto p = sv.probabilities(qubits);
        std::uint64_t best = 0;
        for (std::uint64_t i = 0; i < p.size(); ++i) {
            if (p[i] > p[best]) best = i;
            if (p[i] > 0.0) sol.readout[StateVector::key_string(i, qubits.size())] =
                static_cast<double>(cfg.readout_shots) * p[i];
        }
        sol.most_likely = CutAssignment::from_index(n, best);
        return;
    }
    const auto counts = sv.sample(qubits, cfg.readout_shots, derive_seed(cfg.seed, kSeedReadout));
    std::int64_t best_count = -1;
    std::string best_key;
    for (const auto& [key, count] : counts) {
        sol.readout[key] = static_cast<double>(count);
        if (count > best_count) {
            best_count = count;
            best_key = key;
        }
    }
    sol.most_likely = CutAssignment::from_string(best_key);
}

}  // namespace detail

// Initial angles: zeros for MaxCut, pi/2 for Ising, unless overridden.
inline std::vector<double> initial_angles(const IsingInstance& inst, const OptimizerConfig& cfg, std::size_t arity) {
    switch (cfg.init) {
        case InitAngles::Explicit:
            if (cfg.init_values.size() != arity)
                throw std::invalid_argument("explicit init needs " + std::to_string(arity) + " angles");
            return cfg.init_values;
        case InitAngles::Zeros: return std::vector<double>(arity, 0.0);
        case InitAngles::HalfPi: return std::vector<double>(arity, std::numbers::pi / 2);
        case InitAngles::Auto:
            return std::vector<double>(arity, inst.is_maxcut() ? 0.0 : std::numbers::pi / 2);
    }
    throw std::invalid_argument("unknown init mode");
}

// Full universal solve: rescale, optimize the ansatz angles by NGD with
// parameter-shift gradients for exactly k_max iterations, then read the
// working register out.
inline Solution solve_uq(const IsingInstance& inst, const OptimizerConfig& cfg) {
    cfg.validate();
    const ScaledInstance s = rescale_k(inst, cfg.lambda);
    const std::size_t arity = static_cast<std::size_t>(cfg.entangle ? inst.n - 1 : inst.n);
    auto thetas = initial_angles(inst, cfg, arity);
    const int dim = cfg.dim_from_node_count ? inst.n : static_cast<int>(arity);
    auto lossf = [&](const std::vector<double>& th, EvalTag tag) { return loss(s, th, cfg, tag); };
    auto [final_thetas, trace] = detail::run_ngd(lossf, std::move(thetas), cfg, dim);

    Solution sol;
    sol.thetas = final_thetas;
    sol.trace = std::move(trace);
    const Circuit c = build_workflow(s, final_thetas, cfg.entangle);
    StateVector sv(c.m);
    sv.apply(c);
    detail::read_out(sv, c.roles.working, cfg, sol);
    sol.energy = cut_cost(inst, sol.most_likely);
    return sol;
}

// QAOA expectation <gamma, beta| C |gamma, beta| from the true (unscaled)
// diagonal; exact from amplitudes or estimated from seeded samples.
inline double qaoa_energy(const IsingInstance& inst, const std::vector<double>& diag,
                          const std::vector<double>& gammas, const std::vector<double>& betas,
                          LossMode mode = LossMode::Exact, std::int64_t shots = 1024, std::uint64_t seed = 0) {
    const Circuit c = build_qaoa(inst, gammas, betas);
    StateVector sv(c.m);
    sv.apply(c);
    if (mode == LossMode::Exact) {
        double e = 0.0;
        for (std::uint64_t q = 0; q < diag.size(); ++q) e += std::norm(sv.amplitudes()[q]) * diag[q];
        return e;
    }
    const auto counts = sv.sample(c.roles.working, shots, seed);
    double e = 0.0;
    for (const auto& [key, count] : counts)
        e += static_cast<double>(count) * diag[CutAssignment::from_string(key).index()];
    return e / static_cast<double>(shots);
}

inline double qaoa_energy(const IsingInstance& inst, const std::vector<double>& gammas,
                          const std::vector<double>& betas, LossMode mode = LossMode::Exact,
                          std::int64_t shots = 1024, std::uint64_t seed = 0) {
    return qaoa_energy(inst, hamiltonian_diagonal(inst), gammas, betas, mode, shots, seed);
}

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double initial_edge = 0.1;       // radians
    std::int64_t budget_per_dim = 200;  // loss evaluations
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    std::int64_t evals = 0;
    std::vector<std::pair<std::int64_t, double>> improvements;  // (eval index, new best)
};

// Classic Nelder-Mead with a hard evaluation budget and pinned coefficients.
// Deterministic: no restarts, no randomness; breaks early only when the
// simplex has numerically collapsed. The initial simplex is the regular
// (equal-edge) one, which displaces every coordinate at every vertex;
// axis-aligned offsets would start flat here, because a phase-only move
// leaves the sampled distribution unchanged and a mixer-only move acts on
// an eigenstate of the mixer.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& x0, const NelderMeadOptions& opt = {}) {
    const std::size_t d = x0.size();
    if (d == 0) throw std::invalid_argument("simplex needs at least one dimension");
    const std::int64_t budget = opt.budget_per_dim * static_cast<std::int64_t>(d);
    NelderMeadResult res;
    res.x = x0;
    res.f = std::numeric_limits<double>::infinity();

    auto eval = [&](const std::vector<double>& x) {
        const double v = f(x);
        ++res.evals;
        if (v < res.f) {
            res.f = v;
            res.x = x;
            res.improvements.emplace_back(res.evals, v);
        }
        return v;
    };

    std::vector<std::vector<double>> pts(d + 1, x0);
    std::vector<double> fv(d + 1);
    const double dd = static_cast<double>(d);
    const double p = opt.initial_edge / (dd * std::numbers::sqrt2) * (std::sqrt(dd + 1.0) + dd - 1.0);
    const double q = opt.initial_edge / (dd * std::numbers::sqrt2) * (std::sqrt(dd + 1.0) - 1.0);
    for (std::size_t i = 1; i <= d; ++i)
        for (std::size_t j = 0; j < d; ++j) pts[i][j] += (j == i - 1) ? p : q;
    for (std::size_t i = 0; i <= d && res.evals < budget; ++i) fv[i] = eval(pts[i]);

    std::vector<std::size_t> order(d + 1);
    while (res.evals < budget) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], second_worst = order[d - 1], worst = order[d];

        double spread = 0.0;
        for (std::size_t i = 0; i <= d; ++i) spread = std::max(spread, std::abs(fv[i] - fv[best]));
        if (spread < 1e-15) break;  // collapsed; further evaluations cannot move

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < d; ++j) centroid[j] += pts[i][j] / static_cast<double>(d);

        auto blend = [&](double coeff) {
            std::vector<double> x(d);
            for (std::size_t j = 0; j < d; ++j) x[j] = centroid[j] + coeff * (centroid[j] - pts[worst][j]);
            return x;
        };

        const auto xr = blend(opt.reflection);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            if (res.evals >= budget) break;
            const auto xe = blend(opt.reflection * opt.expansion);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            if (res.evals >= budget) break;
            const bool outside = fr < fv[worst];
            const auto xc = blend(outside ? opt.reflection * opt.contraction : -opt.contraction);
            const double fc = eval(xc);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < d; ++j)
                        pts[i][j] = pts[best][j] + opt.shrink * (pts[i][j] - pts[best][j]);
                    if (res.evals >= budget) break;
                    fv[i] = eval(pts[i]);
                }
            }
        }
    }
    return res;
}

// QAOA baseline solve over 2p parameters (gammas first, betas second), from
// zero initialization. ngd_shift reuses the same shift-rule/NGD loop as the
// universal solver (the +-pi/2 shift is heuristic for the cost layer; kept
// verbatim as the shared machinery). simplex is the derivative-free path.
inline Solution solve_qaoa(const IsingInstance& inst, int p, QaoaOptimizer method, const OptimizerConfig& cfg) {
    cfg.validate();
    if (p <= 0) p = (inst.n + 1) / 2;
    const auto diag = hamiltonian_diagonal(inst);
    const std::size_t arity = 2 * static_cast<std::size_t>(p);

    auto split_eval = [&](const std::vector<double>& params, std::uint64_t eval_seed) {
        std::vector<double> gammas(params.begin(), params.begin() + p);
        std::vector<double> betas(params.begin() + p, params.end());
        return qaoa_energy(inst, diag, gammas, betas, cfg.mode, cfg.shots, eval_seed);
    };

    Solution sol;
    std::vector<double> params(arity, 0.0);
    if (method == QaoaOptimizer::NgdShift) {
        auto lossf = [&](const std::vector<double>& x, EvalTag tag) {
            return split_eval(x, derive_seed(cfg.seed, kSeedLoss, tag.iter, 2 * tag.component + tag.sign));
        };
        auto [final_params, trace] = detail::run_ngd(lossf, std::move(params), cfg, static_cast<int>(arity));
        sol.thetas = final_params;
        sol.trace = std::move(trace);
    } else {
        std::int64_t eval_idx = 0;
        auto wrapped = [&](const std::vector<double>& x) {
            return split_eval(x, derive_seed(cfg.seed, kSeedSimplex, static_cast<std::uint64_t>(eval_idx++)));
        };
        const auto nm = nelder_mead(wrapped, params);
        sol.thetas = nm.x;
        for (const auto& [at, value] : nm.improvements)
            sol.trace.rows.push_back(TraceRow{static_cast<int>(at), value, 0.0, 0.0});
        sol.trace.thetas_star = nm.x;
    }

    std::vector<double> gammas(sol.thetas.begin(), sol.thetas.begin() + p);
    std::vector<double> betas(sol.thetas.begin() + p, sol.thetas.end());
    const Circuit c = build_qaoa(inst, gammas, betas);
    StateVector sv(c.m);
    sv.apply(c);
    detail::read_out(sv, c.roles.working, cfg, sol);
    sol.energy = cut_cost(inst, sol.most_likely);
    return sol;
}

inline nlohmann::json solution_to_json(const Solution& sol) {
    nlohmann::json j;
    j["thetas"] = sol.thetas;
    j["bits"] = sol.most_likely.to_string();
    j["energy"] = sol.energy;
    j["counts"] = nlohmann::json::object();
    for (const auto& [key, v] : sol.readout) j["counts"][key] = v;
    j["zero_grad_events"] = sol.trace.zero_grad_events;
    return j;
}

}  // namespace uq
