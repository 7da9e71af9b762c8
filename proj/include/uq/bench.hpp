// SPDX-License-Identifier: Apache-2.0
//
// Seeded experiment campaigns: a fixed ensemble of random instances, each
// solved by every requested method, with approximation metrics persisted as
// CSV plus a JSON manifest. All randomness flows through derive_seed so the
// outputs are a pure function of the campaign description, independent of
// worker scheduling.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "uq/instance.hpp"
#include "uq/optimize.hpp"
#include "uq/version.hpp"

namespace uq {

enum class BenchMethod { UqMaxcut, UqIsing, QaoaNgd, QaoaSimplex };

inline const char* bench_method_name(BenchMethod m) {
    switch (m) {
        case BenchMethod::UqMaxcut: return "uqmaxcut";
        case BenchMethod::UqIsing: return "uqising";
        case BenchMethod::QaoaNgd: return "qaoa_ngd";
        case BenchMethod::QaoaSimplex: return "qaoa_simplex";
    }
    throw std::invalid_argument("unknown method");
}

inline BenchMethod bench_method_from_name(const std::string& name) {
    if (name == "uqmaxcut") return BenchMethod::UqMaxcut;
    if (name == "uqising") return BenchMethod::UqIsing;
    if (name == "qaoa_ngd") return BenchMethod::QaoaNgd;
    if (name == "qaoa_simplex") return BenchMethod::QaoaSimplex;
    throw std::invalid_argument("unknown method name: " + name);
}

// Seed roles. Instance generation uses role 0 so the ensemble never shifts
// when the method list changes; each method gets its own stream.
inline constexpr std::uint64_t kRoleInstance = 0;
inline std::uint64_t bench_method_role(BenchMethod m) { return static_cast<std::uint64_t>(m) + 1; }

struct BenchSpec {
    std::vector<int> sizes{3, 5, 8};
    int instances_per_size = 20;
    double low = 0.1;
    double high = 1.0;
    bool signed_weights = false;
    bool maxcut_only = true;
    std::vector<BenchMethod> methods{BenchMethod::UqMaxcut, BenchMethod::QaoaNgd};
    std::uint64_t master_seed = 0;
    OptimizerConfig opt;   // shared per-method solver knobs; seed is overwritten per run
    int qaoa_p = 0;        // 0 means ceil(n / 2)
    int jobs = 1;

    void validate() const {
        if (sizes.empty()) throw std::invalid_argument("campaign needs at least one size");
        for (int n : sizes)
            if (n < 1 || n > kEnumGuard) throw CapacityError("campaign sizes must lie in [1, " + std::to_string(kEnumGuard) + "]");
        if (instances_per_size < 1) throw std::invalid_argument("instances_per_size must be at least 1");
        if (methods.empty()) throw std::invalid_argument("campaign needs at least one method");
        if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
        opt.validate();
    }
};

struct BenchRecord {
    int n = 0;
    int index = 0;
    std::uint64_t instance_seed = 0;
    BenchMethod method = BenchMethod::UqMaxcut;
    double r = 0.0;
    bool r_clamped = false;
    int i = 0;                 // 1 when the exact optimum was proposed
    int iterations = 0;        // iteration index of the first best loss
    double energy = 0.0;
    double c_min = 0.0;
    double wall_ms = 0.0;
    std::string trace_ref;     // relative path once traces are persisted
    TrainTrace trace;
};

namespace detail {

struct BenchTask {
    int n = 0;
    int index = 0;
    std::size_t instance_slot = 0;
    BenchMethod method = BenchMethod::UqMaxcut;
};

struct BenchInstance {
    std::uint64_t seed = 0;
    IsingInstance inst;
    SpectrumReport spectrum;
};

inline BenchRecord run_bench_task(const BenchSpec& spec, const BenchTask& t, const BenchInstance& bi) {
    OptimizerConfig cfg = spec.opt;
    cfg.seed = derive_seed(spec.master_seed, static_cast<std::uint64_t>(t.n), static_cast<std::uint64_t>(t.index),
                           bench_method_role(t.method));
    Solution sol;
    const auto t0 = std::chrono::steady_clock::now();
    switch (t.method) {
        case BenchMethod::UqMaxcut:
            cfg.init = InitAngles::Zeros;
            sol = solve_uq(bi.inst, cfg);
            break;
        case BenchMethod::UqIsing:
            cfg.init = InitAngles::HalfPi;
            sol = solve_uq(bi.inst, cfg);
            break;
        case BenchMethod::QaoaNgd:
            sol = solve_qaoa(bi.inst, spec.qaoa_p, QaoaOptimizer::NgdShift, cfg);
            break;
        case BenchMethod::QaoaSimplex:
            sol = solve_qaoa(bi.inst, spec.qaoa_p, QaoaOptimizer::Simplex, cfg);
            break;
    }
    const auto t1 = std::chrono::steady_clock::now();

    BenchRecord rec;
    rec.n = t.n;
    rec.index = t.index;
    rec.instance_seed = bi.seed;
    rec.method = t.method;
    const auto ar = approximation_ratio(bi.spectrum, sol.energy);
    rec.r = ar.value;
    rec.r_clamped = ar.clamped;
    rec.i = approximation_index(bi.inst, bi.spectrum, sol.most_likely, bi.inst.is_maxcut());
    rec.iterations = sol.trace.rows.empty() ? 0 : iterations_to_best(sol.trace);
    rec.energy = sol.energy;
    rec.c_min = bi.spectrum.c_min;
    rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    rec.trace = std::move(sol.trace);
    return rec;
}

}  // namespace detail

// Runs the whole campaign. Every method sees the identical instance set
// (instance seeds do not depend on the method list), and records come back
// sorted by (n, index, method) regardless of the worker count.
inline std::vector<BenchRecord> run_campaign(const BenchSpec& spec) {
    spec.validate();

    std::vector<detail::BenchInstance> instances;
    std::vector<detail::BenchTask> tasks;
    for (int n : spec.sizes)
        for (int index = 0; index < spec.instances_per_size; ++index) {
            detail::BenchInstance bi;
            bi.seed = derive_seed(spec.master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index),
                                  kRoleInstance);
            bi.inst = random_instance(n, spec.low, spec.high, spec.signed_weights, spec.maxcut_only, bi.seed);
            bi.spectrum = brute_force(bi.inst);
            const std::size_t slot = instances.size();
            instances.push_back(std::move(bi));
            for (BenchMethod m : spec.methods) tasks.push_back(detail::BenchTask{n, index, slot, m});
        }

    std::vector<BenchRecord> records(tasks.size());
    if (spec.jobs == 1 || tasks.size() <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            records[i] = detail::run_bench_task(spec, tasks[i], instances[tasks[i].instance_slot]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                records[i] = detail::run_bench_task(spec, tasks[i], instances[tasks[i].instance_slot]);
            }
        };
        const int pool = std::min<int>(spec.jobs, static_cast<int>(tasks.size()));
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (int i = 0; i < pool; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    // Task construction already iterates (n, index, method) in order, so the
    // slot layout is the merge order.
    return records;
}

struct SummaryRow {
    int n = 0;
    BenchMethod method = BenchMethod::UqMaxcut;
    int count = 0;
    double mean_r = 0.0;
    double stddev_r = 0.0;
    double index_fraction = 0.0;
    double mean_iterations = 0.0;
    double mean_wall_ms = 0.0;
};

// Per-(n, method) aggregates. Values are sorted before accumulation so the
// result is invariant to record order; stddev is the population form, which
// is exactly zero for a single record.
inline std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records) {
    if (records.empty()) throw std::invalid_argument("cannot summarize an empty record set");
    std::map<std::pair<int, int>, std::vector<const BenchRecord*>> groups;
    for (const auto& r : records) groups[{r.n, static_cast<int>(r.method)}].push_back(&r);

    std::vector<SummaryRow> out;
    for (const auto& [key, group] : groups) {
        SummaryRow row;
        row.n = key.first;
        row.method = static_cast<BenchMethod>(key.second);
        row.count = static_cast<int>(group.size());
        auto sorted_mean = [&](auto&& proj) {
            std::vector<double> v;
            v.reserve(group.size());
            for (const auto* r : group) v.push_back(proj(*r));
            std::sort(v.begin(), v.end());
            double s = 0.0;
            for (double x : v) s += x;
            return std::pair<double, std::vector<double>>{s / static_cast<double>(v.size()), std::move(v)};
        };
        auto [mean_r, rs] = sorted_mean([](const BenchRecord& r) { return r.r; });
        row.mean_r = mean_r;
        double var = 0.0;
        for (double x : rs) var += (x - mean_r) * (x - mean_r);
        row.stddev_r = std::sqrt(var / static_cast<double>(rs.size()));
        std::int64_t hits = 0;
        for (const auto* r : group) hits += r->i;
        row.index_fraction = static_cast<double>(hits) / static_cast<double>(group.size());
        row.mean_iterations = sorted_mean([](const BenchRecord& r) { return static_cast<double>(r.iterations); }).first;
        row.mean_wall_ms = sorted_mean([](const BenchRecord& r) { return r.wall_ms; }).first;
        out.push_back(row);
    }
    return out;
}

inline nlohmann::json bench_spec_to_json(const BenchSpec& spec) {
    nlohmann::json j;
    j["sizes"] = spec.sizes;
    j["instances_per_size"] = spec.instances_per_size;
    j["low"] = spec.low;
    j["high"] = spec.high;
    j["signed_weights"] = spec.signed_weights;
    j["maxcut_only"] = spec.maxcut_only;
    std::vector<std::string> names;
    for (BenchMethod m : spec.methods) names.emplace_back(bench_method_name(m));
    j["methods"] = names;
    j["master_seed"] = spec.master_seed;
    j["qaoa_p"] = spec.qaoa_p;
    j["jobs"] = spec.jobs;
    j["optimizer"] = {
        {"k_max", spec.opt.k_max},
        {"mode", spec.opt.mode == LossMode::Exact ? "exact" : "shots"},
        {"shots", spec.opt.shots},
        {"readout_shots", spec.opt.readout_shots},
        {"entangle", spec.opt.entangle},
        {"lambda", spec.opt.lambda},
        {"zero_grad", spec.opt.zero_grad == ZeroGradPolicy::Kick ? "kick" : "skip"},
    };
    return j;
}

inline void write_results_csv(const std::string& path, const std::vector<BenchRecord>& records) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "n,seed,method,r,i,iterations,wall_ms\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%d,%llu,%s,%.17g,%d,%d,%.17g\n", r.n,
                      static_cast<unsigned long long>(r.instance_seed), bench_method_name(r.method), r.r, r.i,
                      r.iterations, r.wall_ms);
        out << buf;
    }
    if (!out) throw IoError("failed writing " + path);
}

inline void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "n,method,count,mean_r,stddev_r,index_fraction,mean_iterations,mean_wall_ms\n";
    char buf[256];
    for (const auto& s : rows) {
        std::snprintf(buf, sizeof buf, "%d,%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.n, bench_method_name(s.method),
                      s.count, s.mean_r, s.stddev_r, s.index_fraction, s.mean_iterations, s.mean_wall_ms);
        out << buf;
    }
    if (!out) throw IoError("failed writing " + path);
}

// Persists results.csv, summary.csv, manifest.json, and per-run traces under
// out_dir. Files land one at a time, results first, so a late failure leaves
// the earlier artifacts intact.
inline void persist_campaign(const BenchSpec& spec, std::vector<BenchRecord>& records, const std::string& out_dir,
                             bool write_traces = false) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

    if (write_traces) {
        const auto trace_dir = std::filesystem::path(out_dir) / "traces";
        std::filesystem::create_directories(trace_dir, ec);
        if (ec) throw IoError("cannot create " + trace_dir.string() + ": " + ec.message());
        for (auto& r : records) {
            std::ostringstream name;
            name << "n" << r.n << "_i" << r.index << "_" << bench_method_name(r.method) << ".csv";
            r.trace_ref = (std::filesystem::path("traces") / name.str()).string();
            write_trace_csv((std::filesystem::path(out_dir) / r.trace_ref).string(), r.trace);
        }
    }

    write_results_csv((std::filesystem::path(out_dir) / "results.csv").string(), records);
    write_summary_csv((std::filesystem::path(out_dir) / "summary.csv").string(), summarize(records));

    nlohmann::json manifest;
    manifest["spec"] = bench_spec_to_json(spec);
    manifest["records"] = records.size();
    manifest["version"] = version_string();
    std::ofstream mf(std::filesystem::path(out_dir) / "manifest.json");
    if (!mf) throw IoError("cannot open manifest.json for writing");
    mf << manifest.dump(2) << '\n';
    if (!mf) throw IoError("failed writing manifest.json");
}

// ---- lambda sweep ----

struct SweepRow {
    double lambda = 0.0;
    std::uint64_t instance_seed = 0;
    double agreement = 0.0;
};

struct SweepCurveRow {
    double lambda = 0.0;
    std::uint64_t rank = 0;
    double mean_transformed_cost = 0.0;  // mean over instances of sin(C/K) at this true-order rank
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<SweepCurveRow> curve;
};

// The scan grid 0.1 .. 1.0 in steps of 0.1, with the reference value 2/pi
// spliced in ascending order.
inline std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(0.1 * i);
    grid.push_back(kDefaultLambda);
    std::sort(grid.begin(), grid.end());
    return grid;
}

// For each instance of a fully-connected weighted ensemble and each lambda:
// the order-agreement fraction, plus the rank-wise mean of the transformed
// diagonal (entries sorted by true cost) across the ensemble.
inline SweepTable lambda_sweep(int n, int instances, const std::vector<double>& lambdas, bool signed_weights,
                               std::uint64_t seed) {
    if (n < 1 || n > kEnumGuard) throw CapacityError("sweep size must lie in [1, " + std::to_string(kEnumGuard) + "]");
    if (instances < 1) throw std::invalid_argument("sweep needs at least one instance");
    for (double l : lambdas)
        if (!(l > 0.0)) throw std::invalid_argument("lambda values must be positive");

    struct Prepared {
        std::uint64_t seed;
        IsingInstance inst;
        std::vector<double> sorted_diag;  // true costs, ascending
    };
    std::vector<Prepared> prepared;
    for (int index = 0; index < instances; ++index) {
        Prepared p;
        p.seed = derive_seed(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index), kRoleInstance);
        p.inst = random_instance(n, 0.1, 1.0, signed_weights, true, p.seed);
        p.sorted_diag = hamiltonian_diagonal(p.inst);
        std::sort(p.sorted_diag.begin(), p.sorted_diag.end());
        prepared.push_back(std::move(p));
    }

    SweepTable table;
    const std::uint64_t dim = std::uint64_t{1} << n;
    for (double l : lambdas) {
        std::vector<double> mean(dim, 0.0);
        for (const auto& p : prepared) {
            table.rows.push_back(SweepRow{l, p.seed, order_agreement(p.inst, l)});
            const double k = rescale_k(p.inst, l).k;
            for (std::uint64_t q = 0; q < dim; ++q) mean[q] += std::sin(p.sorted_diag[q] / k);
        }
        for (std::uint64_t q = 0; q < dim; ++q)
            table.curve.push_back(SweepCurveRow{l, q, mean[q] / static_cast<double>(instances)});
    }
    return table;
}

inline void write_sweep_csv(std::ostream& out, const SweepTable& table) {
    out << "lambda,instance_seed,agreement\n";
    char buf[160];
    for (const auto& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%llu,%.17g\n", r.lambda, static_cast<unsigned long long>(r.instance_seed),
                      r.agreement);
        out << buf;
    }
}

inline void write_sweep_csv(const std::string& path, const SweepTable& table) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_sweep_csv(out, table);
    if (!out) throw IoError("failed writing " + path);
}

inline void write_sweep_curve_csv(std::ostream& out, const SweepTable& table) {
    out << "lambda,rank,mean_transformed_cost\n";
    char buf[160];
    for (const auto& r : table.curve) {
        std::snprintf(buf, sizeof buf, "%.17g,%llu,%.17g\n", r.lambda, static_cast<unsigned long long>(r.rank),
                      r.mean_transformed_cost);
        out << buf;
    }
}

inline void write_sweep_curve_csv(const std::string& path, const SweepTable& table) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_sweep_curve_csv(out, table);
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace uq
