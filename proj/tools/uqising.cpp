// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. stdout carries machine-readable JSON/CSV only;
// human-readable summaries go to stderr. Exit codes: 0 success, 1 I/O,
// 2 argument, 3 capacity.

#include <cstdint>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uq/uq.hpp"

namespace {

struct RangeSpec {
    double low = 0.1;
    double high = 1.0;
};

RangeSpec parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("range must be lo:hi, got '" + text + "'");
    RangeSpec r;
    try {
        std::size_t used = 0;
        r.low = std::stod(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("");
        const std::string hi = text.substr(colon + 1);
        r.high = std::stod(hi, &used);
        if (used != hi.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("range must be lo:hi with numeric bounds, got '" + text + "'");
    }
    if (!(r.low <= r.high)) throw std::invalid_argument("range requires lo <= hi, got '" + text + "'");
    return r;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument("bad numeric list entry '" + item + "'");
    }
    if (out.empty()) throw std::invalid_argument("empty numeric list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_double_list(text)) {
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) throw std::invalid_argument("expected integer list");
        out.push_back(i);
    }
    return out;
}

void emit_json(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw uq::IoError("cannot open " + out_path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw uq::IoError("failed writing " + out_path);
}

uq::LossMode mode_from(bool shots_given) { return shots_given ? uq::LossMode::Shots : uq::LossMode::Exact; }

uq::InitAngles init_from(const std::string& name) {
    if (name == "auto") return uq::InitAngles::Auto;
    if (name == "zeros") return uq::InitAngles::Zeros;
    if (name == "halfpi") return uq::InitAngles::HalfPi;
    throw std::invalid_argument("init must be auto, zeros, or halfpi");
}

uq::ZeroGradPolicy zero_grad_from(const std::string& name) {
    if (name == "kick") return uq::ZeroGradPolicy::Kick;
    if (name == "skip") return uq::ZeroGradPolicy::Skip;
    throw std::invalid_argument("zero-grad policy must be kick or skip");
}

// Shared solver knobs for solve/qaoa.
struct SolveFlags {
    std::string in_path;
    std::string out_path;
    std::string trace_path;
    std::int64_t shots = 0;  // 0 means exact
    std::int64_t readout_shots = 1024;
    int kmax = 100;
    std::uint64_t seed = 0;
    double lambda = uq::kDefaultLambda;
    std::string init = "auto";
    std::string zero_grad = "kick";
    bool entangle = false;
    bool exact_metrics = false;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f, bool with_entangle) {
    cmd->add_option("--in", f.in_path, "instance JSON file")->required();
    cmd->add_option("--out", f.out_path, "solution JSON path (default stdout)");
    cmd->add_option("--trace", f.trace_path, "write the optimization trace CSV here");
    auto* shots = cmd->add_option("--shots", f.shots, "sampled expectations with this many shots per evaluation");
    cmd->add_flag("--exact", "exact expectations (default)")->excludes(shots);
    cmd->add_option("--readout-shots", f.readout_shots, "final measurement budget (default 1024)");
    cmd->add_option("--kmax", f.kmax, "optimizer iterations (default 100)");
    cmd->add_option("--seed", f.seed, "run seed (default 0)");
    cmd->add_option("--lambda", f.lambda, "rescaling multiplier (default 2/pi)");
    cmd->add_option("--init", f.init, "initial angles: auto|zeros|halfpi (default auto)");
    cmd->add_option("--zero-grad", f.zero_grad, "zero-gradient policy: kick|skip (default kick)");
    if (with_entangle) cmd->add_flag("--entangle", f.entangle, "use the reduced entangled ansatz");
    cmd->add_flag("--exact-metrics", f.exact_metrics, "force brute-force metrics (exit 3 if the instance is too large)");
}

uq::OptimizerConfig config_from(const SolveFlags& f) {
    uq::OptimizerConfig cfg;
    cfg.k_max = f.kmax;
    cfg.mode = mode_from(f.shots > 0);
    if (f.shots > 0) cfg.shots = f.shots;
    cfg.readout_shots = f.readout_shots;
    cfg.seed = f.seed;
    cfg.init = init_from(f.init);
    cfg.entangle = f.entangle;
    cfg.lambda = f.lambda;
    cfg.zero_grad = zero_grad_from(f.zero_grad);
    return cfg;
}

// Attaches ratio/index to the solution JSON when the spectrum is enumerable.
void finish_solution(const uq::IsingInstance& inst, const uq::Solution& sol, const SolveFlags& f,
                     const char* label) {
    if (f.exact_metrics && inst.n > uq::kEnumGuard)
        throw uq::CapacityError("exact metrics need n <= " + std::to_string(uq::kEnumGuard));
    nlohmann::json j = uq::solution_to_json(sol);
    std::ostringstream human;
    human << label << " n=" << inst.n << ": bits=" << sol.most_likely.to_string() << " energy=" << sol.energy;
    if (inst.n <= uq::kEnumGuard) {
        const auto spectrum = uq::brute_force(inst);
        const auto ar = uq::approximation_ratio(spectrum, sol.energy);
        j["ratio"] = ar.value;
        j["ratio_clamped"] = ar.clamped;
        j["index"] = uq::approximation_index(inst, spectrum, sol.most_likely, inst.is_maxcut());
        human << " r=" << ar.value << " i=" << j["index"];
    }
    if (!f.trace_path.empty()) uq::write_trace_csv(f.trace_path, sol.trace);
    emit_json(j, f.out_path);
    std::cerr << human.str() << '\n';
}

int cmd_gen(int n, const RangeSpec& range, bool signed_weights, bool maxcut, std::uint64_t seed,
            const std::string& out_path) {
    const auto inst = uq::random_instance(n, range.low, range.high, signed_weights, maxcut, seed);
    emit_json(uq::instance_to_json(inst), out_path);
    std::cerr << "generated n=" << n << (maxcut ? " maxcut" : " ising") << " instance, " << inst.edge_count()
              << " weights\n";
    return 0;
}

int cmd_oracle(const std::string& in_path, bool include_diagonal, const std::string& out_path) {
    const auto inst = uq::read_instance(in_path);
    const auto spectrum = uq::brute_force(inst, include_diagonal);
    nlohmann::json j;
    j["c_min"] = spectrum.c_min;
    j["c_max"] = spectrum.c_max;
    std::vector<std::string> argmins;
    for (const auto& a : spectrum.argmins) argmins.push_back(a.to_string());
    j["argmins"] = argmins;
    if (spectrum.diagonal) j["diagonal"] = *spectrum.diagonal;
    emit_json(j, out_path);
    std::cerr << "spectrum: c_min=" << spectrum.c_min << " c_max=" << spectrum.c_max << " ("
              << spectrum.argmins.size() << " ground states)\n";
    return 0;
}

int cmd_solve(const SolveFlags& f, const std::string& method, int p, const std::string& optimizer) {
    const auto inst = uq::read_instance(f.in_path);
    if (f.exact_metrics && inst.n > uq::kEnumGuard)
        throw uq::CapacityError("exact metrics need n <= " + std::to_string(uq::kEnumGuard));
    const auto cfg = config_from(f);
    if (method == "uq") {
        finish_solution(inst, uq::solve_uq(inst, cfg), f, "solved");
        return 0;
    }
    if (method == "qaoa") {
        const auto opt = optimizer == "simplex" ? uq::QaoaOptimizer::Simplex : uq::QaoaOptimizer::NgdShift;
        if (!optimizer.empty() && optimizer != "simplex" && optimizer != "ngd")
            throw std::invalid_argument("optimizer must be ngd or simplex");
        finish_solution(inst, uq::solve_qaoa(inst, p, opt, cfg), f, "qaoa");
        return 0;
    }
    throw std::invalid_argument("method must be uq or qaoa");
}

int cmd_resources(const std::string& in_path, const std::string& method, int p, const std::string& out_path) {
    const auto inst = uq::read_instance(in_path);
    uq::Method m;
    if (method == "uqising") m = uq::Method::UqIsing;
    else if (method == "qaoa") m = uq::Method::Qaoa;
    else throw std::invalid_argument("method must be uqising or qaoa");
    const auto report = uq::count_resources(inst, m, p);
    emit_json(uq::resource_report_to_json(report), out_path);
    std::cerr << report.method << ": qubits=" << report.qubits << " cnot=" << report.cnot << " rotations="
              << report.rotations << " hadamard=" << report.hadamard << '\n';
    return 0;
}

int cmd_export(const std::string& in_path, const std::string& which, const std::string& thetas_text,
               const std::string& gammas_text, const std::string& betas_text, int p, double lambda, bool entangle,
               bool cancel, const std::string& out_path) {
    const auto inst = uq::read_instance(in_path);
    uq::Circuit c;
    if (which == "block" || which == "controlled" || which == "workflow") {
        const auto s = uq::rescale_k(inst, lambda);
        if (which == "block") {
            c = uq::build_block_encoding(s);
        } else if (which == "controlled") {
            c = uq::build_controlled_block_encoding(s);
        } else {
            const std::size_t arity = static_cast<std::size_t>(entangle ? inst.n - 1 : inst.n);
            std::vector<double> thetas(arity, 0.0);
            if (!thetas_text.empty()) thetas = parse_double_list(thetas_text);
            if (thetas.size() != arity)
                throw std::invalid_argument("workflow needs " + std::to_string(arity) + " angles");
            c = uq::build_workflow(s, thetas, entangle);
        }
    } else if (which == "qaoa") {
        if (p <= 0) p = (inst.n + 1) / 2;
        std::vector<double> gammas(p, 0.0), betas(p, 0.0);
        if (!gammas_text.empty()) gammas = parse_double_list(gammas_text);
        if (!betas_text.empty()) betas = parse_double_list(betas_text);
        if (static_cast<int>(gammas.size()) != p || static_cast<int>(betas.size()) != p)
            throw std::invalid_argument("qaoa export needs p gammas and p betas");
        c = uq::build_qaoa(inst, gammas, betas);
    } else if (which == "entangle") {
        c = uq::build_entanglement(inst.n);
    } else {
        throw std::invalid_argument("--which must be block, controlled, workflow, qaoa, or entangle");
    }
    if (cancel) c = uq::cancel_adjacent_cnots(c);
    emit_json(uq::circuit_to_json(c), out_path);
    const auto census = uq::gate_census(c);
    std::cerr << which << " circuit: " << c.m << " qubits, " << c.ops.size() << " ops (cnot=" << census.cnot
              << " rotations=" << census.rotations << " hadamard=" << census.hadamard << ")\n";
    return 0;
}

int cmd_bench(uq::BenchSpec spec, bool allow_large, bool write_traces, const std::string& out_dir) {
    if (!allow_large)
        for (int n : spec.sizes)
            if (n > 8)
                throw std::invalid_argument("size " + std::to_string(n) +
                                            " above the desk-scale cap of 8; pass --allow-large to override");
    auto records = uq::run_campaign(spec);
    uq::persist_campaign(spec, records, out_dir, write_traces);
    const auto summary = uq::summarize(records);

    nlohmann::json j;
    j["out_dir"] = out_dir;
    j["records"] = records.size();
    j["summary"] = nlohmann::json::array();
    for (const auto& s : summary) {
        j["summary"].push_back({{"n", s.n},
                                {"method", uq::bench_method_name(s.method)},
                                {"count", s.count},
                                {"mean_r", s.mean_r},
                                {"stddev_r", s.stddev_r},
                                {"index_fraction", s.index_fraction},
                                {"mean_iterations", s.mean_iterations},
                                {"mean_wall_ms", s.mean_wall_ms}});
        std::cerr << "n=" << s.n << " " << uq::bench_method_name(s.method) << ": mean r=" << s.mean_r
                  << " (sd " << s.stddev_r << "), index rate=" << s.index_fraction << ", mean iters="
                  << s.mean_iterations << '\n';
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_ksweep(int n, int instances, bool signed_weights, const std::string& lambdas_text, std::uint64_t seed,
               const std::string& out_path, const std::string& curve_path) {
    std::vector<double> lambdas = uq::default_lambda_grid();
    if (!lambdas_text.empty()) lambdas = parse_double_list(lambdas_text);
    const auto table = uq::lambda_sweep(n, instances, lambdas, signed_weights, seed);
    if (out_path.empty()) {
        uq::write_sweep_csv(std::cout, table);
    } else {
        uq::write_sweep_csv(out_path, table);
    }
    if (!curve_path.empty()) uq::write_sweep_curve_csv(curve_path, table);
    double best = 0.0;
    for (const auto& row : table.rows) best = std::max(best, row.agreement);
    std::cerr << "sweep over " << lambdas.size() << " lambda values, " << instances << " instances (n=" << n
              << "), best agreement " << best << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"universal-cut: block-encoding solver for weighted MaxCut and Ising ground states"};
    app.set_version_flag("--version", uq::version_string());
    app.require_subcommand(1);

    // gen
    int gen_n = 3;
    std::string gen_range = "0.1:1.0";
    bool gen_signed = false, gen_maxcut = false;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a random fully-connected instance");
    gen->add_option("--n", gen_n, "node count")->required();
    gen->add_option("--range", gen_range, "weight magnitude range lo:hi (default 0.1:1.0)");
    gen->add_flag("--signed", gen_signed, "draw signs uniformly");
    gen->add_flag("--maxcut", gen_maxcut, "quadratic terms only (no unary weights)");
    gen->add_option("--seed", gen_seed, "generator seed (default 0)");
    gen->add_option("--out", gen_out, "output path (default stdout)");

    // oracle
    std::string oracle_in, oracle_out;
    bool oracle_diag = false;
    auto* oracle = app.add_subcommand("oracle", "brute-force spectrum of an instance");
    oracle->add_option("--in", oracle_in, "instance JSON file")->required();
    oracle->add_flag("--diagonal", oracle_diag, "include the full diagonal");
    oracle->add_option("--out", oracle_out, "output path (default stdout)");

    // solve
    SolveFlags solve_flags;
    std::string solve_method = "uq";
    std::string solve_optimizer;
    int solve_p = 0;
    auto* solve = app.add_subcommand("solve", "optimize an instance with the universal ansatz (or qaoa)");
    add_solve_flags(solve, solve_flags, true);
    solve->add_option("--method", solve_method, "uq|qaoa (default uq)");
    solve->add_option("--p", solve_p, "qaoa layers (default ceil(n/2))");
    solve->add_option("--optimizer", solve_optimizer, "qaoa optimizer: ngd|simplex (default ngd)");

    // qaoa
    SolveFlags qaoa_flags;
    std::string qaoa_optimizer = "ngd";
    int qaoa_p = 0;
    auto* qaoa = app.add_subcommand("qaoa", "optimize an instance with the qaoa baseline");
    add_solve_flags(qaoa, qaoa_flags, false);
    qaoa->add_option("--p", qaoa_p, "layers (default ceil(n/2))");
    qaoa->add_option("--optimizer", qaoa_optimizer, "ngd|simplex (default ngd)");

    // resources
    std::string res_in, res_method = "uqising", res_out;
    int res_p = 1;
    auto* resources = app.add_subcommand("resources", "closed-form resource counts for an instance");
    resources->add_option("--in", res_in, "instance JSON file")->required();
    resources->add_option("--method", res_method, "uqising|qaoa (default uqising)");
    resources->add_option("--p", res_p, "qaoa layers (default 1)");
    resources->add_option("--out", res_out, "output path (default stdout)");

    // export-circuit
    std::string exp_in, exp_which, exp_thetas, exp_gammas, exp_betas, exp_out;
    int exp_p = 0;
    double exp_lambda = uq::kDefaultLambda;
    bool exp_entangle = false, exp_cancel = false;
    auto* exportc = app.add_subcommand("export-circuit", "emit a circuit as JSON");
    exportc->add_option("--in", exp_in, "instance JSON file")->required();
    exportc->add_option("--which", exp_which, "block|controlled|workflow|qaoa|entangle")->required();
    exportc->add_option("--thetas", exp_thetas, "comma-separated ansatz angles (workflow)");
    exportc->add_option("--gammas", exp_gammas, "comma-separated gamma angles (qaoa)");
    exportc->add_option("--betas", exp_betas, "comma-separated beta angles (qaoa)");
    exportc->add_option("--p", exp_p, "qaoa layers (default ceil(n/2))");
    exportc->add_option("--lambda", exp_lambda, "rescaling multiplier (default 2/pi)");
    exportc->add_flag("--entangle", exp_entangle, "entangled workflow variant");
    exportc->add_flag("--cancel", exp_cancel, "cancel adjacent identical CNOT pairs");
    exportc->add_option("--out", exp_out, "output path (default stdout)");

    // bench
    std::string bench_sizes = "3,5,8", bench_range = "0.1:1.0", bench_methods = "uqmaxcut,qaoa_ngd", bench_out;
    int bench_instances = 20, bench_kmax = 100, bench_p = 0, bench_jobs = 1;
    std::int64_t bench_shots = 0, bench_readout = 1024;
    std::uint64_t bench_seed = 0;
    bool bench_signed = false, bench_ising = false, bench_allow_large = false, bench_traces = false,
         bench_entangle = false;
    std::string bench_zero_grad = "kick";
    auto* bench = app.add_subcommand("bench", "run a seeded campaign and persist CSV results");
    bench->add_option("--sizes", bench_sizes, "comma-separated node counts (default 3,5,8)");
    bench->add_option("--instances", bench_instances, "instances per size (default 20)");
    bench->add_option("--range", bench_range, "weight magnitude range lo:hi (default 0.1:1.0)");
    bench->add_flag("--signed", bench_signed, "signed weights");
    bench->add_flag("--ising", bench_ising, "include unary weights (full Ising ensemble)");
    bench->add_option("--methods", bench_methods, "comma list of uqmaxcut,uqising,qaoa_ngd,qaoa_simplex");
    bench->add_option("--kmax", bench_kmax, "optimizer iterations (default 100)");
    auto* bench_shots_opt = bench->add_option("--shots", bench_shots, "sampled expectations with this many shots");
    bench->add_flag("--exact", "exact expectations (default)")->excludes(bench_shots_opt);
    bench->add_option("--readout-shots", bench_readout, "final measurement budget (default 1024)");
    bench->add_option("--seed", bench_seed, "master seed (default 0)");
    bench->add_option("--p", bench_p, "qaoa layers (default ceil(n/2))");
    bench->add_option("--jobs", bench_jobs, "worker threads (default 1)");
    bench->add_option("--zero-grad", bench_zero_grad, "zero-gradient policy: kick|skip (default kick)");
    bench->add_flag("--entangle", bench_entangle, "entangled ansatz for the universal methods");
    bench->add_flag("--traces", bench_traces, "persist per-run optimization traces");
    bench->add_flag("--allow-large", bench_allow_large, "permit sizes above the desk-scale cap of 8");
    bench->add_option("--out", bench_out, "output directory")->required();

    // ksweep
    int ks_n = 10, ks_instances = 10;
    bool ks_signed = false;
    std::string ks_lambdas, ks_out, ks_curve;
    std::uint64_t ks_seed = 0;
    auto* ksweep = app.add_subcommand("ksweep", "order-agreement sweep over the rescaling multiplier");
    ksweep->add_option("--n", ks_n, "node count (default 10)");
    ksweep->add_option("--instances", ks_instances, "ensemble size (default 10)");
    ksweep->add_flag("--signed", ks_signed, "signed weights");
    ksweep->add_option("--lambdas", ks_lambdas, "comma-separated values (default 0.1..1.0 plus 2/pi)");
    ksweep->add_option("--seed", ks_seed, "ensemble seed (default 0)");
    ksweep->add_option("--out", ks_out, "sweep CSV path (default stdout)");
    ksweep->add_option("--curve", ks_curve, "also write the rank-wise mean transformed-cost CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*gen) return cmd_gen(gen_n, parse_range(gen_range), gen_signed, gen_maxcut, gen_seed, gen_out);
        if (*oracle) return cmd_oracle(oracle_in, oracle_diag, oracle_out);
        if (*solve) return cmd_solve(solve_flags, solve_method, solve_p, solve_optimizer);
        if (*qaoa) {
            if (qaoa_optimizer != "ngd" && qaoa_optimizer != "simplex")
                throw std::invalid_argument("optimizer must be ngd or simplex");
            const auto inst = uq::read_instance(qaoa_flags.in_path);
            if (qaoa_flags.exact_metrics && inst.n > uq::kEnumGuard)
                throw uq::CapacityError("exact metrics need n <= " + std::to_string(uq::kEnumGuard));
            const auto cfg = config_from(qaoa_flags);
            const auto opt = qaoa_optimizer == "simplex" ? uq::QaoaOptimizer::Simplex : uq::QaoaOptimizer::NgdShift;
            finish_solution(inst, uq::solve_qaoa(inst, qaoa_p, opt, cfg), qaoa_flags, "qaoa");
            return 0;
        }
        if (*resources) return cmd_resources(res_in, res_method, res_p, res_out);
        if (*exportc)
            return cmd_export(exp_in, exp_which, exp_thetas, exp_gammas, exp_betas, exp_p, exp_lambda, exp_entangle,
                              exp_cancel, exp_out);
        if (*bench) {
            uq::BenchSpec spec;
            spec.sizes = parse_int_list(bench_sizes);
            spec.instances_per_size = bench_instances;
            const auto range = parse_range(bench_range);
            spec.low = range.low;
            spec.high = range.high;
            spec.signed_weights = bench_signed;
            spec.maxcut_only = !bench_ising;
            spec.methods.clear();
            std::stringstream ss(bench_methods);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) spec.methods.push_back(uq::bench_method_from_name(item));
            spec.master_seed = bench_seed;
            spec.opt.k_max = bench_kmax;
            spec.opt.mode = mode_from(bench_shots > 0);
            if (bench_shots > 0) spec.opt.shots = bench_shots;
            spec.opt.readout_shots = bench_readout;
            spec.opt.entangle = bench_entangle;
            spec.opt.zero_grad = zero_grad_from(bench_zero_grad);
            spec.qaoa_p = bench_p;
            spec.jobs = bench_jobs;
            return cmd_bench(spec, bench_allow_large, bench_traces, bench_out);
        }
        if (*ksweep) return cmd_ksweep(ks_n, ks_instances, ks_signed, ks_lambdas, ks_seed, ks_out, ks_curve);
        std::cerr << app.help() << '\n';
        return 2;
    } catch (const uq::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return 3;
    } catch (const uq::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 1;
    } catch (const uq::DegenerateInstance& e) {
        std::cerr << "degenerate instance: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argument error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
