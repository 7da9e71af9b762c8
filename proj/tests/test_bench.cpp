// SPDX-License-Identifier: Apache-2.0
//
// Campaign plumbing: instance sharing across methods, worker-count
// independence, aggregation, and artifact layout.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "common.hpp"
#include "uq/bench.hpp"

using namespace uq;
using Catch::Approx;

namespace {

BenchSpec tiny_spec() {
    BenchSpec spec;
    spec.sizes = {2, 3};
    spec.instances_per_size = 2;
    spec.methods = {BenchMethod::UqMaxcut, BenchMethod::QaoaNgd};
    spec.opt.k_max = 8;
    return spec;
}

bool same_outcome(const BenchRecord& a, const BenchRecord& b) {
    return a.n == b.n && a.index == b.index && a.instance_seed == b.instance_seed && a.method == b.method &&
           a.r == b.r && a.i == b.i && a.iterations == b.iterations && a.energy == b.energy && a.c_min == b.c_min &&
           a.trace.rows.size() == b.trace.rows.size();
}

std::string strip_last_column(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    for (std::string line; std::getline(in, line);) out << line.substr(0, line.rfind(',')) << '\n';
    return out.str();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("campaigns produce one ordered record per (size, instance, method)") {
    const auto spec = tiny_spec();
    const auto records = run_campaign(spec);
    REQUIRE(records.size() == 8);
    std::size_t at = 0;
    for (int n : {2, 3})
        for (int index = 0; index < 2; ++index)
            for (BenchMethod m : spec.methods) {
                CHECK(records[at].n == n);
                CHECK(records[at].index == index);
                CHECK(records[at].method == m);
                ++at;
            }
    for (const auto& r : records) {
        CHECK(r.r >= 0.0);
        CHECK(r.r <= 1.0);
        CHECK((r.i == 0 || r.i == 1));
        CHECK(r.energy >= r.c_min - 1e-9);
        CHECK(r.wall_ms >= 0.0);
        CHECK(r.instance_seed == derive_seed(0, static_cast<std::uint64_t>(r.n), static_cast<std::uint64_t>(r.index),
                                             kRoleInstance));
    }
}

TEST_CASE("campaigns are deterministic and worker-count independent") {
    auto spec = tiny_spec();
    const auto once = run_campaign(spec);
    const auto again = run_campaign(spec);
    REQUIRE(once.size() == again.size());
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(same_outcome(once[i], again[i]));

    spec.jobs = 3;
    const auto parallel = run_campaign(spec);
    REQUIRE(parallel.size() == once.size());
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(same_outcome(once[i], parallel[i]));
}

TEST_CASE("every method sees the identical instance set") {
    auto lone = tiny_spec();
    lone.methods = {BenchMethod::UqMaxcut};
    auto paired = tiny_spec();
    paired.methods = {BenchMethod::UqMaxcut, BenchMethod::QaoaSimplex};

    const auto a = run_campaign(lone);
    auto b = run_campaign(paired);
    b.erase(std::remove_if(b.begin(), b.end(), [](const BenchRecord& r) { return r.method != BenchMethod::UqMaxcut; }),
            b.end());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_outcome(a[i], b[i]));
}

TEST_CASE("all four methods run end to end") {
    BenchSpec spec;
    spec.sizes = {3};
    spec.instances_per_size = 1;
    spec.maxcut_only = false;
    spec.methods = {BenchMethod::UqMaxcut, BenchMethod::UqIsing, BenchMethod::QaoaNgd, BenchMethod::QaoaSimplex};
    spec.opt.k_max = 6;
    const auto records = run_campaign(spec);
    REQUIRE(records.size() == 4);
    for (const auto& r : records) {
        CHECK(r.r >= 0.0);
        CHECK(std::isfinite(r.energy));
    }
}

TEST_CASE("summaries aggregate per (size, method) and ignore record order") {
    const auto records = run_campaign(tiny_spec());
    const auto rows = summarize(records);
    REQUIRE(rows.size() == 4);  // 2 sizes x 2 methods
    for (const auto& s : rows) {
        CHECK(s.count == 2);
        CHECK(s.mean_r >= 0.0);
        CHECK(s.mean_r <= 1.0);
        CHECK(s.stddev_r >= 0.0);
        CHECK(s.index_fraction >= 0.0);
        CHECK(s.index_fraction <= 1.0);
    }

    auto shuffled = records;
    std::mt19937_64 rng(11);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto rows2 = summarize(shuffled);
    REQUIRE(rows2.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows2[i].n == rows[i].n);
        CHECK(rows2[i].method == rows[i].method);
        CHECK(rows2[i].mean_r == rows[i].mean_r);          // bitwise: accumulation order is pinned
        CHECK(rows2[i].stddev_r == rows[i].stddev_r);
        CHECK(rows2[i].index_fraction == rows[i].index_fraction);
        CHECK(rows2[i].mean_iterations == rows[i].mean_iterations);
    }

    CHECK(summarize({records[0]})[0].stddev_r == 0.0);
    CHECK(summarize({records[0]})[0].count == 1);
    CHECK_THROWS_AS(summarize({}), std::invalid_argument);
}

TEST_CASE("persisted campaigns have the full artifact layout") {
    const auto spec = tiny_spec();
    auto records = run_campaign(spec);
    const auto dir = std::filesystem::temp_directory_path() / "uq_bench_artifacts";
    std::filesystem::remove_all(dir);
    persist_campaign(spec, records, dir.string(), true);

    REQUIRE(std::filesystem::exists(dir / "results.csv"));
    REQUIRE(std::filesystem::exists(dir / "summary.csv"));
    REQUIRE(std::filesystem::exists(dir / "manifest.json"));

    const auto results = slurp(dir / "results.csv");
    std::istringstream in(results);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,seed,method,r,i,iterations,wall_ms");
    int lines = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++lines;
    CHECK(lines == 8);

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["records"] == 8);
    CHECK(manifest["spec"]["sizes"] == nlohmann::json({2, 3}));
    CHECK(manifest.contains("version"));

    // Each record points at its persisted trace; ngd traces carry k_max + 1
    // rows plus the header line.
    for (const auto& r : records) {
        REQUIRE_FALSE(r.trace_ref.empty());
        REQUIRE(std::filesystem::exists(dir / r.trace_ref));
        if (r.method == BenchMethod::UqMaxcut) {
            std::ifstream tf(dir / r.trace_ref);
            int count = 0;
            for (std::string line; std::getline(tf, line);)
                if (!line.empty()) ++count;
            CHECK(count == spec.opt.k_max + 2);
        }
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("result files are byte-identical across reruns except wall time") {
    const auto spec = tiny_spec();
    auto a = run_campaign(spec);
    auto b = run_campaign(spec);
    const auto dir = std::filesystem::temp_directory_path() / "uq_bench_rerun";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    write_results_csv((dir / "a.csv").string(), a);
    write_results_csv((dir / "b.csv").string(), b);
    const auto ta = slurp(dir / "a.csv");
    const auto tb = slurp(dir / "b.csv");
    CHECK(strip_last_column(ta) == strip_last_column(tb));
    std::filesystem::remove_all(dir);
}

TEST_CASE("method names round-trip") {
    for (BenchMethod m : {BenchMethod::UqMaxcut, BenchMethod::UqIsing, BenchMethod::QaoaNgd, BenchMethod::QaoaSimplex})
        CHECK(bench_method_from_name(bench_method_name(m)) == m);
    CHECK(std::string(bench_method_name(BenchMethod::UqMaxcut)) == "uqmaxcut");
    CHECK_THROWS_AS(bench_method_from_name("annealer"), std::invalid_argument);
}

TEST_CASE("campaign specs validate their inputs") {
    BenchSpec spec;
    spec.sizes = {};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = BenchSpec{};
    spec.sizes = {27};
    CHECK_THROWS_AS(spec.validate(), CapacityError);
    spec = BenchSpec{};
    spec.instances_per_size = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = BenchSpec{};
    spec.jobs = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = BenchSpec{};
    spec.methods = {};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    CHECK_NOTHROW(BenchSpec{}.validate());
}

TEST_CASE("the lambda grid is sorted and includes the reference point") {
    const auto grid = default_lambda_grid();
    REQUIRE(grid.size() == 11);
    CHECK(std::is_sorted(grid.begin(), grid.end()));
    CHECK(std::count(grid.begin(), grid.end(), kDefaultLambda) == 1);
    CHECK(grid.front() == Approx(0.1));
    CHECK(grid.back() == Approx(1.0));
}

TEST_CASE("the scaling sweep shows perfect order agreement at the reference point") {
    const auto table = lambda_sweep(6, 5, {0.1, kDefaultLambda, 1.0}, true, 0);
    REQUIRE(table.rows.size() == 15);
    REQUIRE(table.curve.size() == 3 * 64);

    double mean_low = 0.0, mean_high = 0.0;
    for (const auto& r : table.rows) {
        CHECK(r.agreement >= 0.0);
        CHECK(r.agreement <= 1.0);
        if (r.lambda == kDefaultLambda) CHECK(r.agreement == 1.0);
        if (r.lambda == 0.1) mean_low += r.agreement / 5.0;
        if (r.lambda == 1.0) mean_high += r.agreement / 5.0;
    }
    // Over-compressed scaling wraps large costs around the sine and scrambles
    // the order; the in-range settings cannot.
    CHECK(mean_low < mean_high);
    CHECK(mean_high == 1.0);

    double prev = -2.0;
    for (const auto& r : table.curve) {
        CHECK(r.mean_transformed_cost >= -1.0);
        CHECK(r.mean_transformed_cost <= 1.0);
        if (r.lambda == kDefaultLambda) {
            if (r.rank > 0) CHECK(r.mean_transformed_cost >= prev);
            prev = r.mean_transformed_cost;
        }
    }

    CHECK_THROWS_AS(lambda_sweep(27, 1, {0.5}, false, 0), CapacityError);
    CHECK_THROWS_AS(lambda_sweep(4, 0, {0.5}, false, 0), std::invalid_argument);
    CHECK_THROWS_AS(lambda_sweep(4, 1, {0.0}, false, 0), std::invalid_argument);
}

TEST_CASE("sweep tables serialize with pinned headers") {
    const auto table = lambda_sweep(3, 2, {kDefaultLambda}, false, 1);
    std::ostringstream rows, curve;
    write_sweep_csv(rows, table);
    write_sweep_curve_csv(curve, table);
    CHECK(rows.str().rfind("lambda,instance_seed,agreement\n", 0) == 0);
    CHECK(curve.str().rfind("lambda,rank,mean_transformed_cost\n", 0) == 0);
    int curve_lines = -1;  // discount header
    std::istringstream in(curve.str());
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++curve_lines;
    CHECK(curve_lines == 8);
}
