#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "oracle.hpp"
#include "spikemark/errors.hpp"
#include "spikemark/qubo.hpp"
#include "spikemark/rng.hpp"

using namespace spikemark;

namespace {

mis_workload path3() {
    mis_workload w;
    w.n = 3;
    w.density = 0.5;
    w.seed = 0;
    w.edges = {{0, 1}, {1, 2}};
    return w;
}

mis_workload edge2() {
    mis_workload w;
    w.n = 2;
    w.density = 1.0;
    w.seed = 0;
    w.edges = {{0, 1}};
    return w;
}

mis_workload cycle5() {
    mis_workload w;
    w.n = 5;
    w.density = 0.4;
    w.seed = 0;
    w.edges = {{0, 1}, {0, 4}, {1, 2}, {2, 3}, {3, 4}};
    return w;
}

mis_workload complete4() {
    mis_workload w;
    w.n = 4;
    w.density = 1.0;
    w.seed = 0;
    w.edges = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    return w;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

stop_condition iter_budget(std::uint64_t n) {
    stop_condition s;
    s.iteration_budget = n;
    return s;
}

}  // namespace

TEST_SUITE("qubo") {

TEST_CASE("workload generation is deterministic and respects density extremes") {
    const auto a = generate_mis_workload(20, 0.3, 7);
    const auto b = generate_mis_workload(20, 0.3, 7);
    CHECK(a.edges == b.edges);

    CHECK(generate_mis_workload(10, 0.0, 1).edges.empty());
    CHECK(generate_mis_workload(10, 1.0, 1).edges.size() == 45);

    const auto c = generate_mis_workload(20, 0.3, 8);
    CHECK(a.edges != c.edges);
}

TEST_CASE("generated edges are canonical: u < v, sorted, no duplicates") {
    const auto w = generate_mis_workload(30, 0.5, 3);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (auto [u, v] : w.edges) {
        CHECK(u < v);
        CHECK(v < 30);
        CHECK(seen.insert({u, v}).second);
    }
    CHECK(std::is_sorted(w.edges.begin(), w.edges.end()));
}

TEST_CASE("edge counts track the requested density") {
    // 100 nodes -> 4950 pairs; at 0.25 expect ~1237 +- 4 sigma (~122).
    const auto w = generate_mis_workload(100, 0.25, 5);
    const double got = static_cast<double>(w.edges.size());
    CHECK(got > 1237.5 - 122.0);
    CHECK(got < 1237.5 + 122.0);
}

TEST_CASE("the coefficient matrix is -1 on the diagonal and 4 per edge side") {
    const auto q = build_q(edge2());
    CHECK(q.at(0, 0) == -1);
    CHECK(q.at(1, 1) == -1);
    CHECK(q.at(0, 1) == 4);
    CHECK(q.at(1, 0) == 4);

    const auto qp = build_q(path3());
    CHECK(qp.at(0, 2) == 0);
    CHECK(qp.at(2, 0) == 0);
    CHECK(qp.at(1, 2) == 4);

    const auto qe = build_q(generate_mis_workload(4, 0.0, 0));
    for (std::size_t u = 0; u < 4; ++u)
        for (std::size_t v = 0; v < 4; ++v) CHECK(qe.at(u, v) == (u == v ? -1 : 0));
}

TEST_CASE("costs match the dense quadratic form") {
    const auto q = build_q(edge2());
    CHECK(qubo_cost(q, {0, 0}) == 0);
    CHECK(qubo_cost(q, {1, 0}) == -1);
    CHECK(qubo_cost(q, {1, 1}) == 6);

    const auto w = generate_mis_workload(12, 0.4, 9);
    const auto qw = build_q(w);
    rng256 g(21);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::uint8_t> x(12);
        for (auto& b : x) b = static_cast<std::uint8_t>(g.below(2));
        CHECK(qubo_cost(qw, x) == oracle::qubo_cost_dense(12, w.edges, x));
    }
}

TEST_CASE("flip deltas equal the recomputed cost difference") {
    const auto w = generate_mis_workload(15, 0.3, 2);
    const auto q = build_q(w);
    rng256 g(5);
    std::vector<std::uint8_t> x(15, 0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t i = static_cast<std::size_t>(g.below(15));
        const std::int64_t before = qubo_cost(q, x);
        const std::int64_t delta = delta_cost(q, x, i);
        x[i] ^= 1;
        CHECK(qubo_cost(q, x) == before + delta);
    }
}

TEST_CASE("the worked flip example holds") {
    const auto q = build_q(edge2());
    const std::vector<std::uint8_t> x{1, 0};
    CHECK(delta_cost(q, x, 1) == 7);  // 6 - (-1)
    const std::vector<std::uint8_t> zero{0, 0};
    const auto iso = build_q(generate_mis_workload(3, 0.0, 0));
    CHECK(delta_cost(iso, {0, 0, 0}, 1) == -1);
}

TEST_CASE("flipping the same bit twice cancels") {
    const auto q = build_q(cycle5());
    std::vector<std::uint8_t> x{1, 0, 1, 0, 0};
    const auto d1 = delta_cost(q, x, 3);
    x[3] ^= 1;
    const auto d2 = delta_cost(q, x, 3);
    CHECK(d1 + d2 == 0);
}

TEST_CASE("delta rejects an out-of-range index") {
    const auto q = build_q(edge2());
    CHECK_THROWS_AS(delta_cost(q, {1, 0}, 2), data_error);
}

TEST_CASE("exhaustive search finds the known optima of small graphs") {
    CHECK(brute_force_bks(build_q(path3())).cost == -2);
    CHECK(brute_force_bks(build_q(cycle5())).cost == -2);
    CHECK(brute_force_bks(build_q(complete4())).cost == -1);

    mis_workload single;
    single.n = 1;
    single.density = 0.0;
    single.seed = 0;
    const auto res = brute_force_bks(build_q(single));
    CHECK(res.cost == -1);
    CHECK(res.x == std::vector<std::uint8_t>{1});
}

TEST_CASE("the exhaustive optimum is the negated maximum independent set size") {
    for (std::uint64_t seed : {0, 1, 2}) {
        for (double density : {0.1, 0.3}) {
            const auto w = generate_mis_workload(12, density, seed);
            const auto best = brute_force_bks(build_q(w));
            CHECK(best.cost == -static_cast<std::int64_t>(
                                   oracle::max_independent_set(12, w.edges)));
            // The reported assignment achieves the reported cost.
            CHECK(qubo_cost(build_q(w), best.x) == best.cost);
        }
    }
}

TEST_CASE("exhaustive search declines oversized instances, pointing at the alternative") {
    mis_workload big;
    big.n = 25;
    big.density = 0.0;
    big.seed = 0;
    try {
        brute_force_bks(build_q(big));
        FAIL("expected a size-bound error");
    } catch (const data_error& e) {
        CHECK(std::string(e.what()).find("tabu") != std::string::npos);
    }
}

TEST_CASE("the optimality gap is signed relative difference over magnitude") {
    CHECK(bks_gap(-10, -10) == 0.0);
    CHECK(bks_gap(-8, -10) == doctest::Approx(0.2));
    CHECK(bks_gap(-11, -10) == doctest::Approx(-0.1));
    CHECK_THROWS_AS(bks_gap(5, 0), data_error);
}

TEST_CASE("annealing solves tiny graphs to optimality on a fixed budget") {
    const sa_schedule sched;
    const auto r1 = simulated_annealing(build_q(edge2()), 0, sched, iter_budget(20000));
    CHECK(r1.best_cost == -1);
    const auto r2 = simulated_annealing(build_q(path3()), 1, sched, iter_budget(20000));
    CHECK(r2.best_cost == -2);
    CHECK(qubo_cost(build_q(path3()), r2.best_x) == -2);
}

TEST_CASE("annealing is reproducible in budget mode") {
    const auto q = build_q(generate_mis_workload(30, 0.2, 3));
    const sa_schedule sched;
    const auto a = simulated_annealing(q, 9, sched, iter_budget(5000));
    const auto b = simulated_annealing(q, 9, sched, iter_budget(5000));
    CHECK(a.best_cost == b.best_cost);
    CHECK(a.best_x == b.best_x);
    CHECK(a.iterations == b.iterations);
    CHECK(a.iterations == 5000);
}

TEST_CASE("a longer budget never makes annealing worse") {
    const auto q = build_q(generate_mis_workload(40, 0.15, 6));
    const sa_schedule sched;
    const auto short_run = simulated_annealing(q, 4, sched, iter_budget(2000));
    const auto long_run = simulated_annealing(q, 4, sched, iter_budget(50000));
    CHECK(long_run.best_cost <= short_run.best_cost);
}

TEST_CASE("tabu descent solves the K4 clique despite the plateau") {
    const tabu_params params;
    const auto r = tabu_search(build_q(complete4()), 0, params, iter_budget(5000));
    CHECK(r.best_cost == -1);
    const auto r2 = tabu_search(build_q(edge2()), 0, params, iter_budget(5000));
    CHECK(r2.best_cost == -1);
}

TEST_CASE("tabu with a tenure longer than the variable count still progresses") {
    tabu_params params;
    params.tenure = 100;  // > n: only aspiration can move
    const auto r = tabu_search(build_q(complete4()), 2, params, iter_budget(5000));
    CHECK(r.best_cost == -1);
}

TEST_CASE("tabu is reproducible in budget mode") {
    const auto q = build_q(generate_mis_workload(30, 0.2, 3));
    const tabu_params params;
    const auto a = tabu_search(q, 9, params, iter_budget(5000));
    const auto b = tabu_search(q, 9, params, iter_budget(5000));
    CHECK(a.best_cost == b.best_cost);
    CHECK(a.best_x == b.best_x);
}

TEST_CASE("both solvers then meet the exhaustive optimum on a midsize graph") {
    const auto w = generate_mis_workload(16, 0.25, 4);
    const auto q = build_q(w);
    const auto want = brute_force_bks(q).cost;
    CHECK(simulated_annealing(q, 0, sa_schedule{}, iter_budget(200000)).best_cost == want);
    CHECK(tabu_search(q, 0, tabu_params{}, iter_budget(200000)).best_cost == want);
}

TEST_CASE("wall-clock mode stops in roughly the requested time") {
    const auto q = build_q(generate_mis_workload(50, 0.2, 1));
    stop_condition stop;
    stop.timeout_seconds = 0.05;
    const auto start = std::chrono::steady_clock::now();
    const auto r = simulated_annealing(q, 0, sa_schedule{}, stop);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(r.iterations > 0);
    CHECK(elapsed < 1.0);  // generous: just proves the deadline is honored
}

TEST_CASE("removing a conflicted node always lowers the cost") {
    // For any assignment with a violated edge, dropping either endpoint
    // reduces the cost: the penalty dominates the linear gain.
    rng256 g(33);
    for (int trial = 0; trial < 200; ++trial) {
        const auto w = generate_mis_workload(14, 0.3, g.next());
        const auto q = build_q(w);
        std::vector<std::uint8_t> x(14);
        for (auto& b : x) b = static_cast<std::uint8_t>(g.below(2));
        for (auto [u, v] : w.edges) {
            if (x[u] && x[v]) {
                CHECK(delta_cost(q, x, u) < 0);
                CHECK(delta_cost(q, x, v) < 0);
            }
        }
    }
}

TEST_CASE("workload files round trip") {
    const auto w = generate_mis_workload(18, 0.35, 77);
    const auto path = temp_path("workload_roundtrip.json");
    save_workload(path, w);
    const auto back = load_workload(path);
    CHECK(back.n == w.n);
    CHECK(back.density == w.density);
    CHECK(back.seed == w.seed);
    CHECK(back.edges == w.edges);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_workload("/nonexistent/workload.json"), data_error);
}

TEST_CASE("reference-cost tables round trip through CSV") {
    bks_table table;
    table.entries.push_back({10, 0.25, 0, -5, "brute_force"});
    table.entries.push_back({50, 0.1, 3, -17, "long_tabu"});
    const auto path = temp_path("bks_roundtrip.csv");
    save_bks_csv(path, table);
    const auto back = load_bks_csv(path);
    REQUIRE(back.entries.size() == 2);
    CHECK(back.entries[0].n == 10);
    CHECK(back.entries[0].bks_cost == -5);
    CHECK(back.entries[0].method == "brute_force");
    CHECK(back.entries[1].density == 0.1);

    REQUIRE(back.lookup(10, 0.25, 0).has_value());
    CHECK(*back.lookup(10, 0.25, 0) == -5);
    CHECK_FALSE(back.lookup(10, 0.25, 1).has_value());
    std::filesystem::remove(path);
}

TEST_CASE("the benchmark runner produces one row per cell with exact-match gaps") {
    qubo_benchmark_config cfg;
    cfg.sizes = {10};
    cfg.densities = {0.25};
    cfg.seeds = {0, 1};
    cfg.iteration_budget = 50000;
    cfg.solvers = {"sa", "tabu"};
    const auto bks = compute_bks(cfg.sizes, cfg.densities, cfg.seeds);
    const auto res = run_qubo_benchmark(cfg, bks);
    REQUIRE(res.runs.size() == 4);  // 2 solvers x 2 seeds
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
        CHECK(res.gaps[i] == doctest::Approx(0.0));
        CHECK(res.runs[i].best_cost == res.bks_costs[i]);
    }
}

TEST_CASE("a missing reference entry stops the benchmark") {
    qubo_benchmark_config cfg;
    cfg.sizes = {10};
    cfg.densities = {0.25};
    cfg.seeds = {0};
    cfg.iteration_budget = 100;
    bks_table empty;
    CHECK_THROWS_AS(run_qubo_benchmark(cfg, empty), data_error);
}

TEST_CASE("an empty seed list produces an empty report") {
    qubo_benchmark_config cfg;
    cfg.sizes = {10};
    cfg.densities = {0.25};
    cfg.seeds = {};
    cfg.iteration_budget = 100;
    const auto res = run_qubo_benchmark(cfg, bks_table{});
    CHECK(res.runs.empty());
    CHECK(qubo_report_csv(res) ==
          "solver,n,density,seed,timeout_s,best_cost,bks_cost,bks_gap,iterations\n");
}

TEST_CASE("the report CSV lists every run under the exact header") {
    qubo_benchmark_config cfg;
    cfg.sizes = {10};
    cfg.densities = {0.25};
    cfg.seeds = {0};
    cfg.iteration_budget = 20000;
    cfg.solvers = {"tabu"};
    const auto bks = compute_bks(cfg.sizes, cfg.densities, cfg.seeds);
    const auto res = run_qubo_benchmark(cfg, bks);
    const auto csv = qubo_report_csv(res);
    CHECK(csv.rfind("solver,n,density,seed,timeout_s,best_cost,bks_cost,bks_gap,iterations\n", 0) == 0);
    CHECK(csv.find("tabu,10,0.25,0,") != std::string::npos);
    const auto path = temp_path("qubo_report.csv");
    save_qubo_report_csv(path, res);
    std::ifstream in(path);
    std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(contents == csv);
    std::filesystem::remove(path);
}

}  // TEST_SUITE
