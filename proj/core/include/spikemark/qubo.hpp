#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spikemark {

// ---------------------------------------------------------------------------
// Maximum-independent-set workloads expressed as QUBO minimization:
// selecting node u contributes -1, each violated edge (both endpoints
// selected) contributes +8 under the symmetric coefficient convention
// q_uu = -1, q_uv = q_vu = 4. Optimal cost is -(maximum independent set).
// All costs are exact 64-bit integers.
// ---------------------------------------------------------------------------

struct mis_workload {
    std::size_t n = 0;
    double density = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  ///< u < v, lexicographic
};

/// Seeded Erdos-Renyi graph: pairs (u,v), u<v, visited in lexicographic
/// order, each kept when the next uniform draw falls below `density`.
mis_workload generate_mis_workload(std::size_t n, double density, std::uint64_t seed);

/// Workload file round-trip (JSON: n, density, seed, edges). Throws
/// data_error on malformed files or invariant violations.
void save_workload(const std::string& path, const mis_workload& w);
mis_workload load_workload(const std::string& path);

struct q_matrix {
    std::size_t n = 0;
    std::vector<std::vector<std::uint32_t>> neighbors;  ///< sorted adjacency
    std::int64_t at(std::size_t u, std::size_t v) const;  ///< -1 diagonal, 4 per edge endpoint pair, else 0
};
q_matrix build_q(const mis_workload& w);

/// Exact integer cost xᵀQx = -(selected nodes) + 8·(violated edges).
std::int64_t qubo_cost(const q_matrix& q, const std::vector<std::uint8_t>& x);

/// Exact cost change from flipping bit i:
///   (1 - 2x_i)·(-1 + 8·(selected neighbors of i)).
std::int64_t delta_cost(const q_matrix& q, const std::vector<std::uint8_t>& x,
                        std::size_t i);

// ---------------------------------------------------------------------------
// Solvers. Two stop modes: a fixed iteration budget (deterministic, for
// testing) or a wall-clock deadline (benchmark protocol; the clock starts
// after Q is built). Exactly one must be set.
// ---------------------------------------------------------------------------

struct stop_condition {
    std::optional<std::uint64_t> iteration_budget;
    std::optional<double> timeout_seconds;
    /// Experimental: stop early once bks_gap(best, target) <= threshold.
    std::optional<std::pair<std::int64_t, double>> gap_threshold;  ///< (target cost, gap)
};

struct solver_run {
    std::string solver;
    std::size_t n = 0;
    double density = 0;
    std::uint64_t seed = 0;
    std::optional<double> timeout_seconds;
    std::vector<std::uint8_t> best_x;
    std::int64_t best_cost = 0;
    std::uint64_t iterations = 0;
};

struct sa_schedule {
    double t0 = 8.0;      ///< initial temperature (max |q| by default)
    double r = 0.999;     ///< geometric cooling factor, applied once per sweep of n proposals
    double t_min = 1e-3;  ///< restart temperature
};

/// Single-flip Metropolis annealing with geometric cooling and restart from
/// a fresh random assignment when the temperature floor is reached. Tracks
/// the best assignment ever seen.
solver_run simulated_annealing(const q_matrix& q, std::uint64_t seed,
                               const sa_schedule& schedule, const stop_condition& stop);

struct tabu_params {
    std::uint64_t tenure = 10;
    std::uint64_t stagnation_window = 2000;  ///< iterations without best improvement before restart
};

/// Steepest single-flip descent with a per-variable tabu tenure, aspiration
/// on moves that beat the best-ever cost, and random restart on stagnation.
/// Ties between equal-delta moves break toward the lowest index.
solver_run tabu_search(const q_matrix& q, std::uint64_t seed,
                       const tabu_params& params, const stop_condition& stop);

/// Exhaustive gray-code enumeration (one delta evaluation per assignment).
/// Exact; restricted to n <= 24 — larger instances must get their reference
/// cost from a long tabu run instead (throws data_error pointing there).
struct bks_result {
    std::int64_t cost = 0;
    std::vector<std::uint8_t> x;
};
bks_result brute_force_bks(const q_matrix& q);

/// (c - c_target) / |c_target|: positive when worse than the reference,
/// negative when beating it. Throws data_error when c_target = 0.
double bks_gap(std::int64_t c, std::int64_t c_target);

// ---------------------------------------------------------------------------
// Benchmark orchestration.
// ---------------------------------------------------------------------------

/// Reference-cost table keyed by (n, density, seed).
struct bks_entry {
    std::size_t n = 0;
    double density = 0;
    std::uint64_t seed = 0;
    std::int64_t bks_cost = 0;
    std::string method;  ///< "brute_force" | "long_tabu"
};
struct bks_table {
    std::vector<bks_entry> entries;
    std::optional<std::int64_t> lookup(std::size_t n, double density,
                                       std::uint64_t seed) const;
};
/// CSV `n,density,seed,bks_cost,method`.
bks_table load_bks_csv(const std::string& path);
void save_bks_csv(const std::string& path, const bks_table& table);

/// Fill reference costs for every (n, density, seed) cell: brute force when
/// n <= 24, otherwise a long deterministic tabu run of `long_tabu_iters`.
bks_table compute_bks(const std::vector<std::size_t>& sizes,
                      const std::vector<double>& densities,
                      const std::vector<std::uint64_t>& seeds,
                      std::uint64_t long_tabu_iters = 2'000'000);

struct qubo_benchmark_config {
    std::vector<std::size_t> sizes{10, 25, 50, 100, 250};
    std::vector<double> densities{0.01, 0.05, 0.10, 0.25};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::vector<double> timeouts_s{1.0};
    std::optional<std::uint64_t> iteration_budget;  ///< set for deterministic mode (overrides timeouts)
    std::vector<std::string> solvers{"sa", "tabu"};
    sa_schedule sa;
    tabu_params tabu;
};

struct qubo_benchmark_result {
    std::vector<solver_run> runs;          ///< one per (solver, size, density, seed, timeout)
    std::vector<double> gaps;              ///< aligned with runs
    std::vector<std::int64_t> bks_costs;   ///< aligned with runs
};

/// Run every cell against the reference table. Throws data_error when a
/// cell has no reference cost.
qubo_benchmark_result run_qubo_benchmark(const qubo_benchmark_config& cfg,
                                         const bks_table& bks);

/// Report CSV with header `solver,n,density,seed,timeout_s,best_cost,bks_cost,bks_gap,iterations`.
void save_qubo_report_csv(const std::string& path, const qubo_benchmark_result& r);
std::string qubo_report_csv(const qubo_benchmark_result& r);

}  // namespace spikemark
