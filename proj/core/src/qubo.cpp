#include "spikemark/qubo.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spikemark/errors.hpp"
#include "spikemark/report.hpp"
#include "spikemark/rng.hpp"

namespace spikemark {

namespace {

void check_workload(const mis_workload& w) {
    if (w.n < 1) throw data_error("qubo: a workload needs at least one node");
    if (!(w.density >= 0.0) || !(w.density <= 1.0))
        throw data_error("qubo: edge density must lie in [0, 1]");
    for (std::size_t k = 0; k < w.edges.size(); ++k) {
        const auto [u, v] = w.edges[k];
        if (u >= v || v >= w.n)
            throw data_error("qubo: edges must satisfy u < v < n");
        if (k > 0 && !(w.edges[k - 1] < w.edges[k]))
            throw data_error("qubo: edges must be sorted lexicographically without duplicates");
    }
}

void check_assignment(const q_matrix& q, const std::vector<std::uint8_t>& x) {
    if (x.size() != q.n)
        throw data_error("qubo: the assignment has " + std::to_string(x.size()) +
                         " bits, expected " + std::to_string(q.n));
}

/// Selected neighbors of node i under assignment x.
std::int64_t selected_neighbors(const q_matrix& q, const std::vector<std::uint8_t>& x,
                                std::size_t i) {
    std::int64_t count = 0;
    for (std::uint32_t v : q.neighbors[i]) count += x[v];
    return count;
}

void randomize(rng256& rng, std::vector<std::uint8_t>& x) {
    for (auto& b : x) b = static_cast<std::uint8_t>(rng.below(2));
}

struct stop_control {
    const stop_condition* stop;
    std::chrono::steady_clock::time_point deadline;

    explicit stop_control(const stop_condition& s) : stop(&s) {
        const int modes = (s.iteration_budget.has_value() ? 1 : 0) +
                          (s.timeout_seconds.has_value() ? 1 : 0);
        if (modes != 1)
            throw data_error("qubo: exactly one of the iteration budget and the "
                             "wall-clock timeout must be set");
        if (s.timeout_seconds && !(*s.timeout_seconds > 0.0))
            throw data_error("qubo: the timeout must be positive");
        if (s.gap_threshold && s.gap_threshold->first == 0)
            throw data_error("qubo: a gap threshold needs a nonzero target cost");
        if (s.timeout_seconds)
            deadline = std::chrono::steady_clock::now() +
                       std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(*s.timeout_seconds));
    }

    /// True once the run must end. Wall-clock checks happen every 256
    /// iterations to keep the clock off the hot path.
    bool exhausted(std::uint64_t iterations) const {
        if (stop->iteration_budget) return iterations >= *stop->iteration_budget;
        return iterations > 0 && (iterations & 255u) == 0 &&
               std::chrono::steady_clock::now() >= deadline;
    }

    bool gap_reached(std::int64_t best_cost) const {
        return stop->gap_threshold &&
               bks_gap(best_cost, stop->gap_threshold->first) <=
                   stop->gap_threshold->second;
    }
};

}  // namespace

mis_workload generate_mis_workload(std::size_t n, double density, std::uint64_t seed) {
    if (n < 1) throw data_error("qubo: a workload needs at least one node");
    if (!std::isfinite(density) || density < 0.0 || density > 1.0)
        throw data_error("qubo: edge density must lie in [0, 1]");
    mis_workload w;
    w.n = n;
    w.density = density;
    w.seed = seed;
    rng256 rng(seed);
    for (std::uint32_t u = 0; u + 1 < n; ++u)
        for (std::uint32_t v = u + 1; v < n; ++v)
            if (rng.uniform01() < density) w.edges.emplace_back(u, v);
    return w;
}

void save_workload(const std::string& path, const mis_workload& w) {
    check_workload(w);
    nlohmann::ordered_json j;
    j["n"] = w.n;
    j["density"] = w.density;
    j["seed"] = w.seed;
    auto edges = nlohmann::ordered_json::array();
    for (auto [u, v] : w.edges) edges.push_back({u, v});
    j["edges"] = std::move(edges);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("qubo: cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw data_error("qubo: failed writing '" + path + "'");
}

mis_workload load_workload(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("qubo: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw data_error("qubo: '" + path + "' is not a workload file");
    if (!j.contains("n") || !j.contains("density") || !j.contains("seed") ||
        !j.contains("edges") || !j["n"].is_number_unsigned() ||
        !j["density"].is_number() || !j["seed"].is_number_unsigned() ||
        !j["edges"].is_array())
        throw data_error("qubo: '" + path + "' must hold n, density, seed and edges");
    mis_workload w;
    w.n = j["n"].get<std::size_t>();
    w.density = j["density"].get<double>();
    w.seed = j["seed"].get<std::uint64_t>();
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
            !e[1].is_number_unsigned())
            throw data_error("qubo: every edge must be a [u, v] pair");
        w.edges.emplace_back(e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>());
    }
    check_workload(w);
    return w;
}

std::int64_t q_matrix::at(std::size_t u, std::size_t v) const {
    if (u >= n || v >= n) throw data_error("qubo: coefficient index out of range");
    if (u == v) return -1;
    const auto& nb = neighbors[u];
    return std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(v)) ? 4 : 0;
}

q_matrix build_q(const mis_workload& w) {
    check_workload(w);
    q_matrix q;
    q.n = w.n;
    q.neighbors.resize(w.n);
    for (auto [u, v] : w.edges) {
        q.neighbors[u].push_back(v);
        q.neighbors[v].push_back(u);
    }
    for (auto& nb : q.neighbors) std::sort(nb.begin(), nb.end());
    return q;
}

std::int64_t qubo_cost(const q_matrix& q, const std::vector<std::uint8_t>& x) {
    check_assignment(q, x);
    std::int64_t selected = 0;
    std::int64_t violated = 0;
    for (std::size_t u = 0; u < q.n; ++u) {
        if (!x[u]) continue;
        ++selected;
        for (std::uint32_t v : q.neighbors[u])
            if (v > u && x[v]) ++violated;
    }
    return -selected + 8 * violated;
}

std::int64_t delta_cost(const q_matrix& q, const std::vector<std::uint8_t>& x,
                        std::size_t i) {
    check_assignment(q, x);
    if (i >= q.n)
        throw data_error("qubo: flip index " + std::to_string(i) + " is out of range");
    const std::int64_t direction = 1 - 2 * static_cast<std::int64_t>(x[i]);
    return direction * (-1 + 8 * selected_neighbors(q, x, i));
}

solver_run simulated_annealing(const q_matrix& q, std::uint64_t seed,
                               const sa_schedule& schedule, const stop_condition& stop) {
    if (q.n < 1) throw data_error("qubo: cannot anneal an empty problem");
    if (!(schedule.t0 > 0.0) || !(schedule.r > 0.0) || !(schedule.r < 1.0) ||
        !(schedule.t_min > 0.0) || !(schedule.t_min <= schedule.t0))
        throw data_error("qubo: the annealing schedule needs t0 >= t_min > 0 and 0 < r < 1");
    const stop_control control(stop);

    rng256 rng(seed);
    std::vector<std::uint8_t> x(q.n);
    randomize(rng, x);
    std::int64_t cost = qubo_cost(q, x);

    solver_run run;
    run.solver = "sa";
    run.n = q.n;
    run.seed = seed;
    run.timeout_seconds = stop.timeout_seconds;
    run.best_x = x;
    run.best_cost = cost;

    double temperature = schedule.t0;
    std::size_t sweep_pos = 0;
    std::uint64_t iterations = 0;
    bool done = control.gap_reached(run.best_cost);

    while (!done && !control.exhausted(iterations)) {
        const std::size_t i = static_cast<std::size_t>(rng.below(q.n));
        const std::int64_t delta = delta_cost(q, x, i);
        const bool accept =
            delta <= 0 ||
            rng.uniform01() < std::exp(-static_cast<double>(delta) / temperature);
        if (accept) {
            x[i] ^= 1;
            cost += delta;
            if (cost < run.best_cost) {
                run.best_cost = cost;
                run.best_x = x;
                done = control.gap_reached(run.best_cost);
            }
        }
        ++iterations;
        if (++sweep_pos == q.n) {
            sweep_pos = 0;
            temperature *= schedule.r;
            if (temperature < schedule.t_min) {
                temperature = schedule.t0;
                randomize(rng, x);
                cost = qubo_cost(q, x);
            }
        }
    }
    run.iterations = iterations;
    return run;
}

namespace {

/// Incremental move table for local search: per-variable flip deltas kept in
/// sync by updating only the flipped node and its neighbors.
struct move_table {
    std::vector<std::int64_t> selected_nb;
    std::vector<std::int64_t> delta;

    void rebuild(const q_matrix& q, const std::vector<std::uint8_t>& x) {
        selected_nb.assign(q.n, 0);
        delta.assign(q.n, 0);
        for (std::size_t i = 0; i < q.n; ++i) {
            selected_nb[i] = selected_neighbors(q, x, i);
            delta[i] = (1 - 2 * static_cast<std::int64_t>(x[i])) *
                       (-1 + 8 * selected_nb[i]);
        }
    }

    void apply_flip(const q_matrix& q, std::vector<std::uint8_t>& x, std::size_t i) {
        x[i] ^= 1;
        const std::int64_t change = x[i] ? 1 : -1;
        for (std::uint32_t v : q.neighbors[i]) {
            selected_nb[v] += change;
            delta[v] =
                (1 - 2 * static_cast<std::int64_t>(x[v])) * (-1 + 8 * selected_nb[v]);
        }
        delta[i] = (1 - 2 * static_cast<std::int64_t>(x[i])) * (-1 + 8 * selected_nb[i]);
    }
};

}  // namespace

solver_run tabu_search(const q_matrix& q, std::uint64_t seed, const tabu_params& params,
                       const stop_condition& stop) {
    if (q.n < 1) throw data_error("qubo: cannot search an empty problem");
    if (params.stagnation_window < 1)
        throw data_error("qubo: the stagnation window must be positive");
    const stop_control control(stop);

    rng256 rng(seed);
    std::vector<std::uint8_t> x(q.n);
    randomize(rng, x);
    std::int64_t cost = qubo_cost(q, x);
    move_table moves;
    moves.rebuild(q, x);
    std::vector<std::uint64_t> tabu_until(q.n, 0);

    solver_run run;
    run.solver = "tabu";
    run.n = q.n;
    run.seed = seed;
    run.timeout_seconds = stop.timeout_seconds;
    run.best_x = x;
    run.best_cost = cost;

    std::uint64_t iterations = 0;
    std::uint64_t last_improvement = 0;
    bool done = control.gap_reached(run.best_cost);

    const auto restart = [&] {
        randomize(rng, x);
        cost = qubo_cost(q, x);
        moves.rebuild(q, x);
        std::fill(tabu_until.begin(), tabu_until.end(), 0);
        last_improvement = iterations;
    };

    while (!done && !control.exhausted(iterations)) {
        if (iterations - last_improvement > params.stagnation_window) {
            restart();
            ++iterations;
            continue;
        }

        // Steepest admissible flip; ties break toward the lowest index.
        std::size_t best_i = q.n;
        std::int64_t best_delta = 0;
        for (std::size_t i = 0; i < q.n; ++i) {
            const bool admissible = iterations >= tabu_until[i] ||
                                    cost + moves.delta[i] < run.best_cost;
            if (!admissible) continue;
            if (best_i == q.n || moves.delta[i] < best_delta) {
                best_i = i;
                best_delta = moves.delta[i];
            }
        }
        if (best_i == q.n) {
            restart();
            ++iterations;
            continue;
        }

        moves.apply_flip(q, x, best_i);
        cost += best_delta;
        tabu_until[best_i] = iterations + 1 + params.tenure;
        if (cost < run.best_cost) {
            run.best_cost = cost;
            run.best_x = x;
            last_improvement = iterations;
            done = control.gap_reached(run.best_cost);
        }
        ++iterations;
    }
    run.iterations = iterations;
    return run;
}

bks_result brute_force_bks(const q_matrix& q) {
    if (q.n < 1) throw data_error("qubo: cannot enumerate an empty problem");
    if (q.n > 24)
        throw data_error("qubo: exhaustive search is limited to 24 variables; larger "
                         "instances need a long tabu run for their reference cost");

    std::vector<std::uint8_t> x(q.n, 0);
    std::int64_t cost = 0;
    bks_result best;
    best.cost = 0;
    best.x = x;

    const std::uint64_t total = std::uint64_t{1} << q.n;
    for (std::uint64_t k = 1; k < total; ++k) {
        // Gray-code walk: assignment k differs from k-1 in exactly one bit.
        const auto i = static_cast<std::size_t>(std::countr_zero(k));
        const std::int64_t direction = 1 - 2 * static_cast<std::int64_t>(x[i]);
        cost += direction * (-1 + 8 * selected_neighbors(q, x, i));
        x[i] ^= 1;
        if (cost < best.cost) {
            best.cost = cost;
            best.x = x;
        }
    }
    return best;
}

double bks_gap(std::int64_t c, std::int64_t c_target) {
    if (c_target == 0)
        throw data_error("qubo: the optimality gap is undefined for a zero reference cost");
    return static_cast<double>(c - c_target) / std::abs(static_cast<double>(c_target));
}

std::optional<std::int64_t> bks_table::lookup(std::size_t n, double density,
                                              std::uint64_t seed) const {
    for (const auto& e : entries)
        if (e.n == n && e.density == density && e.seed == seed) return e.bks_cost;
    return std::nullopt;
}

bks_table load_bks_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("qubo: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "n,density,seed,bks_cost,method")
        throw data_error("qubo: '" + path +
                         "' must start with 'n,density,seed,bks_cost,method'");
    bks_table table;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 5)
            throw data_error("qubo: reference row " + std::to_string(row_no) +
                             " has " + std::to_string(cells.size()) + " cells, expected 5");
        try {
            bks_entry e;
            e.n = static_cast<std::size_t>(std::stoull(cells[0]));
            e.density = parse_double(cells[1]);
            e.seed = std::stoull(cells[2]);
            e.bks_cost = std::stoll(cells[3]);
            e.method = cells[4];
            if (e.method.empty()) throw data_error("qubo: empty reference method");
            table.entries.push_back(std::move(e));
        } catch (const std::exception& ex) {
            throw data_error("qubo: reference row " + std::to_string(row_no) + ": " +
                             ex.what());
        }
    }
    return table;
}

void save_bks_csv(const std::string& path, const bks_table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("qubo: cannot open '" + path + "' for writing");
    out << "n,density,seed,bks_cost,method\n";
    for (const auto& e : table.entries)
        out << e.n << "," << format_double(e.density) << "," << e.seed << ","
            << e.bks_cost << "," << e.method << "\n";
    if (!out) throw data_error("qubo: failed writing '" + path + "'");
}

bks_table compute_bks(const std::vector<std::size_t>& sizes,
                      const std::vector<double>& densities,
                      const std::vector<std::uint64_t>& seeds,
                      std::uint64_t long_tabu_iters) {
    bks_table table;
    for (std::size_t n : sizes) {
        for (double density : densities) {
            for (std::uint64_t seed : seeds) {
                const auto q = build_q(generate_mis_workload(n, density, seed));
                bks_entry e;
                e.n = n;
                e.density = density;
                e.seed = seed;
                if (n <= 24) {
                    e.bks_cost = brute_force_bks(q).cost;
                    e.method = "brute_force";
                } else {
                    stop_condition stop;
                    stop.iteration_budget = long_tabu_iters;
                    e.bks_cost = tabu_search(q, seed, tabu_params{}, stop).best_cost;
                    e.method = "long_tabu";
                }
                table.entries.push_back(std::move(e));
            }
        }
    }
    return table;
}

qubo_benchmark_result run_qubo_benchmark(const qubo_benchmark_config& cfg,
                                         const bks_table& bks) {
    for (const auto& solver : cfg.solvers)
        if (solver != "sa" && solver != "tabu")
            throw data_error("qubo: unknown solver '" + solver + "'");
    if (!cfg.iteration_budget && cfg.timeouts_s.empty())
        throw data_error("qubo: the benchmark needs an iteration budget or timeouts");

    // Deterministic mode runs each cell once; wall-clock mode once per timeout.
    std::vector<std::optional<double>> timeouts;
    if (cfg.iteration_budget) {
        timeouts.push_back(std::nullopt);
    } else {
        for (double t : cfg.timeouts_s) timeouts.emplace_back(t);
    }

    qubo_benchmark_result result;
    for (const auto& solver : cfg.solvers) {
        for (std::size_t n : cfg.sizes) {
            for (double density : cfg.densities) {
                for (std::uint64_t seed : cfg.seeds) {
                    const auto reference = bks.lookup(n, density, seed);
                    if (!reference)
                        throw data_error(
                            "qubo: no reference cost for n=" + std::to_string(n) +
                            ", density=" + format_double(density) +
                            ", seed=" + std::to_string(seed));
                    const auto q = build_q(generate_mis_workload(n, density, seed));
                    for (const auto& timeout : timeouts) {
                        stop_condition stop;
                        if (cfg.iteration_budget)
                            stop.iteration_budget = *cfg.iteration_budget;
                        else
                            stop.timeout_seconds = *timeout;
                        solver_run run = solver == "sa"
                                             ? simulated_annealing(q, seed, cfg.sa, stop)
                                             : tabu_search(q, seed, cfg.tabu, stop);
                        run.density = density;
                        result.gaps.push_back(bks_gap(run.best_cost, *reference));
                        result.bks_costs.push_back(*reference);
                        result.runs.push_back(std::move(run));
                    }
                }
            }
        }
    }
    return result;
}

std::string qubo_report_csv(const qubo_benchmark_result& r) {
    if (r.gaps.size() != r.runs.size() || r.bks_costs.size() != r.runs.size())
        throw data_error("qubo: report rows are misaligned");
    std::string csv = "solver,n,density,seed,timeout_s,best_cost,bks_cost,bks_gap,iterations\n";
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        const auto& run = r.runs[i];
        csv += run.solver;
        csv += ',';
        csv += std::to_string(run.n);
        csv += ',';
        csv += format_double(run.density);
        csv += ',';
        csv += std::to_string(run.seed);
        csv += ',';
        if (run.timeout_seconds) csv += format_double(*run.timeout_seconds);
        csv += ',';
        csv += std::to_string(run.best_cost);
        csv += ',';
        csv += std::to_string(r.bks_costs[i]);
        csv += ',';
        csv += format_double(r.gaps[i]);
        csv += ',';
        csv += std::to_string(run.iterations);
        csv += '\n';
    }
    return csv;
}

void save_qubo_report_csv(const std::string& path, const qubo_benchmark_result& r) {
    const auto csv = qubo_report_csv(r);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("qubo: cannot open '" + path + "' for writing");
    out << csv;
    if (!out) throw data_error("qubo: failed writing '" + path + "'");
}

}  // namespace spikemark
