#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spikemark/errors.hpp"
#include "spikemark/fscil.hpp"
#include "spikemark/mackey_glass.hpp"
#include "spikemark/metrics.hpp"
#include "spikemark/model.hpp"
#include "spikemark/model_io.hpp"
#include "spikemark/qubo.hpp"
#include "spikemark/report.hpp"
#include "spikemark/reservoir.hpp"
#include "spikemark/version.hpp"

namespace {

using namespace spikemark;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Shared plumbing.
// ---------------------------------------------------------------------------

/// Cache directory: $NEUROBENCH_DATA_DIR, falling back to the working
/// directory.
std::string data_dir() {
    const char* env = std::getenv("NEUROBENCH_DATA_DIR");
    return (env != nullptr && *env != '\0') ? env : ".";
}

/// Seed lists come as a range "0..4" or a comma list "0,3,7" (a single
/// number is a one-element list).
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    const auto parse_one = [&](const std::string& part) {
        try {
            std::size_t used = 0;
            const std::uint64_t value = std::stoull(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
            return value;
        } catch (const std::exception&) {
            throw data_error("seeds: '" + part + "' is not a non-negative integer");
        }
    };

    std::vector<std::uint64_t> seeds;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const std::uint64_t first = parse_one(text.substr(0, dots));
        const std::uint64_t last = parse_one(text.substr(dots + 2));
        if (last < first)
            throw data_error("seeds: range '" + text + "' runs backwards");
        if (last - first >= 100000)
            throw data_error("seeds: range '" + text + "' is implausibly large");
        for (std::uint64_t s = first; s <= last; ++s) seeds.push_back(s);
        return seeds;
    }
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const auto comma = text.find(',', begin);
        const auto part = text.substr(begin, comma == std::string::npos
                                                 ? std::string::npos
                                                 : comma - begin);
        if (part.empty()) throw data_error("seeds: empty entry in '" + text + "'");
        seeds.push_back(parse_one(part));
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    return seeds;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw data_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Emit a finished document: to the named file (plus a one-line receipt on
/// stdout), or to stdout when no path was given.
void emit(const std::string& out_path, const std::string& text,
          const std::string& what) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
        std::cout << "wrote " << what << " to " << out_path << "\n";
    }
}

ordered_json provenance_object(const char* subcommand,
                               std::vector<std::pair<std::string, std::string>> config) {
    provenance p;
    p.config.emplace_back("subcommand", subcommand);
    for (auto& kv : config) p.config.push_back(std::move(kv));
    return ordered_json::parse(provenance_json(p));
}

// ---------------------------------------------------------------------------
// Workload files: inputs for `analyze` replays, written by `bench chaotic
// --save-workload` or by hand. Samples (and optional targets) are nested
// sample -> timestep -> vector.
// ---------------------------------------------------------------------------

struct workload_file {
    std::vector<std::vector<Tensor>> samples;
    std::optional<std::vector<std::vector<std::vector<double>>>> targets;
    std::optional<std::string> correctness;  ///< "smape" | "r_squared"
    std::optional<double> stride_seconds;
};

workload_file load_workload_file(const std::string& path) {
    const auto j = nlohmann::json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("samples") ||
        !j["samples"].is_array())
        throw data_error("workload: '" + path + "' must be an object with a 'samples' array");

    const auto nested_values = [&](const nlohmann::json& node, const char* field) {
        std::vector<std::vector<std::vector<double>>> result;
        for (const auto& sample : node) {
            if (!sample.is_array())
                throw data_error(std::string("workload: every ") + field +
                                 " sample must be an array of timesteps");
            auto& steps = result.emplace_back();
            for (const auto& step : sample) {
                if (!step.is_array() || step.empty())
                    throw data_error(std::string("workload: every ") + field +
                                     " timestep must be a non-empty array of numbers");
                auto& values = steps.emplace_back();
                for (const auto& v : step) {
                    if (!v.is_number())
                        throw data_error(std::string("workload: non-numeric value in ") +
                                         field);
                    values.push_back(v.get<double>());
                }
            }
        }
        return result;
    };

    workload_file w;
    for (auto& sample : nested_values(j["samples"], "samples")) {
        auto& steps = w.samples.emplace_back();
        for (auto& values : sample) steps.push_back(Tensor::vec(std::move(values)));
    }
    if (w.samples.empty()) throw data_error("workload: '" + path + "' holds no samples");

    if (j.contains("targets")) {
        if (!j["targets"].is_array())
            throw data_error("workload: 'targets' must be an array");
        w.targets = nested_values(j["targets"], "targets");
    }
    if (j.contains("correctness")) {
        if (!j["correctness"].is_string())
            throw data_error("workload: 'correctness' must be a string");
        w.correctness = j["correctness"].get<std::string>();
        if (!w.targets)
            throw data_error("workload: a correctness metric needs 'targets'");
    }
    if (j.contains("stride_seconds")) {
        if (!j["stride_seconds"].is_number())
            throw data_error("workload: 'stride_seconds' must be a number");
        w.stride_seconds = j["stride_seconds"].get<double>();
    }
    return w;
}

std::string workload_to_json(const std::vector<std::vector<Tensor>>& samples) {
    ordered_json doc;
    auto& out = doc["samples"] = ordered_json::array();
    for (const auto& sample : samples) {
        auto& steps = out.emplace_back(ordered_json::array());
        for (const auto& step : sample) steps.push_back(step.data);
    }
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// mg-gen: generate and cache a chaotic series.
// ---------------------------------------------------------------------------

struct mg_gen_options {
    double tau = 17.0;
    std::optional<int> lyapunov_time;
    std::optional<double> x0;
    double dt = 0.1;
    int duration = 50;
    std::string out;
};

mg_params resolve_mg_params(double tau, const std::optional<int>& lyapunov_time,
                            const std::optional<double>& x0, double dt) {
    const int tau_int = static_cast<int>(std::llround(tau));
    const bool canonical = tau == static_cast<double>(tau_int) &&
                           mg_tau_table().count(tau_int) != 0;
    mg_params params;
    if (canonical) {
        params = mg_params_for_tau(tau_int, dt);
    } else {
        if (!lyapunov_time)
            throw data_error("mg-gen: delay " + format_double(tau) +
                             " has no table entry; pass --lyapunov-time (and usually --x0)");
        params.tau = tau;
        params.dt_int = dt;
    }
    if (lyapunov_time) params.lyapunov_time = *lyapunov_time;
    if (x0) params.x0 = *x0;
    params.validate();
    return params;
}

void run_mg_gen(const mg_gen_options& opt) {
    const auto params = resolve_mg_params(opt.tau, opt.lyapunov_time, opt.x0, opt.dt);
    const auto series = integrate_mg(params, opt.duration);

    const int tau_int = static_cast<int>(std::llround(opt.tau));
    const std::string tau_text = opt.tau == static_cast<double>(tau_int)
                                     ? std::to_string(tau_int)
                                     : format_double(opt.tau);
    std::string path = opt.out;
    if (path.empty()) path = data_dir() + "/mg_tau" + tau_text + ".csv";
    save_series_csv(path, series);
    std::cout << "wrote " << path << ": " << series.values.size() << " samples ("
              << series.total_lyapunov_times << " Lyapunov times of "
              << params.lyapunov_time << " time units, x0 "
              << format_double(params.x0) << ")\n";
}

// ---------------------------------------------------------------------------
// bench chaotic: the forecasting protocol with an echo-state baseline.
// ---------------------------------------------------------------------------

struct chaotic_options {
    int tau = 17;
    std::string model = "esn";
    int instances = 30;
    std::uint64_t seed = 0;
    esn_config esn;
    std::string series_path;
    int duration = 0;  ///< 0 = shortest series covering the instances
    std::string out;
    std::string save_model_path;
    std::string save_workload_path;
};

/// Samples needed by `count` half-overlapping 1501-point windows.
int required_duration(int count) {
    const auto last_start = static_cast<long long>(std::llround((count - 1) * 37.5));
    const auto samples = last_start + 1501;
    return static_cast<int>((samples - 1 + 74) / 75);
}

mg_series resolve_series(const chaotic_options& opt) {
    const int needed = required_duration(opt.instances);
    std::string path = opt.series_path;
    if (path.empty()) {
        const auto cached = data_dir() + "/mg_tau" + std::to_string(opt.tau) + ".csv";
        if (std::filesystem::exists(cached)) path = cached;
    }
    if (!path.empty()) {
        auto series = load_series_csv(path);
        if (series.params.tau != static_cast<double>(opt.tau))
            throw data_error("bench: series file '" + path + "' holds tau " +
                             format_double(series.params.tau) + ", not " +
                             std::to_string(opt.tau));
        if (series.total_lyapunov_times < needed)
            throw data_error("bench: series file '" + path + "' covers " +
                             std::to_string(series.total_lyapunov_times) +
                             " Lyapunov times but " + std::to_string(opt.instances) +
                             " instances need " + std::to_string(needed) +
                             "; regenerate with mg-gen --duration " +
                             std::to_string(needed));
        return series;
    }
    const int duration = opt.duration > 0 ? opt.duration : needed;
    return integrate_mg(mg_params_for_tau(opt.tau), duration);
}

void run_bench_chaotic(const chaotic_options& opt) {
    if (opt.model != "esn")
        throw data_error("bench: unknown model '" + opt.model + "' (available: esn)");
    const auto series = resolve_series(opt);
    const auto result = run_esn_chaotic_benchmark(series, opt.instances, opt.esn, opt.seed);

    ordered_json doc;
    doc["provenance"] = provenance_object(
        "bench chaotic",
        {{"tau", std::to_string(opt.tau)},
         {"model", opt.model},
         {"instances", std::to_string(opt.instances)},
         {"seed", std::to_string(opt.seed)},
         {"reservoir_dim", std::to_string(opt.esn.reservoir_dim)},
         {"p_conn", format_double(opt.esn.p_conn)},
         {"alpha", format_double(opt.esn.alpha)},
         {"gamma", format_double(opt.esn.gamma)},
         {"beta_in", format_double(opt.esn.beta_in)},
         {"rho_target", format_double(opt.esn.rho_target)},
         {"lambda", format_double(opt.esn.lambda)},
         {"washout", std::to_string(opt.esn.washout)}});
    doc["tau"] = opt.tau;
    doc["lyapunov_time"] = series.params.lyapunov_time;
    doc["instances"] = opt.instances;
    doc["instance_smape"] = result.scores.instance_smape;
    doc["mean_smape"] = result.scores.mean_smape;
    doc["any_diverged"] = result.any_diverged;
    doc["metrics"] = ordered_json::parse(report_to_json(result.report));
    emit(opt.out, doc.dump(2) + "\n", "forecast report");

    if (!opt.save_model_path.empty())
        save_model(opt.save_model_path, esn_to_model_desc(result.final_model));
    if (!opt.save_workload_path.empty()) {
        // The instrumentation inputs of the final instance: its evaluation
        // window, teacher forced, one [1, x] vector per step.
        const auto windows = make_instances(series, opt.instances);
        std::vector<std::vector<Tensor>> samples(1);
        for (double v : windows.back().eval)
            samples[0].push_back(Tensor::vec({1.0, v}));
        write_text_file(opt.save_workload_path, workload_to_json(samples));
    }
}

// ---------------------------------------------------------------------------
// bench fscil: class-incremental sessions over embeddings.
// ---------------------------------------------------------------------------

struct fscil_options {
    std::string embeddings;
    std::size_t dim = 16;
    int samples_per_class = 15;
    double separation = 12.0;
    double min_distance = 10.0;
    double noise = 0.3;
    int base = 20;
    int sessions = 5;
    int ways = 10;
    int shots = 5;
    int eval = 5;
    std::string mode = "both";
    bool temporal = false;
    std::uint64_t seed = 0;
    std::string out;
};

ordered_json fscil_result_json(const fscil_result& r) {
    ordered_json j;
    auto& sessions = j["sessions"] = ordered_json::array();
    for (const auto& s : r.sessions) {
        ordered_json row;
        row["session"] = s.session;
        row["accuracy_all"] = s.accuracy_all;
        row["accuracy_new"] = s.accuracy_new;
        row["classifier_rows"] = s.classifier_rows;
        sessions.push_back(std::move(row));
    }
    j["mean_accuracy_all"] = r.mean_accuracy_all;
    return j;
}

void run_bench_fscil(const fscil_options& opt) {
    if (opt.mode != "prototypical" && opt.mode != "frozen" && opt.mode != "both")
        throw data_error("bench: mode must be prototypical, frozen, or both");

    embedding_dataset ds;
    if (opt.embeddings.empty()) {
        ds = synthetic_clusters(opt.base + opt.sessions * opt.ways, opt.dim,
                                opt.samples_per_class, opt.separation,
                                opt.min_distance, opt.noise, opt.seed);
    } else {
        ds = load_embedding_csv(opt.embeddings);
    }
    const auto plan =
        make_session_plan(ds, opt.base, opt.sessions, opt.ways, opt.shots, opt.eval);

    ordered_json doc;
    doc["provenance"] = provenance_object(
        "bench fscil",
        {{"embeddings", opt.embeddings.empty() ? "synthetic" : opt.embeddings},
         {"base", std::to_string(opt.base)},
         {"sessions", std::to_string(opt.sessions)},
         {"ways", std::to_string(opt.ways)},
         {"shots", std::to_string(opt.shots)},
         {"eval_per_class", std::to_string(opt.eval)},
         {"mode", opt.mode},
         {"seed", std::to_string(opt.seed)}});
    doc["base_classes"] = plan.base_classes.size();
    doc["sessions"] = plan.incremental.size();
    doc["shots"] = plan.shots;

    auto& results = doc["results"];
    if (opt.mode != "frozen")
        results["prototypical"] = fscil_result_json(run_fscil(
            ds, plan, fscil_mode::prototypical, identity_extractor(), opt.temporal));
    if (opt.mode != "prototypical")
        results["frozen"] = fscil_result_json(run_fscil(
            ds, plan, fscil_mode::frozen, identity_extractor(), opt.temporal));
    emit(opt.out, doc.dump(2) + "\n", "session report");
}

// ---------------------------------------------------------------------------
// bench qubo: solver sweep against reference costs.
// ---------------------------------------------------------------------------

struct qubo_options {
    std::vector<std::size_t> sizes{10, 25, 50, 100, 250};
    std::vector<double> densities{0.01, 0.05, 0.10, 0.25};
    std::string seeds = "0..4";
    std::vector<double> timeouts{1.0};
    std::optional<std::uint64_t> iteration_budget;
    std::vector<std::string> solvers{"sa", "tabu"};
    std::string bks_path;
    std::string save_bks_path;
    std::string format = "csv";
    std::string out;
    int jobs = 1;
};

/// One benchmark cell as a single-entry config, so parallel execution reuses
/// the sequential runner unchanged.
std::vector<qubo_benchmark_config> enumerate_cells(const qubo_benchmark_config& cfg) {
    std::vector<qubo_benchmark_config> cells;
    for (const auto& solver : cfg.solvers)
        for (std::size_t n : cfg.sizes)
            for (double density : cfg.densities)
                for (std::uint64_t seed : cfg.seeds) {
                    qubo_benchmark_config cell = cfg;
                    cell.solvers = {solver};
                    cell.sizes = {n};
                    cell.densities = {density};
                    cell.seeds = {seed};
                    cells.push_back(std::move(cell));
                }
    return cells;
}

qubo_benchmark_result run_cells_parallel(const qubo_benchmark_config& cfg,
                                         const bks_table& bks, int jobs) {
    const auto cells = enumerate_cells(cfg);
    std::vector<qubo_benchmark_result> partial(cells.size());
    std::vector<std::string> failures(cells.size());
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size();
             i = next.fetch_add(1)) {
            try {
                partial[i] = run_qubo_benchmark(cells[i], bks);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs),
                                               std::max<std::size_t>(cells.size(), 1));
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    qubo_benchmark_result result;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!failures[i].empty()) throw data_error(failures[i]);
        auto& p = partial[i];
        result.runs.insert(result.runs.end(), std::make_move_iterator(p.runs.begin()),
                           std::make_move_iterator(p.runs.end()));
        result.gaps.insert(result.gaps.end(), p.gaps.begin(), p.gaps.end());
        result.bks_costs.insert(result.bks_costs.end(), p.bks_costs.begin(),
                                p.bks_costs.end());
    }
    return result;
}

void run_bench_qubo(const qubo_options& opt) {
    if (opt.format != "csv" && opt.format != "json")
        throw data_error("bench: format must be csv or json");

    qubo_benchmark_config cfg;
    cfg.sizes = opt.sizes;
    cfg.densities = opt.densities;
    cfg.seeds = parse_seed_list(opt.seeds);
    cfg.timeouts_s = opt.timeouts;
    cfg.iteration_budget = opt.iteration_budget;
    cfg.solvers = opt.solvers;

    const bks_table bks = opt.bks_path.empty()
                              ? compute_bks(cfg.sizes, cfg.densities, cfg.seeds)
                              : load_bks_csv(opt.bks_path);
    if (!opt.save_bks_path.empty()) save_bks_csv(opt.save_bks_path, bks);

    const auto result = opt.jobs > 1 ? run_cells_parallel(cfg, bks, opt.jobs)
                                     : run_qubo_benchmark(cfg, bks);

    if (opt.format == "csv") {
        emit(opt.out, qubo_report_csv(result), "solver report");
        return;
    }
    ordered_json doc;
    doc["provenance"] = provenance_object(
        "bench qubo",
        {{"seeds", opt.seeds},
         {"stop", opt.iteration_budget
                      ? "budget " + std::to_string(*opt.iteration_budget)
                      : "timeout"},
         {"solvers", opt.solvers.size() == 2 ? "sa,tabu" : opt.solvers.front()},
         {"bks", opt.bks_path.empty() ? "computed" : opt.bks_path}});
    auto& rows = doc["rows"] = ordered_json::array();
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        const auto& run = result.runs[i];
        ordered_json row;
        row["solver"] = run.solver;
        row["n"] = run.n;
        row["density"] = run.density;
        row["seed"] = run.seed;
        if (run.timeout_seconds)
            row["timeout_s"] = *run.timeout_seconds;
        else
            row["timeout_s"] = nullptr;
        row["best_cost"] = run.best_cost;
        row["bks_cost"] = result.bks_costs[i];
        row["bks_gap"] = result.gaps[i];
        row["iterations"] = run.iterations;
        rows.push_back(std::move(row));
    }
    emit(opt.out, doc.dump(2) + "\n", "solver report");
}

// ---------------------------------------------------------------------------
// analyze: complexity metrics for a stored model, optionally replayed over a
// workload file.
// ---------------------------------------------------------------------------

struct analyze_options {
    std::string model_path;
    std::string workload_path;
    std::string out;
};

void run_analyze(const analyze_options& opt) {
    const auto desc = load_model(opt.model_path);
    auto graph = build_model(desc);

    metrics_report report;
    if (opt.workload_path.empty()) {
        report = static_report(graph);
    } else {
        const auto workload = load_workload_file(opt.workload_path);
        model_runner runner(std::move(graph));
        const auto executed = run_workload(runner, workload.samples);
        report = full_report(runner.graph(), executed.trace);

        if (workload.correctness) {
            std::vector<double> predicted;
            for (const auto& sample : executed.outputs)
                for (const auto& step : sample)
                    predicted.insert(predicted.end(), step.data.begin(), step.data.end());
            std::vector<double> truth;
            for (const auto& sample : *workload.targets)
                for (const auto& step : sample)
                    truth.insert(truth.end(), step.begin(), step.end());
            if (*workload.correctness == "smape")
                report.correctness_value = smape(predicted, truth);
            else if (*workload.correctness == "r_squared")
                report.correctness_value = r_squared(predicted, truth);
            else
                throw data_error("workload: unknown correctness metric '" +
                                 *workload.correctness + "' (smape, r_squared)");
            report.correctness_name = *workload.correctness;
        }
        if (workload.stride_seconds)
            report.execution_rate_hz = execution_rate_hz(*workload.stride_seconds);
    }
    emit(opt.out, report_to_json(report), "metrics report");
}

}  // namespace

// ---------------------------------------------------------------------------
// Entry point: subcommand wiring and the exit-code contract
// (0 success, 2 usage, 3 bad data, 4 numerical failure).
// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{"spikemark: deterministic benchmarks for spiking and reservoir models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("spikemark ") + version_string +
                                          " (prng " + prng_id + ")");
    int jobs = 1;
    app.add_option("--jobs", jobs,
                   "worker threads for independent solver cells (bench qubo)")
        ->check(CLI::Range(1, 512));

    // mg-gen ---------------------------------------------------------------
    mg_gen_options mg;
    auto* mg_gen = app.add_subcommand("mg-gen", "generate and cache a chaotic series");
    mg_gen->add_option("--tau", mg.tau, "delay; integer 17..30 selects the canonical table")
        ->capture_default_str();
    mg_gen->add_option("--lyapunov-time", mg.lyapunov_time,
                       "Lyapunov time in time units (required off-table)");
    mg_gen->add_option("--x0", mg.x0, "constant initial history (default: table value)");
    mg_gen->add_option("--dt", mg.dt, "internal integration step")->capture_default_str();
    mg_gen->add_option("--duration", mg.duration, "series length in Lyapunov times")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    mg_gen->add_option("--out", mg.out,
                       "output path (default: $NEUROBENCH_DATA_DIR/mg_tau<tau>.csv)");
    mg_gen->callback([&] { run_mg_gen(mg); });

    // bench ----------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "run a benchmark task");
    bench->require_subcommand(1);

    chaotic_options chaotic;
    auto* bench_chaotic =
        bench->add_subcommand("chaotic", "forecasting of the chaotic series");
    bench_chaotic->add_option("--tau", chaotic.tau, "canonical delay, 17..30")
        ->check(CLI::Range(17, 30))
        ->capture_default_str();
    bench_chaotic->add_option("--model", chaotic.model, "forecasting model")
        ->capture_default_str();
    bench_chaotic->add_option("--instances", chaotic.instances,
                              "half-overlapping train/eval windows")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_chaotic->add_option("--seed", chaotic.seed, "base seed; instance i derives seed i")
        ->capture_default_str();
    bench_chaotic->add_option("--reservoir-dim", chaotic.esn.reservoir_dim, "reservoir units")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_chaotic->add_option("--p-conn", chaotic.esn.p_conn, "recurrent connection probability")
        ->capture_default_str();
    bench_chaotic->add_option("--alpha", chaotic.esn.alpha, "leak rate")
        ->capture_default_str();
    bench_chaotic->add_option("--gamma", chaotic.esn.gamma, "recurrent gain")
        ->capture_default_str();
    bench_chaotic->add_option("--beta-in", chaotic.esn.beta_in, "input gain")
        ->capture_default_str();
    bench_chaotic->add_option("--rho", chaotic.esn.rho_target, "target spectral radius")
        ->capture_default_str();
    bench_chaotic->add_option("--lambda", chaotic.esn.lambda, "ridge regularization")
        ->capture_default_str();
    bench_chaotic->add_option("--washout", chaotic.esn.washout, "discarded warmup steps")
        ->capture_default_str();
    bench_chaotic->add_option("--series", chaotic.series_path,
                              "series cache file (default: look up the data dir, else integrate)");
    bench_chaotic->add_option("--duration", chaotic.duration,
                              "Lyapunov times to integrate when no cache is used (0 = minimum)");
    bench_chaotic->add_option("--out", chaotic.out, "report path (default: stdout)");
    bench_chaotic->add_option("--save-model", chaotic.save_model_path,
                              "also store the final trained model (layer-graph JSON)");
    bench_chaotic->add_option("--save-workload", chaotic.save_workload_path,
                              "also store its evaluation inputs as an analyze workload");
    bench_chaotic->callback([&] { run_bench_chaotic(chaotic); });

    fscil_options fscil;
    auto* bench_fscil =
        bench->add_subcommand("fscil", "few-shot class-incremental sessions");
    bench_fscil->add_option("--embeddings", fscil.embeddings,
                            "embedding CSV (default: seeded synthetic clusters)");
    bench_fscil->add_option("--dim", fscil.dim, "synthetic embedding dimension")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_fscil
        ->add_option("--samples-per-class", fscil.samples_per_class,
                     "synthetic samples per class")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_fscil->add_option("--separation", fscil.separation, "synthetic centroid box half-width")
        ->capture_default_str();
    bench_fscil
        ->add_option("--min-distance", fscil.min_distance,
                     "minimum synthetic centroid distance")
        ->capture_default_str();
    bench_fscil->add_option("--noise", fscil.noise, "synthetic sample noise sigma")
        ->capture_default_str();
    bench_fscil->add_option("--base", fscil.base, "base-session classes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_fscil->add_option("--sessions", fscil.sessions, "incremental sessions")
        ->capture_default_str();
    bench_fscil->add_option("--ways", fscil.ways, "new classes per session")
        ->capture_default_str();
    bench_fscil->add_option("--shots", fscil.shots, "training samples per new class")
        ->capture_default_str();
    bench_fscil->add_option("--eval", fscil.eval, "evaluation samples per class")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_fscil->add_option("--mode", fscil.mode, "prototypical | frozen | both")
        ->capture_default_str();
    bench_fscil->add_flag("--temporal", fscil.temporal,
                          "treat samples as timestep sequences");
    bench_fscil->add_option("--seed", fscil.seed, "synthetic data seed")
        ->capture_default_str();
    bench_fscil->add_option("--out", fscil.out, "report path (default: stdout)");
    bench_fscil->callback([&] { run_bench_fscil(fscil); });

    qubo_options qubo;
    auto* bench_qubo =
        bench->add_subcommand("qubo", "independent-set solver sweep");
    bench_qubo->add_option("--n", qubo.sizes, "workload sizes")
        ->delimiter(',')
        ->capture_default_str();
    bench_qubo->add_option("--density", qubo.densities, "edge densities")
        ->delimiter(',')
        ->capture_default_str();
    bench_qubo->add_option("--seeds", qubo.seeds, "seed range a..b or comma list")
        ->capture_default_str();
    bench_qubo->add_option("--timeout", qubo.timeouts, "wall-clock budget per run, seconds")
        ->delimiter(',')
        ->capture_default_str();
    bench_qubo->add_option("--iters-mode", qubo.iteration_budget,
                           "deterministic mode: fixed iteration budget (overrides timeouts)");
    bench_qubo->add_option("--solvers", qubo.solvers, "subset of sa,tabu")
        ->delimiter(',')
        ->capture_default_str();
    bench_qubo->add_option("--bks", qubo.bks_path,
                           "reference-cost CSV (default: compute exactly / by long tabu)");
    bench_qubo->add_option("--save-bks", qubo.save_bks_path,
                           "store the reference-cost table in use");
    bench_qubo->add_option("--format", qubo.format, "csv | json")->capture_default_str();
    bench_qubo->add_option("--out", qubo.out, "report path (default: stdout)");
    bench_qubo->callback([&] {
        qubo.jobs = jobs;
        run_bench_qubo(qubo);
    });

    // analyze --------------------------------------------------------------
    analyze_options analyze;
    auto* analyze_cmd = app.add_subcommand(
        "analyze", "complexity metrics for a stored model (static, or replayed)");
    analyze_cmd->add_option("--model", analyze.model_path, "model JSON")->required();
    analyze_cmd->add_option("--workload", analyze.workload_path,
                            "workload JSON to replay (omit for static-only)");
    analyze_cmd->add_option("--out", analyze.out, "report path (default: stdout)");
    analyze_cmd->callback([&] { run_analyze(analyze); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const spikemark::data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const spikemark::numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
