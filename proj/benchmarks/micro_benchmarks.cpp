#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "spikemark/mackey_glass.hpp"
#include "spikemark/metrics.hpp"
#include "spikemark/model.hpp"
#include "spikemark/neurons.hpp"
#include "spikemark/qubo.hpp"
#include "spikemark/reservoir.hpp"
#include "spikemark/rng.hpp"

namespace {

using namespace spikemark;

// ---------------------------------------------------------------------------
// Reservoir update: the inner loop of both training and forecasting.
// ---------------------------------------------------------------------------

void bm_esn_step(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    auto m = init_esn(1, dim, 0.11, 7);
    std::vector<double> r(dim, 0.0);
    const std::vector<double> f{0.5};
    for (auto _ : state) {
        esn_step(r, m.params, f);
        benchmark::DoNotOptimize(r.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(dim));
}
BENCHMARK(bm_esn_step)->Arg(64)->Arg(186)->Arg(512);

// ---------------------------------------------------------------------------
// Spiking forward pass: a small two-layer network driven by random input.
// ---------------------------------------------------------------------------

model_desc spiking_desc(std::size_t width) {
    rng256 rng(3);
    model_desc d;
    d.input_dim = width;
    d.precision_bytes = 4;

    linear_spec hidden;
    hidden.in = width;
    hidden.out = width;
    hidden.weight.resize(width * width);
    for (auto& w : hidden.weight) w = rng.normal() * 0.1;
    d.layers.push_back({"hidden", std::move(hidden)});

    neuron_spec lif;
    lif.model = neuron_model::lif_delayed_reset;
    lif.size = width;
    lif.beta = 0.9;
    lif.v_th = 1.0;
    lif.v_reset = 0.0;
    d.layers.push_back({"spikes", std::move(lif)});

    linear_spec readout;
    readout.in = width;
    readout.out = 10;
    readout.weight.resize(width * 10);
    for (auto& w : readout.weight) w = rng.normal() * 0.1;
    d.layers.push_back({"readout", std::move(readout)});
    return d;
}

void bm_spiking_forward(benchmark::State& state) {
    const auto width = static_cast<std::size_t>(state.range(0));
    model_runner runner(build_model(spiking_desc(width)));
    rng256 rng(11);
    std::vector<Tensor> steps;
    for (int t = 0; t < 16; ++t) {
        std::vector<double> v(width);
        for (auto& x : v) x = rng.normal();
        steps.push_back(Tensor::vec(std::move(v)));
    }
    for (auto _ : state) {
        runner.reset_state();
        auto out = runner.forward(steps);
        benchmark::DoNotOptimize(out.outputs.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 16);
}
BENCHMARK(bm_spiking_forward)->Arg(64)->Arg(256);

// ---------------------------------------------------------------------------
// Metric extraction from a recorded trace.
// ---------------------------------------------------------------------------

void bm_synaptic_ops(benchmark::State& state) {
    const std::size_t width = 128;
    auto g = build_model(spiking_desc(width));
    model_runner runner(g);
    rng256 rng(11);
    std::vector<std::vector<Tensor>> samples(4);
    for (auto& sample : samples)
        for (int t = 0; t < 16; ++t) {
            std::vector<double> v(width);
            for (auto& x : v) x = rng.normal();
            sample.push_back(Tensor::vec(std::move(v)));
        }
    const auto wl = run_workload(runner, samples);
    for (auto _ : state) {
        auto ops = synaptic_ops(g, wl.trace);
        benchmark::DoNotOptimize(ops.totals.dense);
    }
}
BENCHMARK(bm_synaptic_ops);

// ---------------------------------------------------------------------------
// Chaotic-series integration.
// ---------------------------------------------------------------------------

void bm_integrate_mg(benchmark::State& state) {
    const auto params = mg_params_for_tau(17);
    for (auto _ : state) {
        auto series = integrate_mg(params, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(series.values.data());
    }
}
BENCHMARK(bm_integrate_mg)->Arg(1)->Arg(5);

// ---------------------------------------------------------------------------
// Solver throughput on a midsize workload.
// ---------------------------------------------------------------------------

void bm_simulated_annealing(benchmark::State& state) {
    const auto q = build_q(generate_mis_workload(100, 0.1, 1));
    stop_condition stop;
    stop.iteration_budget = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        auto run = simulated_annealing(q, 5, sa_schedule{}, stop);
        benchmark::DoNotOptimize(run.best_cost);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            state.range(0));
}
BENCHMARK(bm_simulated_annealing)->Arg(10000);

void bm_tabu_search(benchmark::State& state) {
    const auto q = build_q(generate_mis_workload(100, 0.1, 1));
    stop_condition stop;
    stop.iteration_budget = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        auto run = tabu_search(q, 5, tabu_params{}, stop);
        benchmark::DoNotOptimize(run.best_cost);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            state.range(0));
}
BENCHMARK(bm_tabu_search)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
