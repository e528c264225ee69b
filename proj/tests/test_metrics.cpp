#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracle.hpp"
#include "spikemark/errors.hpp"
#include "spikemark/metrics.hpp"
#include "spikemark/model.hpp"

using namespace spikemark;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

model_desc linear_3_to_2_biased() {
    model_desc d;
    d.input_dim = 3;
    linear_spec lin;
    lin.in = 3;
    lin.out = 2;
    lin.weight = {1, 2, 3, 4, 5, 6};
    lin.bias = {1, 1};
    layer_spec l;
    l.name = "fc";
    l.op = lin;
    d.layers.push_back(l);
    return d;
}

layer_spec linear_layer(const std::string& name, std::size_t in, std::size_t out,
                        std::vector<double> w) {
    linear_spec lin;
    lin.in = in;
    lin.out = out;
    lin.weight = std::move(w);
    layer_spec l;
    l.name = name;
    l.op = lin;
    return l;
}

layer_spec relu_layer(const std::string& name, std::size_t size) {
    relu_spec r;
    r.size = size;
    layer_spec l;
    l.name = name;
    l.op = r;
    return l;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("footprint counts parameters at the declared precision") {
    // 3*2 weights + 2 biases = 8 values at 4 bytes.
    const auto g = build_model(linear_3_to_2_biased());
    CHECK(footprint_bytes(g) == 32);
}

TEST_CASE("footprint includes registered state and extra buffers") {
    auto d = linear_3_to_2_biased();
    d.extra_buffers.push_back({"bins", 2});
    CHECK(footprint_bytes(build_model(d)) == 40);
}

TEST_CASE("footprint counts zero weights like any other value") {
    model_desc d;
    d.input_dim = 4;
    d.layers.push_back(linear_layer("fc", 4, 4, std::vector<double>(16, 0.0)));
    CHECK(footprint_bytes(build_model(d)) == 64);
}

TEST_CASE("footprint scales with the declared precision") {
    auto d = linear_3_to_2_biased();
    d.precision_bytes = 8;
    CHECK(footprint_bytes(build_model(d)) == 64);
}

TEST_CASE("footprint counts neuron parameter storage as laid out") {
    model_desc d;
    d.input_dim = 2;
    neuron_spec n;
    n.model = neuron_model::lif_delayed_reset;
    n.size = 2;
    n.beta = param_vec(std::vector<double>{0.9, 0.8});  // two stored values
    n.v_th = 1.0;                                       // one shared value
    n.v_reset = 0.0;                                    // one shared value
    layer_spec l;
    l.name = "spikes";
    l.op = n;
    d.layers.push_back(l);
    const auto g = build_model(d);
    // Parameters: 2 + 1 + 1 = 4 values; state: u and s, 2 each.
    CHECK(parameter_count(g) == 4);
    CHECK(buffer_element_count(g) == 4);
    CHECK(footprint_bytes(g) == (4 + 4) * 4);
}

TEST_CASE("connection sparsity counts zero weights over linear layers only") {
    model_desc d;
    d.input_dim = 2;
    d.layers.push_back(linear_layer("a", 2, 2, {1, 0, 0, 2}));
    d.layers.push_back(linear_layer("b", 2, 1, {3, 4}));
    CHECK(connection_sparsity(build_model(d)) == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("connection sparsity ignores biases") {
    model_desc d;
    d.input_dim = 2;
    linear_spec lin;
    lin.in = 2;
    lin.out = 2;
    lin.weight = {1, 1, 1, 1};
    lin.bias = {0, 0};  // zeros here must not count
    layer_spec l;
    l.name = "fc";
    l.op = lin;
    d.layers.push_back(l);
    CHECK(connection_sparsity(build_model(d)) == 0.0);
}

TEST_CASE("connection sparsity is an error for weightless models") {
    model_desc d;
    d.input_dim = 2;
    d.layers.push_back(relu_layer("act", 2));
    CHECK_THROWS_AS(connection_sparsity(build_model(d)), data_error);
}

TEST_CASE("activation sparsity is the zero fraction over activation outputs") {
    model_desc d;
    d.input_dim = 2;
    d.layers.push_back(relu_layer("act", 2));
    model_runner runner(build_model(d));
    const auto r1 = runner.forward({Tensor::vec({0.0, 1.0})});
    const auto r2 = runner.forward({Tensor::vec({-3.0, -4.0})});
    execution_trace tr;
    tr.samples.push_back({r1.trace});
    tr.samples.push_back({r2.trace});
    // Outputs [0,1] and [0,0]: 3 zeros of 4.
    CHECK(activation_sparsity(runner.graph(), tr) == doctest::Approx(0.75));
}

TEST_CASE("activation sparsity skips linear and readout outputs") {
    model_desc d;
    d.input_dim = 1;
    d.layers.push_back(linear_layer("fc", 1, 1, {0.0}));  // output always 0
    d.layers.push_back(relu_layer("act", 1));
    neuron_spec leak;
    leak.model = neuron_model::leaky_readout;
    leak.size = 1;
    leak.beta = 0.5;
    layer_spec ol;
    ol.name = "readout";
    ol.op = leak;
    d.layers.push_back(ol);
    model_runner runner(build_model(d));
    const auto res = runner.forward({Tensor::vec({5.0})});
    execution_trace tr;
    tr.samples.push_back({res.trace});
    // Only the relu output (one zero value) counts: sparsity 1, not diluted
    // by the zero linear output or the readout value.
    CHECK(activation_sparsity(runner.graph(), tr) == doctest::Approx(1.0));
}

TEST_CASE("activation sparsity requires at least one activation layer") {
    const auto g = build_model(linear_3_to_2_biased());
    model_runner runner(g);
    const auto res = runner.forward({Tensor::vec({1.0, 2.0, 3.0})});
    execution_trace tr;
    tr.samples.push_back({res.trace});
    CHECK_THROWS_AS(activation_sparsity(runner.graph(), tr), data_error);
}

TEST_CASE("synaptic ops: dense counts all pairs, effective skips zeros") {
    model_desc d;
    d.input_dim = 2;
    d.layers.push_back(linear_layer("fc", 2, 2, {1, 0, 2, 3}));
    model_runner runner(build_model(d));
    const auto res = runner.forward({Tensor::vec({0.0, 5.0})});
    execution_trace tr;
    tr.samples.push_back({res.trace});
    const auto ops = synaptic_ops(runner.graph(), tr);
    CHECK(ops.totals.dense == doctest::Approx(4.0));
    // Input 0 kills column 0; column 1 has one nonzero weight (w11=3)...
    // plus w01=0 excluded: exactly 1 multiply-accumulate.
    CHECK(ops.totals.eff_mac == doctest::Approx(1.0));
    CHECK(ops.totals.eff_ac == doctest::Approx(0.0));
    REQUIRE(ops.per_layer.size() == 1);
    CHECK_FALSE(ops.per_layer[0].accumulate_only);
}

TEST_CASE("synaptic ops: binary inputs make a layer accumulate-only") {
    model_desc d;
    d.input_dim = 2;
    d.layers.push_back(linear_layer("fc", 2, 2, {1, 1, 1, 1}));
    model_runner runner(build_model(d));
    const auto res = runner.forward({Tensor::vec({1.0, 0.0})});
    execution_trace tr;
    tr.samples.push_back({res.trace});
    const auto ops = synaptic_ops(runner.graph(), tr);
    CHECK(ops.totals.dense == doctest::Approx(4.0));
    CHECK(ops.totals.eff_ac == doctest::Approx(2.0));
    CHECK(ops.totals.eff_mac == doctest::Approx(0.0));
    CHECK(ops.per_layer[0].accumulate_only);
}

TEST_CASE("synaptic ops: one real-valued input anywhere forces multiply mode") {
    model_desc d;
    d.input_dim = 1;
    d.layers.push_back(linear_layer("fc", 1, 1, {1.0}));
    model_runner runner(build_model(d));
    std::vector<std::vector<Tensor>> samples{
        {Tensor::vec({1.0}), Tensor::vec({-1.0}), Tensor::vec({0.5})}};
    const auto wl = run_workload(runner, samples);
    const auto ops = synaptic_ops(runner.graph(), wl.trace);
    // The 0.5 at one timestep reclassifies the whole layer for the whole run.
    CHECK(ops.per_layer[0].accumulate_only == false);
    CHECK(ops.totals.eff_mac > 0.0);
    CHECK(ops.totals.eff_ac == 0.0);
}

TEST_CASE("synaptic ops average over every executed timestep") {
    model_desc d;
    d.input_dim = 1;
    d.layers.push_back(linear_layer("fc", 1, 2, {1.0, 1.0}));
    model_runner runner(build_model(d));
    std::vector<std::vector<Tensor>> samples{
        {Tensor::vec({1.0}), Tensor::vec({0.0})},  // 2 then 0 effective
        {Tensor::vec({0.0}), Tensor::vec({0.0})},  // nothing
    };
    const auto wl = run_workload(runner, samples);
    const auto ops = synaptic_ops(runner.graph(), wl.trace);
    CHECK(ops.totals.dense == doctest::Approx(2.0));
    CHECK(ops.totals.eff_ac == doctest::Approx(0.5));  // 2 ops over 4 steps
}

TEST_CASE("symmetric error percentage of a single bad prediction is 100") {
    CHECK(smape(std::vector<double>{3.0}, std::vector<double>{1.0}) ==
          doctest::Approx(100.0));
}

TEST_CASE("symmetric error treats non-finite predictions as total misses") {
    CHECK(smape(std::vector<double>{kNan}, std::vector<double>{1.0}) ==
          doctest::Approx(200.0));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(smape(std::vector<double>{inf, 1.0}, std::vector<double>{1.0, 1.0}) ==
          doctest::Approx(100.0));
}

TEST_CASE("symmetric error of matching zeros is zero") {
    CHECK(smape(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0}) ==
          doctest::Approx(0.0));
}

TEST_CASE("symmetric error agrees with a direct transcription on random data") {
    std::vector<double> pred, truth;
    for (int i = 0; i < 100; ++i) {
        pred.push_back(std::sin(0.3 * i) * 2.0 - 0.4);
        truth.push_back(std::cos(0.2 * i) + 0.1);
    }
    CHECK(smape(pred, truth) == doctest::Approx(oracle::smape(pred, truth)).epsilon(1e-12));
}

TEST_CASE("symmetric error rejects empty and mismatched spans") {
    CHECK_THROWS_AS(smape(std::vector<double>{}, std::vector<double>{}), data_error);
    CHECK_THROWS_AS(smape(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                    data_error);
}

TEST_CASE("coefficient of determination of a near fit is one half") {
    CHECK(r_squared(std::vector<double>{1, 2, 4}, std::vector<double>{1, 2, 3}) ==
          doctest::Approx(0.5));
}

TEST_CASE("coefficient of determination is exactly one for a perfect fit") {
    CHECK(r_squared(std::vector<double>{5, -1, 2}, std::vector<double>{5, -1, 2}) ==
          doctest::Approx(1.0));
}

TEST_CASE("coefficient of determination rejects degenerate targets") {
    CHECK_THROWS_AS(r_squared(std::vector<double>{1.0}, std::vector<double>{1.0}),
                    data_error);
    CHECK_THROWS_AS(r_squared(std::vector<double>{1, 2}, std::vector<double>{3, 3}),
                    data_error);
}

TEST_CASE("coefficient of determination matches the direct formula") {
    std::vector<double> pred, truth;
    for (int i = 0; i < 50; ++i) {
        truth.push_back(0.7 * i + 1.0);
        pred.push_back(0.7 * i + 1.0 + std::sin(i));
    }
    CHECK(r_squared(pred, truth) ==
          doctest::Approx(oracle::r_squared(pred, truth)).epsilon(1e-12));
}

TEST_CASE("accuracy is the exact match fraction") {
    CHECK(accuracy(std::vector<int>{1, 2, 3, 4}, std::vector<int>{1, 2, 0, 4}) ==
          doctest::Approx(0.75));
    CHECK_THROWS_AS(accuracy(std::vector<int>{}, std::vector<int>{}), data_error);
}

TEST_CASE("execution rate is the reciprocal stride") {
    CHECK(execution_rate_hz(0.05) == doctest::Approx(20.0));
    CHECK(execution_rate_hz(0.005) == doctest::Approx(200.0));
    CHECK(execution_rate_hz(1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(execution_rate_hz(0.0), data_error);
    CHECK_THROWS_AS(execution_rate_hz(-1.0), data_error);
}

TEST_CASE("static report carries footprint and sparsity, leaves the rest null") {
    const auto g = build_model(linear_3_to_2_biased());
    const auto rep = static_report(g);
    CHECK(rep.footprint_bytes == 32);
    CHECK(rep.connection_sparsity == 0.0);
    CHECK_FALSE(rep.activation_sparsity.has_value());
    CHECK_FALSE(rep.synops_dense.has_value());
    CHECK_FALSE(rep.correctness_value.has_value());
}

TEST_CASE("full report fills the workload fields from the trace") {
    model_desc d;
    d.input_dim = 2;
    d.layers.push_back(linear_layer("fc", 2, 2, {1, 0, 2, 3}));
    d.layers.push_back(relu_layer("act", 2));
    model_runner runner(build_model(d));
    std::vector<std::vector<Tensor>> samples{{Tensor::vec({0.0, 5.0})}};
    const auto wl = run_workload(runner, samples);
    const auto rep = full_report(runner.graph(), wl.trace);
    CHECK(rep.synops_dense.has_value());
    CHECK(*rep.synops_dense == doctest::Approx(4.0));
    CHECK(*rep.synops_eff_mac == doctest::Approx(1.0));
    CHECK(rep.activation_sparsity.has_value());
}

}  // TEST_SUITE
