#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "spikemark/errors.hpp"
#include "spikemark/model.hpp"
#include "spikemark/model_io.hpp"

using namespace spikemark;

namespace {

model_desc rich_model() {
    model_desc d;
    d.input_dim = 2;
    d.precision_bytes = 4;

    linear_spec fwd;
    fwd.in = 2;
    fwd.out = 3;
    fwd.weight = {0.1, -0.2, 0.3, 0.0, 1.5, -2.25};
    fwd.bias = {0.0, 0.5, -0.5};
    d.layers.push_back({"fwd", fwd});

    affine_spec aff;
    aff.scale = {1.0, 2.0, 3.0};
    aff.shift = {-1.0, 0.0, 1.0};
    d.layers.push_back({"norm", aff});

    linear_spec rec;
    rec.in = 3;
    rec.out = 3;
    rec.weight = std::vector<double>(9, 0.0);
    rec.weight[4] = 0.75;
    rec.input = linear_input::feedback;
    rec.feedback_of = "spikes";
    d.layers.push_back({"rec", rec});

    neuron_spec n;
    n.model = neuron_model::adlif;
    n.size = 3;
    n.alpha = param_vec(std::vector<double>{0.9, 0.8, 0.7});
    n.beta = 0.85;
    n.a = 0.1;
    n.b = 0.2;
    n.theta = 1.0;
    d.layers.push_back({"spikes", n});

    linear_spec ro;
    ro.in = 3;
    ro.out = 1;
    ro.weight = {1.0, 2.0, 3.0};
    d.layers.push_back({"readout", ro});

    neuron_spec leak;
    leak.model = neuron_model::leaky_readout;
    leak.size = 1;
    leak.beta = 0.96875;
    d.layers.push_back({"out", leak});

    d.extra_buffers.push_back({"bins", 16});
    return d;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("model_io") {

TEST_CASE("a description survives the JSON round trip exactly") {
    const auto d = rich_model();
    const auto text = model_to_json(d);
    const auto back = model_from_json(text);

    CHECK(back.input_dim == d.input_dim);
    CHECK(back.precision_bytes == d.precision_bytes);
    REQUIRE(back.layers.size() == d.layers.size());
    for (std::size_t i = 0; i < d.layers.size(); ++i)
        CHECK(back.layers[i].name == d.layers[i].name);

    const auto& rec0 = std::get<linear_spec>(d.layers[2].op);
    const auto& rec1 = std::get<linear_spec>(back.layers[2].op);
    CHECK(rec1.weight == rec0.weight);
    CHECK(rec1.input == linear_input::feedback);
    CHECK(rec1.feedback_of == "spikes");

    const auto& n0 = std::get<neuron_spec>(d.layers[3].op);
    const auto& n1 = std::get<neuron_spec>(back.layers[3].op);
    CHECK(n1.model == n0.model);
    CHECK(n1.alpha.values == n0.alpha.values);
    CHECK(n1.beta.values == n0.beta.values);

    REQUIRE(back.extra_buffers.size() == 1);
    CHECK(back.extra_buffers[0].name == "bins");
    CHECK(back.extra_buffers[0].size == 16);
}

TEST_CASE("round-tripped models execute identically") {
    model_desc d;
    d.input_dim = 1;
    linear_spec fc;
    fc.in = 1;
    fc.out = 1;
    fc.weight = {0.1 + 0.2};  // a value without a short decimal form
    d.layers.push_back({"fc", fc});

    const auto back = model_from_json(model_to_json(d));
    model_runner a(build_model(d)), b(build_model(back));
    const auto ra = a.forward({Tensor::vec({3.14159})});
    const auto rb = b.forward({Tensor::vec({3.14159})});
    CHECK(ra.outputs[0].data == rb.outputs[0].data);  // bitwise equal
}

TEST_CASE("serialization is deterministic text") {
    const auto d = rich_model();
    CHECK(model_to_json(d) == model_to_json(d));
}

TEST_CASE("file save and load round trip") {
    const auto path = temp_path("model_io_roundtrip.json");
    save_model(path, rich_model());
    const auto back = load_model(path);
    CHECK(back.layers.size() == rich_model().layers.size());
    std::filesystem::remove(path);
}

TEST_CASE("malformed documents are rejected as data errors") {
    CHECK_THROWS_AS(model_from_json("{"), data_error);
    CHECK_THROWS_AS(model_from_json("[]"), data_error);
    CHECK_THROWS_AS(model_from_json(R"({"input_dim": 1, "layers": [{"name": "x", "kind": "warp"}]})"),
                    data_error);
    CHECK_THROWS_AS(load_model("/nonexistent/path/model.json"), data_error);
}

}  // TEST_SUITE
