#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "spikemark/tensor.hpp"

namespace spikemark {

/// Where a linear layer's multiplied input comes from.
enum class linear_input : std::uint8_t {
    chain,             ///< the running chain value (model input for the first layer)
    feedback,          ///< previous-timestep output of a downstream layer; W·fb is added to the chain
    chain_with_input,  ///< current model input prepended to the chain value: W·[x(t); chain]
};

struct linear_spec {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weight;  ///< out × in, row-major
    std::vector<double> bias;    ///< empty or length out
    linear_input input = linear_input::chain;
    std::string feedback_of;     ///< target layer name when input == feedback
};

/// Frozen per-channel scale/shift; stands in for normalization layers at inference.
struct affine_spec {
    std::vector<double> scale;
    std::vector<double> shift;
};

struct relu_spec {
    std::size_t size = 0;
};

enum class neuron_model : std::uint8_t {
    lif_delayed_reset,   ///< reset applied the step after a spike; strict > threshold
    lif_decay_to_input,  ///< potential decays toward the input; same-step reset; >= threshold
    adlif,               ///< adaptive LIF with a coupled adaptation variable; >= threshold
    leaky_readout,       ///< leaky accumulator without spiking; outputs the potential
    tanh_reservoir,      ///< leaky tanh unit; the recurrent pool of an echo state network
};

/// One shared value or one value per neuron.
struct param_vec {
    std::vector<double> values;

    param_vec() = default;
    param_vec(double v) : values{v} {}
    param_vec(std::vector<double> v) : values(std::move(v)) {}

    bool empty() const { return values.empty(); }
    std::size_t size() const { return values.size(); }
    double operator()(std::size_t i) const { return values.size() == 1 ? values[0] : values[i]; }
};

struct neuron_spec {
    neuron_model model = neuron_model::lif_delayed_reset;
    std::size_t size = 0;
    param_vec beta;     ///< decay factor (delayed-reset LIF, adLIF, leaky readout)
    param_vec tau;      ///< time constant in steps (decay-to-input LIF)
    param_vec v_th;     ///< spike threshold (LIF variants)
    param_vec v_reset;  ///< reset potential (LIF variants)
    param_vec alpha;    ///< potential decay (adLIF) / leak rate (tanh reservoir)
    param_vec a;        ///< adaptation-potential coupling (adLIF)
    param_vec b;        ///< adaptation-spike coupling (adLIF)
    param_vec theta;    ///< spike threshold (adLIF)
};

struct layer_spec {
    std::string name;
    std::variant<linear_spec, affine_spec, relu_spec, neuron_spec> op;
};

struct buffer_spec {
    std::string name;
    std::size_t size = 0;
};

/// Raw model description as read from a file or assembled in code.
struct model_desc {
    std::size_t input_dim = 0;
    std::uint32_t precision_bytes = 4;
    std::vector<layer_spec> layers;
    std::vector<buffer_spec> extra_buffers;  ///< e.g. input bins; counted in the footprint
};

/// Validated description plus derived layer/buffer bookkeeping.
struct model_graph {
    std::size_t input_dim = 0;
    std::uint32_t precision_bytes = 4;
    std::vector<layer_spec> layers;
    std::vector<buffer_spec> buffers;        ///< registered state buffers, in a fixed order
    std::vector<std::size_t> layer_in;       ///< multiplied-input size per layer
    std::vector<std::size_t> layer_out;      ///< output size per layer
};

/// Validates dimensions, weights, parameters and feedback wiring.
/// Registers the state buffers every stateful layer needs. Throws data_error
/// with the offending layer named (1-based index) on any inconsistency.
model_graph build_model(const model_desc& desc);

std::size_t parameter_count(const model_graph& g);  ///< every stored numeric parameter value
std::size_t buffer_element_count(const model_graph& g);
bool layer_is_connection(const layer_spec& layer);  ///< linear layers (weights = synapses)
bool layer_is_activation(const layer_spec& layer);  ///< ReLU, spiking neurons, reservoir tanh

/// Per-layer record of what the layer consumed (the values its weights
/// multiply, for linear layers) and what it passed downstream.
struct layer_io {
    std::vector<double> input;
    std::vector<double> output;
};
struct step_trace {
    std::vector<layer_io> layers;
};
struct sample_trace {
    std::vector<step_trace> steps;
};
struct execution_trace {
    std::vector<sample_trace> samples;
};

/// Owns the mutable state of one model instance and executes it over time.
/// Not thread-safe per instance; distinct instances are independent.
class model_runner {
public:
    explicit model_runner(model_graph graph);

    const model_graph& graph() const { return graph_; }

    /// All state buffers back to zero.
    void reset_state();

    struct result {
        std::vector<Tensor> outputs;  ///< final-layer output per timestep
        sample_trace trace;
    };

    /// Runs the model over T timesteps of input, carrying state across steps.
    /// Throws data_error on shape mismatch and numeric_error (naming layer and
    /// timestep) if any intermediate value goes non-finite.
    result forward(const std::vector<Tensor>& inputs);

    std::vector<double>& buffer(const std::string& name);
    const std::vector<double>& buffer(const std::string& name) const;

private:
    model_graph graph_;
    std::map<std::string, std::vector<double>> buffers_;
    std::vector<int> feedback_source_;  ///< per layer: index of tapped layer, or -1
};

/// Resets, then runs each sample through the model, collecting one trace over
/// all samples (state is reset between samples).
struct workload_result {
    std::vector<std::vector<Tensor>> outputs;  ///< per sample, per timestep
    execution_trace trace;
};
workload_result run_workload(model_runner& runner,
                             const std::vector<std::vector<Tensor>>& samples);

}  // namespace spikemark
