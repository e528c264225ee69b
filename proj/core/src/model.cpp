#include "spikemark/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "spikemark/errors.hpp"
#include "spikemark/neurons.hpp"

namespace spikemark {

namespace {

std::string layer_label(std::size_t index, const layer_spec& layer) {
    std::ostringstream os;
    os << "layer " << (index + 1) << " ('" << layer.name << "')";
    return os.str();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw data_error("model: " + message);
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_params(const std::string& label, const char* name, const param_vec& p,
                  std::size_t size) {
    require(!p.empty(), label + ": parameter '" + std::string(name) + "' is required");
    require(p.size() == 1 || p.size() == size,
            label + ": parameter '" + std::string(name) + "' must hold one value or one per neuron");
    require(all_finite(p.values),
            label + ": parameter '" + std::string(name) + "' contains a non-finite value");
}

/// Parameter vectors a neuron model actually stores (and therefore counts).
std::vector<std::pair<const char*, const param_vec*>> used_params(const neuron_spec& n) {
    switch (n.model) {
        case neuron_model::lif_delayed_reset:
            return {{"beta", &n.beta}, {"v_th", &n.v_th}, {"v_reset", &n.v_reset}};
        case neuron_model::lif_decay_to_input:
            return {{"tau", &n.tau}, {"v_th", &n.v_th}, {"v_reset", &n.v_reset}};
        case neuron_model::adlif:
            return {{"alpha", &n.alpha}, {"beta", &n.beta}, {"a", &n.a}, {"b", &n.b},
                    {"theta", &n.theta}};
        case neuron_model::leaky_readout:
            return {{"beta", &n.beta}};
        case neuron_model::tanh_reservoir:
            return {{"alpha", &n.alpha}};
    }
    return {};
}

/// State buffers a neuron layer owns, suffixes in registration order.
std::vector<const char*> state_suffixes(neuron_model m) {
    switch (m) {
        case neuron_model::lif_delayed_reset:
            return {".u", ".s"};
        case neuron_model::lif_decay_to_input:
            return {".u"};
        case neuron_model::adlif:
            return {".u", ".w", ".s"};
        case neuron_model::leaky_readout:
            return {".u"};
        case neuron_model::tanh_reservoir:
            return {".r"};
    }
    return {};
}

/// Name of the buffer that still holds a layer's previous-step output when the
/// next step begins, or empty if no registered buffer does.
std::string output_buffer_name(const layer_spec& layer) {
    const auto* n = std::get_if<neuron_spec>(&layer.op);
    if (n == nullptr) return {};
    switch (n->model) {
        case neuron_model::lif_delayed_reset:
        case neuron_model::adlif:
            return layer.name + ".s";
        case neuron_model::leaky_readout:
            return layer.name + ".u";
        case neuron_model::tanh_reservoir:
            return layer.name + ".r";
        case neuron_model::lif_decay_to_input:
            return {};  // the potential is reset before the spike is stored
    }
    return {};
}

}  // namespace

model_graph build_model(const model_desc& desc) {
    require(!desc.layers.empty(), "a model needs at least one layer");
    require(desc.input_dim > 0, "input dimension must be positive");
    require(desc.precision_bytes > 0, "precision must be a positive byte count");

    std::set<std::string> names;
    for (std::size_t i = 0; i < desc.layers.size(); ++i) {
        const auto& layer = desc.layers[i];
        require(!layer.name.empty(), layer_label(i, layer) + ": name must not be empty");
        require(names.insert(layer.name).second,
                layer_label(i, layer) + ": duplicate layer name");
    }

    model_graph g;
    g.input_dim = desc.input_dim;
    g.precision_bytes = desc.precision_bytes;
    g.layers = desc.layers;
    g.layer_in.resize(desc.layers.size());
    g.layer_out.resize(desc.layers.size());

    // Walk the chain, checking each layer against the value it will consume.
    std::size_t chain = desc.input_dim;
    for (std::size_t i = 0; i < g.layers.size(); ++i) {
        const auto& layer = g.layers[i];
        const std::string label = layer_label(i, layer);

        if (const auto* lin = std::get_if<linear_spec>(&layer.op)) {
            require(lin->in > 0 && lin->out > 0, label + ": dimensions must be positive");
            require(lin->weight.size() == lin->in * lin->out,
                    label + ": weight count must equal out*in");
            require(lin->bias.empty() || lin->bias.size() == lin->out,
                    label + ": bias must be empty or one value per output");
            require(all_finite(lin->weight), label + ": weights contain a non-finite value");
            require(all_finite(lin->bias), label + ": bias contains a non-finite value");
            switch (lin->input) {
                case linear_input::chain:
                    require(lin->in == chain,
                            label + ": input size disagrees with the upstream output");
                    chain = lin->out;
                    break;
                case linear_input::chain_with_input:
                    require(lin->in == desc.input_dim + chain,
                            label + ": input size must cover the model input plus the chain");
                    chain = lin->out;
                    break;
                case linear_input::feedback: {
                    require(!lin->feedback_of.empty(),
                            label + ": feedback source layer is not named");
                    std::size_t target = g.layers.size();
                    for (std::size_t j = 0; j < g.layers.size(); ++j) {
                        if (g.layers[j].name == lin->feedback_of) {
                            target = j;
                            break;
                        }
                    }
                    require(target < g.layers.size(),
                            label + ": feedback source '" + lin->feedback_of + "' does not exist");
                    require(target >= i,
                            label + ": feedback must tap the layer itself or one after it");
                    // The tapped value is the target's previous-step output.
                    std::size_t target_out = 0;
                    const auto& top = g.layers[target].op;
                    if (const auto* tl = std::get_if<linear_spec>(&top))
                        target_out = tl->out;
                    else if (const auto* ta = std::get_if<affine_spec>(&top))
                        target_out = ta->scale.size();
                    else if (const auto* tr = std::get_if<relu_spec>(&top))
                        target_out = tr->size;
                    else
                        target_out = std::get<neuron_spec>(top).size;
                    require(lin->in == target_out,
                            label + ": input size disagrees with the tapped layer's output");
                    require(lin->out == chain,
                            label + ": a feedback contribution must match the chain it joins");
                    break;  // the chain width is unchanged; the product is added in
                }
            }
            g.layer_in[i] = lin->in;
            g.layer_out[i] = (lin->input == linear_input::feedback) ? chain : lin->out;
        } else if (const auto* aff = std::get_if<affine_spec>(&layer.op)) {
            require(!aff->scale.empty(), label + ": scale must not be empty");
            require(aff->scale.size() == aff->shift.size(),
                    label + ": scale and shift must have the same length");
            require(aff->scale.size() == chain,
                    label + ": channel count disagrees with the upstream output");
            require(all_finite(aff->scale) && all_finite(aff->shift),
                    label + ": parameters contain a non-finite value");
            g.layer_in[i] = chain;
            g.layer_out[i] = chain;
        } else if (const auto* rel = std::get_if<relu_spec>(&layer.op)) {
            require(rel->size == chain,
                    label + ": size disagrees with the upstream output");
            g.layer_in[i] = chain;
            g.layer_out[i] = chain;
        } else {
            const auto& n = std::get<neuron_spec>(layer.op);
            require(n.size > 0, label + ": size must be positive");
            require(n.size == chain, label + ": size disagrees with the upstream output");
            for (const auto& [pname, pvec] : used_params(n))
                check_params(label, pname, *pvec, n.size);
            g.layer_in[i] = chain;
            g.layer_out[i] = chain;
        }
    }

    // Register state buffers: per-layer neuron state first, then previous-output
    // copies for tapped layers that keep none, then caller-declared extras.
    std::set<std::string> buffer_names;
    auto add_buffer = [&](const std::string& name, std::size_t size) {
        require(buffer_names.insert(name).second, "duplicate buffer name '" + name + "'");
        require(size > 0, "buffer '" + name + "' must not be empty");
        g.buffers.push_back({name, size});
    };
    for (const auto& layer : g.layers) {
        if (const auto* n = std::get_if<neuron_spec>(&layer.op)) {
            for (const char* suffix : state_suffixes(n->model))
                add_buffer(layer.name + suffix, n->size);
        }
    }
    for (std::size_t i = 0; i < g.layers.size(); ++i) {
        const auto* lin = std::get_if<linear_spec>(&g.layers[i].op);
        if (lin == nullptr || lin->input != linear_input::feedback) continue;
        for (std::size_t j = 0; j < g.layers.size(); ++j) {
            if (g.layers[j].name != lin->feedback_of) continue;
            if (output_buffer_name(g.layers[j]).empty() &&
                buffer_names.count(g.layers[j].name + ".fb") == 0)
                add_buffer(g.layers[j].name + ".fb", g.layer_out[j]);
            break;
        }
    }
    for (const auto& extra : desc.extra_buffers) add_buffer(extra.name, extra.size);

    return g;
}

std::size_t parameter_count(const model_graph& g) {
    std::size_t count = 0;
    for (const auto& layer : g.layers) {
        if (const auto* lin = std::get_if<linear_spec>(&layer.op)) {
            count += lin->weight.size() + lin->bias.size();
        } else if (const auto* aff = std::get_if<affine_spec>(&layer.op)) {
            count += aff->scale.size() + aff->shift.size();
        } else if (std::holds_alternative<relu_spec>(layer.op)) {
            // no stored parameters
        } else {
            for (const auto& [pname, pvec] : used_params(std::get<neuron_spec>(layer.op)))
                count += pvec->size();
        }
    }
    return count;
}

std::size_t buffer_element_count(const model_graph& g) {
    std::size_t count = 0;
    for (const auto& b : g.buffers) count += b.size;
    return count;
}

bool layer_is_connection(const layer_spec& layer) {
    return std::holds_alternative<linear_spec>(layer.op);
}

bool layer_is_activation(const layer_spec& layer) {
    if (std::holds_alternative<relu_spec>(layer.op)) return true;
    if (const auto* n = std::get_if<neuron_spec>(&layer.op))
        return n->model != neuron_model::leaky_readout;
    return false;
}

model_runner::model_runner(model_graph graph) : graph_(std::move(graph)) {
    for (const auto& b : graph_.buffers)
        buffers_.emplace(b.name, std::vector<double>(b.size, 0.0));
    feedback_source_.assign(graph_.layers.size(), -1);
    for (std::size_t i = 0; i < graph_.layers.size(); ++i) {
        const auto* lin = std::get_if<linear_spec>(&graph_.layers[i].op);
        if (lin == nullptr || lin->input != linear_input::feedback) continue;
        for (std::size_t j = 0; j < graph_.layers.size(); ++j) {
            if (graph_.layers[j].name == lin->feedback_of) {
                feedback_source_[i] = static_cast<int>(j);
                break;
            }
        }
    }
}

void model_runner::reset_state() {
    for (auto& [name, values] : buffers_) std::fill(values.begin(), values.end(), 0.0);
}

std::vector<double>& model_runner::buffer(const std::string& name) {
    auto it = buffers_.find(name);
    if (it == buffers_.end()) throw data_error("model: no buffer named '" + name + "'");
    return it->second;
}

const std::vector<double>& model_runner::buffer(const std::string& name) const {
    auto it = buffers_.find(name);
    if (it == buffers_.end()) throw data_error("model: no buffer named '" + name + "'");
    return it->second;
}

model_runner::result model_runner::forward(const std::vector<Tensor>& inputs) {
    result res;
    res.outputs.reserve(inputs.size());
    res.trace.steps.reserve(inputs.size());

    for (std::size_t t = 0; t < inputs.size(); ++t) {
        const Tensor& x = inputs[t];
        x.validate("model input");
        if (x.size() != graph_.input_dim) {
            std::ostringstream os;
            os << "model: input at timestep " << (t + 1) << " has " << x.size()
               << " values, expected " << graph_.input_dim;
            throw data_error(os.str());
        }

        step_trace step;
        step.layers.resize(graph_.layers.size());
        std::vector<double> chain = x.data;

        for (std::size_t i = 0; i < graph_.layers.size(); ++i) {
            const auto& layer = graph_.layers[i];
            std::vector<double> in;
            std::vector<double> out;

            if (const auto* lin = std::get_if<linear_spec>(&layer.op)) {
                switch (lin->input) {
                    case linear_input::chain:
                        in = chain;
                        break;
                    case linear_input::chain_with_input:
                        in = x.data;
                        in.insert(in.end(), chain.begin(), chain.end());
                        break;
                    case linear_input::feedback: {
                        const auto& target = graph_.layers[feedback_source_[i]];
                        const std::string canonical = output_buffer_name(target);
                        in = buffer(canonical.empty() ? target.name + ".fb" : canonical);
                        break;
                    }
                }
                out.assign(lin->out, 0.0);
                for (std::size_t r = 0; r < lin->out; ++r) {
                    double acc = lin->bias.empty() ? 0.0 : lin->bias[r];
                    const double* row = lin->weight.data() + r * lin->in;
                    for (std::size_t c = 0; c < lin->in; ++c) acc += row[c] * in[c];
                    out[r] = acc;
                }
                if (lin->input == linear_input::feedback) {
                    for (std::size_t r = 0; r < out.size(); ++r) chain[r] += out[r];
                } else {
                    chain = out;
                }
            } else if (const auto* aff = std::get_if<affine_spec>(&layer.op)) {
                in = chain;
                out.resize(in.size());
                for (std::size_t k = 0; k < in.size(); ++k)
                    out[k] = aff->scale[k] * in[k] + aff->shift[k];
                chain = out;
            } else if (std::holds_alternative<relu_spec>(layer.op)) {
                in = chain;
                out.resize(in.size());
                for (std::size_t k = 0; k < in.size(); ++k) out[k] = std::max(0.0, in[k]);
                chain = out;
            } else {
                const auto& n = std::get<neuron_spec>(layer.op);
                in = chain;
                switch (n.model) {
                    case neuron_model::lif_delayed_reset:
                        lif_delayed_reset_step(n, in, buffer(layer.name + ".u"),
                                               buffer(layer.name + ".s"), out);
                        break;
                    case neuron_model::lif_decay_to_input:
                        lif_decay_to_input_step(n, in, buffer(layer.name + ".u"), out);
                        break;
                    case neuron_model::adlif:
                        adlif_step(n, in, buffer(layer.name + ".u"),
                                   buffer(layer.name + ".w"), buffer(layer.name + ".s"), out);
                        break;
                    case neuron_model::leaky_readout:
                        leaky_readout_step(n, in, buffer(layer.name + ".u"), out);
                        break;
                    case neuron_model::tanh_reservoir:
                        tanh_reservoir_step(n, in, buffer(layer.name + ".r"), out);
                        break;
                }
                chain = out;
            }

            if (!all_finite(out) || !all_finite(chain)) {
                std::ostringstream os;
                os << "model: non-finite value at layer '" << layer.name << "' on timestep "
                   << (t + 1);
                throw numeric_error(os.str());
            }

            // Keep the previous-output copy fresh for layers tapped by feedback
            // but holding no state of their own.
            if (buffers_.count(layer.name + ".fb") != 0) buffer(layer.name + ".fb") = out;

            step.layers[i].input = std::move(in);
            step.layers[i].output = std::move(out);
        }

        res.outputs.push_back(Tensor::vec(chain));
        res.trace.steps.push_back(std::move(step));
    }
    return res;
}

workload_result run_workload(model_runner& runner,
                             const std::vector<std::vector<Tensor>>& samples) {
    workload_result res;
    res.outputs.reserve(samples.size());
    res.trace.samples.reserve(samples.size());
    for (const auto& sample : samples) {
        runner.reset_state();
        auto r = runner.forward(sample);
        res.outputs.push_back(std::move(r.outputs));
        res.trace.samples.push_back(std::move(r.trace));
    }
    return res;
}

}  // namespace spikemark
