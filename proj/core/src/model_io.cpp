#include "spikemark/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spikemark/errors.hpp"

namespace spikemark {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* input_name(linear_input in) {
    switch (in) {
        case linear_input::chain: return "chain";
        case linear_input::feedback: return "feedback";
        case linear_input::chain_with_input: return "chain_with_input";
    }
    return "chain";
}

linear_input input_from_name(const std::string& name) {
    if (name == "chain") return linear_input::chain;
    if (name == "feedback") return linear_input::feedback;
    if (name == "chain_with_input") return linear_input::chain_with_input;
    throw data_error("model: unknown linear input mode '" + name + "'");
}

const char* neuron_name(neuron_model m) {
    switch (m) {
        case neuron_model::lif_delayed_reset: return "lif_delayed_reset";
        case neuron_model::lif_decay_to_input: return "lif_decay_to_input";
        case neuron_model::adlif: return "adlif";
        case neuron_model::leaky_readout: return "leaky_readout";
        case neuron_model::tanh_reservoir: return "tanh_reservoir";
    }
    return "lif_delayed_reset";
}

neuron_model neuron_from_name(const std::string& name) {
    if (name == "lif_delayed_reset") return neuron_model::lif_delayed_reset;
    if (name == "lif_decay_to_input") return neuron_model::lif_decay_to_input;
    if (name == "adlif") return neuron_model::adlif;
    if (name == "leaky_readout") return neuron_model::leaky_readout;
    if (name == "tanh_reservoir") return neuron_model::tanh_reservoir;
    throw data_error("model: unknown neuron model '" + name + "'");
}

const ordered_json& field(const ordered_json& j, const char* key) {
    if (!j.contains(key))
        throw data_error(std::string("model: missing field '") + key + "'");
    return j.at(key);
}

std::string string_field(const ordered_json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_string())
        throw data_error(std::string("model: field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::size_t size_field(const ordered_json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_number_unsigned())
        throw data_error(std::string("model: field '") + key +
                         "' must be a non-negative integer");
    return v.get<std::size_t>();
}

std::vector<double> double_array(const ordered_json& v, const char* key) {
    if (!v.is_array())
        throw data_error(std::string("model: field '") + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number())
            throw data_error(std::string("model: field '") + key +
                             "' must hold numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<double> double_array_field(const ordered_json& j, const char* key) {
    return double_array(field(j, key), key);
}

void write_param(ordered_json& node, const char* key, const param_vec& p) {
    if (!p.empty()) node[key] = p.values;
}

param_vec read_param(const ordered_json& j, const char* key) {
    if (!j.contains(key)) return {};
    return param_vec(double_array(j.at(key), key));
}

ordered_json layer_to_json(const layer_spec& layer) {
    ordered_json node;
    node["name"] = layer.name;
    if (const auto* lin = std::get_if<linear_spec>(&layer.op)) {
        node["kind"] = "linear";
        node["in"] = lin->in;
        node["out"] = lin->out;
        node["weight"] = lin->weight;
        node["bias"] = lin->bias;
        node["input"] = input_name(lin->input);
        if (lin->input == linear_input::feedback) node["feedback_of"] = lin->feedback_of;
    } else if (const auto* aff = std::get_if<affine_spec>(&layer.op)) {
        node["kind"] = "affine";
        node["scale"] = aff->scale;
        node["shift"] = aff->shift;
    } else if (const auto* rel = std::get_if<relu_spec>(&layer.op)) {
        node["kind"] = "relu";
        node["size"] = rel->size;
    } else {
        const auto& n = std::get<neuron_spec>(layer.op);
        node["kind"] = "neuron";
        node["model"] = neuron_name(n.model);
        node["size"] = n.size;
        write_param(node, "beta", n.beta);
        write_param(node, "tau", n.tau);
        write_param(node, "v_th", n.v_th);
        write_param(node, "v_reset", n.v_reset);
        write_param(node, "alpha", n.alpha);
        write_param(node, "a", n.a);
        write_param(node, "b", n.b);
        write_param(node, "theta", n.theta);
    }
    return node;
}

layer_spec layer_from_json(const ordered_json& node) {
    if (!node.is_object()) throw data_error("model: each layer must be an object");
    layer_spec layer;
    layer.name = string_field(node, "name");
    const std::string kind = string_field(node, "kind");
    if (kind == "linear") {
        linear_spec lin;
        lin.in = size_field(node, "in");
        lin.out = size_field(node, "out");
        lin.weight = double_array_field(node, "weight");
        lin.bias = double_array_field(node, "bias");
        lin.input = input_from_name(string_field(node, "input"));
        if (lin.input == linear_input::feedback)
            lin.feedback_of = string_field(node, "feedback_of");
        layer.op = std::move(lin);
    } else if (kind == "affine") {
        affine_spec aff;
        aff.scale = double_array_field(node, "scale");
        aff.shift = double_array_field(node, "shift");
        layer.op = std::move(aff);
    } else if (kind == "relu") {
        relu_spec rel;
        rel.size = size_field(node, "size");
        layer.op = rel;
    } else if (kind == "neuron") {
        neuron_spec n;
        n.model = neuron_from_name(string_field(node, "model"));
        n.size = size_field(node, "size");
        n.beta = read_param(node, "beta");
        n.tau = read_param(node, "tau");
        n.v_th = read_param(node, "v_th");
        n.v_reset = read_param(node, "v_reset");
        n.alpha = read_param(node, "alpha");
        n.a = read_param(node, "a");
        n.b = read_param(node, "b");
        n.theta = read_param(node, "theta");
        layer.op = std::move(n);
    } else {
        throw data_error("model: unknown layer kind '" + kind + "'");
    }
    return layer;
}

}  // namespace

std::string model_to_json(const model_desc& d) {
    ordered_json j;
    j["input_dim"] = d.input_dim;
    j["precision_bytes"] = d.precision_bytes;
    j["layers"] = ordered_json::array();
    for (const auto& layer : d.layers) j["layers"].push_back(layer_to_json(layer));
    j["extra_buffers"] = ordered_json::array();
    for (const auto& b : d.extra_buffers)
        j["extra_buffers"].push_back({{"name", b.name}, {"size", b.size}});
    return j.dump(2) + "\n";
}

model_desc model_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw data_error("model: malformed JSON");
    if (!j.is_object()) throw data_error("model: expected a JSON object");

    model_desc d;
    d.input_dim = size_field(j, "input_dim");
    if (j.contains("precision_bytes"))
        d.precision_bytes = static_cast<std::uint32_t>(size_field(j, "precision_bytes"));
    const auto& layers = field(j, "layers");
    if (!layers.is_array()) throw data_error("model: field 'layers' must be an array");
    for (const auto& node : layers) d.layers.push_back(layer_from_json(node));
    if (j.contains("extra_buffers")) {
        const auto& extras = j.at("extra_buffers");
        if (!extras.is_array())
            throw data_error("model: field 'extra_buffers' must be an array");
        for (const auto& node : extras) {
            if (!node.is_object())
                throw data_error("model: each extra buffer must be an object");
            d.extra_buffers.push_back({string_field(node, "name"), size_field(node, "size")});
        }
    }
    return d;
}

void save_model(const std::string& path, const model_desc& d) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("model: cannot open '" + path + "' for writing");
    out << model_to_json(d);
    if (!out) throw data_error("model: failed writing '" + path + "'");
}

model_desc load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("model: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace spikemark
