#include "spikemark/metrics.hpp"

#include <cmath>
#include <cstddef>

#include "spikemark/errors.hpp"

namespace spikemark {

namespace {

/// Nonzero-weight count per input column of one linear layer.
std::vector<std::size_t> column_nonzeros(const linear_spec& lin) {
    std::vector<std::size_t> nnz(lin.in, 0);
    for (std::size_t r = 0; r < lin.out; ++r)
        for (std::size_t c = 0; c < lin.in; ++c)
            if (lin.weight[r * lin.in + c] != 0.0) ++nnz[c];
    return nnz;
}

void check_trace_shape(const model_graph& g, const execution_trace& trace,
                       const char* what) {
    for (const auto& sample : trace.samples)
        for (const auto& step : sample.steps)
            if (step.layers.size() != g.layers.size())
                throw data_error(std::string(what) +
                                 ": trace does not match the model's layer count");
}

}  // namespace

std::uint64_t footprint_bytes(const model_graph& g) {
    const std::uint64_t values =
        static_cast<std::uint64_t>(parameter_count(g)) +
        static_cast<std::uint64_t>(buffer_element_count(g));
    return values * g.precision_bytes;
}

double connection_sparsity(const model_graph& g) {
    std::uint64_t zeros = 0;
    std::uint64_t total = 0;
    for (const auto& layer : g.layers) {
        const auto* lin = std::get_if<linear_spec>(&layer.op);
        if (lin == nullptr) continue;
        total += lin->weight.size();
        for (double w : lin->weight)
            if (w == 0.0) ++zeros;
    }
    if (total == 0)
        throw data_error("connection sparsity: the model has no synaptic weights");
    return static_cast<double>(zeros) / static_cast<double>(total);
}

double activation_sparsity(const model_graph& g, const execution_trace& trace) {
    bool any_activation = false;
    for (const auto& layer : g.layers) any_activation |= layer_is_activation(layer);
    if (!any_activation)
        throw data_error("activation sparsity: the model has no activation layer");
    check_trace_shape(g, trace, "activation sparsity");

    std::uint64_t zeros = 0;
    std::uint64_t total = 0;
    for (const auto& sample : trace.samples) {
        for (const auto& step : sample.steps) {
            for (std::size_t i = 0; i < g.layers.size(); ++i) {
                if (!layer_is_activation(g.layers[i])) continue;
                for (double v : step.layers[i].output) {
                    ++total;
                    if (v == 0.0) ++zeros;
                }
            }
        }
    }
    if (total == 0)
        throw data_error("activation sparsity: the trace holds no activation outputs");
    return static_cast<double>(zeros) / static_cast<double>(total);
}

synops_result synaptic_ops(const model_graph& g, const execution_trace& trace) {
    check_trace_shape(g, trace, "synaptic ops");
    std::uint64_t steps = 0;
    for (const auto& sample : trace.samples) steps += sample.steps.size();
    if (steps == 0) throw data_error("synaptic ops: the trace holds no timesteps");

    struct accumulator {
        std::size_t layer_index = 0;
        std::vector<std::size_t> col_nnz;
        double dense_per_step = 0;
        double effective_total = 0;
        bool accumulate_only = true;  ///< until a non-{-1,0,1} input shows up
    };
    std::vector<accumulator> accs;
    for (std::size_t i = 0; i < g.layers.size(); ++i) {
        const auto* lin = std::get_if<linear_spec>(&g.layers[i].op);
        if (lin == nullptr) continue;
        accumulator a;
        a.layer_index = i;
        a.col_nnz = column_nonzeros(*lin);
        a.dense_per_step = static_cast<double>(lin->in) * static_cast<double>(lin->out);
        accs.push_back(std::move(a));
    }

    for (const auto& sample : trace.samples) {
        for (const auto& step : sample.steps) {
            for (auto& a : accs) {
                const auto& in = step.layers[a.layer_index].input;
                if (in.size() != a.col_nnz.size())
                    throw data_error("synaptic ops: traced input does not match the layer");
                for (std::size_t j = 0; j < in.size(); ++j) {
                    const double x = in[j];
                    if (x == 0.0) continue;
                    a.effective_total += static_cast<double>(a.col_nnz[j]);
                    if (x != 1.0 && x != -1.0) a.accumulate_only = false;
                }
            }
        }
    }

    synops_result res;
    const double n = static_cast<double>(steps);
    for (const auto& a : accs) {
        layer_synops per;
        per.layer = g.layers[a.layer_index].name;
        per.accumulate_only = a.accumulate_only;
        per.dense = a.dense_per_step;
        per.effective = a.effective_total / n;
        res.totals.dense += per.dense;
        (a.accumulate_only ? res.totals.eff_ac : res.totals.eff_mac) += per.effective;
        res.per_layer.push_back(std::move(per));
    }
    return res;
}

double smape(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.empty() || predictions.size() != targets.size())
        throw data_error("smape: need equally sized, nonempty prediction and target series");
    double sum = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double y = targets[i];
        if (!std::isfinite(y)) throw data_error("smape: target series contains a non-finite value");
        const double p = predictions[i];
        if (!std::isfinite(p)) {
            sum += 1.0;  // a diverged prediction is a total miss, not an overflow
            continue;
        }
        const double denom = std::abs(y) + std::abs(p);
        if (denom != 0.0) sum += std::abs(y - p) / denom;
    }
    return 200.0 * sum / static_cast<double>(predictions.size());
}

double r_squared(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size())
        throw data_error("r_squared: prediction and target sizes disagree");
    if (targets.size() < 2)
        throw data_error("r_squared: need at least two observations");
    double mean = 0;
    for (double y : targets) mean += y;
    mean /= static_cast<double>(targets.size());
    double ss_res = 0;
    double ss_tot = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        ss_res += (targets[i] - predictions[i]) * (targets[i] - predictions[i]);
        ss_tot += (targets[i] - mean) * (targets[i] - mean);
    }
    if (ss_tot == 0.0)
        throw data_error("r_squared: constant targets leave the score undefined");
    return 1.0 - ss_res / ss_tot;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.empty() || predicted.size() != truth.size())
        throw data_error("accuracy: need equally sized, nonempty label series");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == truth[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

double execution_rate_hz(double stride_seconds) {
    if (!(stride_seconds > 0.0))
        throw data_error("execution rate: stride must be a positive duration");
    return 1.0 / stride_seconds;
}

metrics_report static_report(const model_graph& g) {
    metrics_report rep;
    rep.footprint_bytes = footprint_bytes(g);
    rep.connection_sparsity = connection_sparsity(g);
    return rep;
}

metrics_report full_report(const model_graph& g, const execution_trace& trace) {
    metrics_report rep = static_report(g);
    try {
        rep.activation_sparsity = activation_sparsity(g, trace);
    } catch (const data_error&) {
        // Models without activation layers simply report no value here.
    }
    const auto ops = synaptic_ops(g, trace);
    rep.synops_dense = ops.totals.dense;
    rep.synops_eff_mac = ops.totals.eff_mac;
    rep.synops_eff_ac = ops.totals.eff_ac;
    return rep;
}

}  // namespace spikemark
