#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spikemark/model.hpp"

namespace spikemark {

// ---------------------------------------------------------------------------
// Complexity metrics over a model graph and an execution trace.
// ---------------------------------------------------------------------------

/// Total bytes of the model at its declared precision: every stored parameter
/// value (weights, biases, affine scale/shift, neuron parameter entries) plus
/// every state-buffer element. Zero weights count like any other.
std::uint64_t footprint_bytes(const model_graph& g);

/// Fraction of synaptic weights that are exactly zero, over all linear layers
/// (feed-forward, recurrent, and readout alike). Biases are not synapses and
/// are excluded. Throws data_error when the model has no weights at all.
double connection_sparsity(const model_graph& g);

/// Fraction of zero outputs over all activation layers (ReLU outputs, spikes,
/// reservoir tanh states) across the whole trace. Readout potentials and
/// linear/affine outputs are not activations. Throws data_error when the
/// model has no activation layer.
double activation_sparsity(const model_graph& g, const execution_trace& trace);

/// Synaptic operations per model execution (one execution = one timestep of
/// one sample), averaged over the whole trace.
struct synops_breakdown {
    double dense = 0;    ///< in×out per linear layer, zeros included
    double eff_mac = 0;  ///< nonzero-weight × nonzero-input pairs, real-valued inputs
    double eff_ac = 0;   ///< same, for layers whose observed inputs stay in {-1, 0, 1}
};
struct layer_synops {
    std::string layer;
    bool accumulate_only = false;  ///< input value set confined to {-1, 0, 1}
    double dense = 0;
    double effective = 0;
};
struct synops_result {
    synops_breakdown totals;
    std::vector<layer_synops> per_layer;
};
synops_result synaptic_ops(const model_graph& g, const execution_trace& trace);

// ---------------------------------------------------------------------------
// Correctness metrics.
// ---------------------------------------------------------------------------

/// Symmetric mean absolute percentage error in [0, 200]:
///   200/n · Σ |y_i − p_i| / (|y_i| + |p_i|).
/// Terms with y_i = p_i = 0 contribute 0; non-finite predictions are clamped
/// to the maximum, contributing 200/n each, so diverging forecasts stay
/// bounded. Throws data_error on empty or mismatched inputs.
double smape(std::span<const double> predictions, std::span<const double> targets);

/// Coefficient of determination 1 − SSres/SStot. Requires n >= 2 and
/// non-constant targets (throws data_error otherwise).
double r_squared(std::span<const double> predictions, std::span<const double> targets);

/// Fraction of exact label matches. Throws data_error on empty or mismatched
/// inputs.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Model execution rate for a given input stride: 1/stride in Hz.
/// Throws data_error for non-positive stride.
double execution_rate_hz(double stride_seconds);

// ---------------------------------------------------------------------------
// The benchmark output record.
// ---------------------------------------------------------------------------

struct metrics_report {
    std::uint64_t footprint_bytes = 0;
    double connection_sparsity = 0;
    std::optional<double> activation_sparsity;  ///< workload metrics: null in static-only reports
    std::optional<double> synops_dense;
    std::optional<double> synops_eff_mac;
    std::optional<double> synops_eff_ac;
    std::optional<std::string> correctness_name;  ///< "smape" | "r_squared" | "accuracy"
    std::optional<double> correctness_value;
    std::optional<double> execution_rate_hz;  ///< user-reported; null for untimed data
};

/// Static metrics only (no trace needed).
metrics_report static_report(const model_graph& g);

/// Static plus workload metrics from a trace.
metrics_report full_report(const model_graph& g, const execution_trace& trace);

}  // namespace spikemark
