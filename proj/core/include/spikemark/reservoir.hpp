#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spikemark/mackey_glass.hpp"
#include "spikemark/metrics.hpp"
#include "spikemark/model.hpp"
#include "spikemark/neurons.hpp"

namespace spikemark {

// ---------------------------------------------------------------------------
// Echo-state network: random construction, state harvesting, ridge-regression
// readout, autoregressive forecasting. The forecasting baseline for the
// chaotic-series task.
// ---------------------------------------------------------------------------

struct esn_model {
    esn_params params;
    std::vector<double> readout;  ///< W_out, d×(D+d+1) row-major; empty until trained
    std::uint64_t seed = 0;

    std::size_t readout_cols() const {
        return params.reservoir_dim + params.input_dim + 1;
    }
};

/// Build an ESN with W_in uniform on [-1,1] and recurrent W whose entries are
/// standard normal with independent probability p_conn (zero otherwise), then
/// scale W so its spectral radius (power iteration, 100 rounds) is
/// rho_target. Deterministic for a given seed.
esn_model init_esn(std::size_t d, std::size_t D, double p_conn, std::uint64_t seed,
                   double alpha = 0.3, double gamma = 1.0, double beta_in = 0.5,
                   double rho_target = 0.9);

/// Drive the reservoir over `inputs` from a zero state and collect one row
/// [1; f(t); r(t)] per step, dropping the first `washout` rows. Returns a
/// row-major M×(D+d+1) matrix (rows = inputs.size() - washout).
struct state_matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  ///< row-major
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};
state_matrix harvest_states(esn_model& m, std::span<const double> inputs,
                            std::size_t washout);

/// Ridge regression W_out = Yᵀ H (HᵀH + λI)⁻¹ via a stable factorization.
/// H is M×C, Y is M×d (row-major); the result is d×C row-major. A singular
/// system with lambda = 0 throws numeric_error suggesting lambda > 0.
std::vector<double> train_readout(const state_matrix& h, const state_matrix& y,
                                  double lambda);

/// Readout evaluation y = W_out · [1; f; r] for the model's current state.
std::vector<double> esn_readout(const esn_model& m, std::span<const double> f,
                                std::span<const double> r);

/// Closed-loop forecast: starting from reservoir state `r` and last observed
/// input `start_value`, repeatedly (step, read out, feed back) for `steps`
/// steps. Non-finite predictions are clamped to ±1e6 (NaN → +1e6) and the
/// run is flagged diverged; the metric layer bounds the damage.
struct forecast_result {
    std::vector<double> predictions;  ///< steps × d, row-major
    bool diverged = false;
};
forecast_result autoregressive_forecast(const esn_model& m, std::vector<double> r,
                                        std::span<const double> start_value,
                                        std::size_t steps);

// ---------------------------------------------------------------------------
// End-to-end chaotic-series benchmark.
// ---------------------------------------------------------------------------

struct esn_config {
    std::size_t reservoir_dim = 186;
    double p_conn = 0.11;
    double alpha = 0.3;
    double gamma = 1.0;
    double beta_in = 0.5;
    double rho_target = 0.9;
    double lambda = 1e-6;
    std::size_t washout = 75;
};

/// A fresh ESN per instance for the generic forecasting protocol:
/// instance i trains with seed derive_seed(base_seed, i).
forecaster_factory esn_forecaster_factory(const esn_config& cfg, std::uint64_t base_seed);

struct esn_benchmark_result {
    esn_config config;
    chaotic_report scores;
    bool any_diverged = false;
    esn_model final_model;  ///< the last instance's trained network
    metrics_report report;  ///< metrics of that model, replayed on its eval
                            ///< inputs under instrumentation
};

/// Run the forecasting protocol with ESN models and additionally express the
/// last trained model in the generic layer-graph form, replay its forecast
/// inputs under instrumentation, and fill the complexity metrics report.
esn_benchmark_result run_esn_chaotic_benchmark(const mg_series& series, int instances,
                                               const esn_config& cfg,
                                               std::uint64_t base_seed);

/// Mean symmetric error over a hyperparameter grid; returns the best config
/// (ties keep the earliest candidate, so results are deterministic).
struct grid_search_result {
    esn_config best;
    double best_mean_smape = 0;
    std::vector<double> all_scores;  ///< aligned with candidates
};
grid_search_result grid_search_esn(const mg_series& series, int instances,
                                   std::span<const esn_config> candidates,
                                   std::uint64_t base_seed);

/// Express a trained ESN in the generic layer-graph form so footprint,
/// sparsity, and synaptic-op metrics come out of the shared instrumentation:
/// input linear + recurrent linear (tap on the reservoir state) → tanh
/// reservoir neurons → readout linear over [1; f; r]. The graph consumes
/// [1; f(t)] per step so the constant columns of the input and readout
/// matrices remain ordinary, countable synapses.
model_desc esn_to_model_desc(const esn_model& m);

}  // namespace spikemark
