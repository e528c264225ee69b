#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace spikemark {

// ---------------------------------------------------------------------------
// Chaotic benchmark data from the delay differential equation
//
//   dx/dt = beta · x(t−tau) / (1 + x(t−tau)^n) − gamma · x(t)
//
// integrated with classical fixed-step RK4 plus cubic-Hermite dense output
// over the stored trajectory for the delayed lookup, so results are
// deterministic bit-for-bit. History is the constant x0 for t <= 0.
// ---------------------------------------------------------------------------

struct mg_params {
    int n = 10;
    double beta = 0.2;
    double gamma = 0.1;
    double tau = 17.0;
    double x0 = 0.5;          ///< constant initial history
    double dt_int = 0.1;      ///< internal RK4 step; must satisfy 0 < dt_int <= tau
    int lyapunov_time = 197;  ///< L in time units; sets the sampling stride L/75

    void validate() const;  ///< throws data_error on invariant violations
};

/// The right-hand side of the equation at (x, x_delayed).
double mg_derivative(const mg_params& p, double x, double x_delayed);

/// Benchmark constants for the fourteen canonical series: Lyapunov time L
/// and initial value per integer tau in [17, 30].
struct mg_tau_entry {
    int lyapunov_time;
    double x0;
};
const std::map<int, mg_tau_entry>& mg_tau_table();

/// Params for one of the fourteen canonical series. Throws data_error for a
/// tau outside the table.
mg_params mg_params_for_tau(int tau, double dt_int = 0.1);

struct mg_series {
    mg_params params;
    int total_lyapunov_times = 0;  ///< duration in units of L
    std::vector<double> values;    ///< 75·total + 1 samples, stride L/75, after 10 L burn-in
};

/// Integrate for 10 L of discarded burn-in plus `duration_lyapunov` L of
/// samples (75 per L, plus the initial point). Throws numeric_error naming
/// the step if |x| exceeds 1e6.
mg_series integrate_mg(const mg_params& p, int duration_lyapunov);

/// One forecasting instance: a 1501-point window split at the midpoint.
struct mg_instance {
    int index = 0;
    std::vector<double> train;  ///< points [start, start+750]
    std::vector<double> eval;   ///< points [start+751, start+1500]
};

/// Overlapping instances offset by half a Lyapunov time each:
/// start_i = round(i · 37.5) samples. Throws data_error when the series is
/// too short for the requested count.
std::vector<mg_instance> make_instances(const mg_series& s, int count);

/// Series cache: CSV of (t, x) pairs preceded by comment lines recording
/// every parameter. Values are written in shortest round-trip form, so
/// regeneration with identical parameters reproduces the file byte for byte
/// and reading restores exact values.
void save_series_csv(const std::string& path, const mg_series& s);
mg_series load_series_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Forecasting protocol: teacher-forced training on the first half of each
// instance, closed-loop autoregressive forecasting of the second half.
// ---------------------------------------------------------------------------

class forecaster {
public:
    virtual ~forecaster() = default;
    /// Fit on the training half (ground-truth inputs throughout).
    virtual void train(std::span<const double> series) = 0;
    /// Continue past the training half for `steps` predictions, feeding each
    /// prediction back as the next input.
    virtual std::vector<double> forecast(std::size_t steps) = 0;
};

/// Produces a fresh model per instance (re-initialized and re-trained).
using forecaster_factory = std::function<std::unique_ptr<forecaster>(int instance)>;

struct chaotic_report {
    std::vector<double> instance_smape;
    double mean_smape = 0;
};

/// Run the protocol over `count` instances of the series and score each
/// forecast with the symmetric error percentage against the eval half.
chaotic_report run_chaotic_benchmark(const mg_series& series, int count,
                                     const forecaster_factory& factory);

}  // namespace spikemark
