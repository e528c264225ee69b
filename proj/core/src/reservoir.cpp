#include "spikemark/reservoir.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <utility>

#include "spikemark/errors.hpp"
#include "spikemark/rng.hpp"

namespace spikemark {

namespace {

using row_major_map =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

/// |largest eigenvalue| of a D×D row-major matrix, estimated with 100 matrix-
/// vector rounds: the first half settles the iterate into the dominant
/// subspace, the geometric mean of the second half's growth factors is the
/// estimate. Robust to complex dominant pairs, deterministic.
double spectral_radius_estimate(const std::vector<double>& w, std::size_t D) {
    const int kRounds = 100;
    const int kWarmup = kRounds / 2;
    std::vector<double> v(D, 1.0 / std::sqrt(static_cast<double>(D)));
    std::vector<double> next(D);
    double log_growth = 0.0;
    int measured = 0;
    for (int round = 0; round < kRounds; ++round) {
        for (std::size_t i = 0; i < D; ++i) {
            double acc = 0.0;
            const double* row = w.data() + i * D;
            for (std::size_t j = 0; j < D; ++j) acc += row[j] * v[j];
            next[i] = acc;
        }
        double norm = 0.0;
        for (double x : next) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0 || !std::isfinite(norm)) return 0.0;
        if (round >= kWarmup) {
            log_growth += std::log(norm);
            ++measured;
        }
        for (std::size_t i = 0; i < D; ++i) v[i] = next[i] / norm;
    }
    return std::exp(log_growth / static_cast<double>(measured));
}

/// Everything a trained forecasting model needs: the network, the reservoir
/// state after the training sequence, and the last observed value to seed the
/// closed loop.
struct fitted_esn {
    esn_model model;
    std::vector<double> state;
    double start = 0;
};

fitted_esn fit_esn(const esn_config& cfg, std::uint64_t seed,
                   std::span<const double> series) {
    if (series.size() < cfg.washout + 2)
        throw data_error("reservoir: training series of " + std::to_string(series.size()) +
                         " points is too short for a washout of " +
                         std::to_string(cfg.washout));

    fitted_esn fit;
    fit.model = init_esn(1, cfg.reservoir_dim, cfg.p_conn, seed, cfg.alpha, cfg.gamma,
                         cfg.beta_in, cfg.rho_target);

    // Inputs are all but the last point; each harvested row at time t is
    // paired with the next observed value, so the readout learns the one-step
    // map and the final point stays available to seed the forecast.
    const std::size_t T = series.size();
    const auto h = harvest_states(fit.model, series.first(T - 1), cfg.washout);
    state_matrix y;
    y.rows = h.rows;
    y.cols = 1;
    y.data.reserve(h.rows);
    for (std::size_t i = 0; i < h.rows; ++i) y.data.push_back(series[cfg.washout + i + 1]);
    fit.model.readout = train_readout(h, y, cfg.lambda);

    fit.state.assign(cfg.reservoir_dim, 0.0);
    for (std::size_t t = 0; t + 1 < T; ++t)
        esn_step(fit.state, fit.model.params, series.subspan(t, 1));
    fit.start = series[T - 1];
    return fit;
}

class esn_forecaster final : public forecaster {
public:
    esn_forecaster(esn_config cfg, std::uint64_t seed) : cfg_(cfg), seed_(seed) {}

    void train(std::span<const double> series) override {
        fit_ = fit_esn(cfg_, seed_, series);
        trained_ = true;
    }

    std::vector<double> forecast(std::size_t steps) override {
        if (!trained_) throw data_error("reservoir: forecast requested before training");
        auto fc = autoregressive_forecast(fit_.model, fit_.state,
                                          std::span<const double>(&fit_.start, 1), steps);
        diverged_ = fc.diverged;
        return std::move(fc.predictions);
    }

    bool diverged() const { return diverged_; }
    const fitted_esn& fit() const { return fit_; }

private:
    esn_config cfg_;
    std::uint64_t seed_;
    fitted_esn fit_;
    bool trained_ = false;
    bool diverged_ = false;
};

}  // namespace

esn_model init_esn(std::size_t d, std::size_t D, double p_conn, std::uint64_t seed,
                   double alpha, double gamma, double beta_in, double rho_target) {
    if (d < 1 || D < 1)
        throw data_error("reservoir: input and reservoir dimensions must be positive");
    if (!(p_conn >= 0.0) || p_conn > 1.0)
        throw data_error("reservoir: connection probability must lie in [0, 1]");
    if (!(rho_target >= 0.0) || !std::isfinite(rho_target))
        throw data_error("reservoir: target spectral radius must be non-negative");

    esn_model m;
    m.seed = seed;
    m.params.alpha = alpha;
    m.params.gamma = gamma;
    m.params.beta_in = beta_in;
    m.params.reservoir_dim = D;
    m.params.input_dim = d;

    rng256 rng(seed);
    m.params.w_in.resize(D * (d + 1));
    for (double& v : m.params.w_in) v = rng.uniform(-1.0, 1.0);
    m.params.w.resize(D * D);
    for (double& v : m.params.w) v = rng.uniform01() < p_conn ? rng.normal() : 0.0;

    const double rho = spectral_radius_estimate(m.params.w, D);
    if (rho > 0.0) {
        const double factor = rho_target / rho;
        for (double& v : m.params.w) v *= factor;
    }
    m.params.validate();
    return m;
}

state_matrix harvest_states(esn_model& m, std::span<const double> inputs,
                            std::size_t washout) {
    m.params.validate();
    const std::size_t d = m.params.input_dim;
    const std::size_t D = m.params.reservoir_dim;
    if (d == 0 || inputs.size() % d != 0)
        throw data_error("reservoir: the input length must be a multiple of the input dimension");
    const std::size_t T = inputs.size() / d;
    if (T <= washout)
        throw data_error("reservoir: need more than " + std::to_string(washout) +
                         " timesteps to survive the washout");

    state_matrix h;
    h.rows = T - washout;
    h.cols = 1 + d + D;
    h.data.reserve(h.rows * h.cols);
    std::vector<double> r(D, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const auto f = inputs.subspan(t * d, d);
        esn_step(r, m.params, f);
        if (t < washout) continue;
        h.data.push_back(1.0);
        h.data.insert(h.data.end(), f.begin(), f.end());
        h.data.insert(h.data.end(), r.begin(), r.end());
    }
    return h;
}

std::vector<double> train_readout(const state_matrix& h, const state_matrix& y,
                                  double lambda) {
    if (h.rows == 0 || h.cols == 0 || y.cols == 0)
        throw data_error("reservoir: empty training matrices");
    if (h.rows != y.rows)
        throw data_error("reservoir: state and target row counts disagree");
    if (h.data.size() != h.rows * h.cols || y.data.size() != y.rows * y.cols)
        throw data_error("reservoir: matrix data does not match its declared shape");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw data_error("reservoir: the ridge parameter must be non-negative and finite");

    const row_major_map H(h.data.data(), static_cast<Eigen::Index>(h.rows),
                          static_cast<Eigen::Index>(h.cols));
    const row_major_map Y(y.data.data(), static_cast<Eigen::Index>(y.rows),
                          static_cast<Eigen::Index>(y.cols));

    Eigen::MatrixXd A = H.transpose() * H;
    A.diagonal().array() += lambda;
    const Eigen::MatrixXd B = H.transpose() * Y;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (lambda == 0.0) {
        const auto& piv = ldlt.vectorD();
        const double d_max = piv.cwiseAbs().maxCoeff();
        const double d_min = piv.minCoeff();
        if (d_max == 0.0 || d_min <= d_max * 1e-12)
            throw numeric_error(
                "reservoir: the unregularized normal equations are singular; "
                "train with lambda > 0 to make the system well posed");
    }
    const Eigen::MatrixXd X = ldlt.solve(B);
    if (!X.allFinite())
        throw numeric_error(
            "reservoir: readout training produced non-finite weights; "
            "train with lambda > 0 to make the system well posed");

    std::vector<double> readout(y.cols * h.cols);
    for (std::size_t k = 0; k < y.cols; ++k)
        for (std::size_t c = 0; c < h.cols; ++c)
            readout[k * h.cols + c] = X(static_cast<Eigen::Index>(c),
                                        static_cast<Eigen::Index>(k));
    return readout;
}

std::vector<double> esn_readout(const esn_model& m, std::span<const double> f,
                                std::span<const double> r) {
    const std::size_t cols = m.readout_cols();
    if (m.readout.empty() || m.readout.size() % cols != 0)
        throw data_error("reservoir: the readout is missing or misshapen");
    if (f.size() != m.params.input_dim || r.size() != m.params.reservoir_dim)
        throw data_error("reservoir: readout operand sizes disagree with the model");
    const std::size_t d_out = m.readout.size() / cols;
    std::vector<double> y(d_out, 0.0);
    for (std::size_t k = 0; k < d_out; ++k) {
        const double* row = m.readout.data() + k * cols;
        double acc = row[0];  // the constant column
        for (std::size_t j = 0; j < f.size(); ++j) acc += row[1 + j] * f[j];
        for (std::size_t j = 0; j < r.size(); ++j) acc += row[1 + f.size() + j] * r[j];
        y[k] = acc;
    }
    return y;
}

forecast_result autoregressive_forecast(const esn_model& m, std::vector<double> r,
                                        std::span<const double> start_value,
                                        std::size_t steps) {
    if (start_value.size() != m.params.input_dim)
        throw data_error("reservoir: the seed value must match the input dimension");
    const double kBound = 1e6;
    forecast_result res;
    res.predictions.reserve(steps * m.params.input_dim);
    std::vector<double> f(start_value.begin(), start_value.end());
    for (std::size_t step = 0; step < steps; ++step) {
        esn_step(r, m.params, f);
        auto y = esn_readout(m, f, r);
        for (double& v : y) {
            if (std::isnan(v)) {
                v = kBound;
                res.diverged = true;
            } else if (v > kBound) {
                v = kBound;
                res.diverged = true;
            } else if (v < -kBound) {
                v = -kBound;
                res.diverged = true;
            }
        }
        res.predictions.insert(res.predictions.end(), y.begin(), y.end());
        f = std::move(y);
    }
    return res;
}

forecaster_factory esn_forecaster_factory(const esn_config& cfg, std::uint64_t base_seed) {
    return [cfg, base_seed](int instance) -> std::unique_ptr<forecaster> {
        return std::make_unique<esn_forecaster>(
            cfg, derive_seed(base_seed, static_cast<std::uint64_t>(instance)));
    };
}

esn_benchmark_result run_esn_chaotic_benchmark(const mg_series& series, int instances,
                                               const esn_config& cfg,
                                               std::uint64_t base_seed) {
    const auto windows = make_instances(series, instances);
    esn_benchmark_result result;
    result.config = cfg;

    fitted_esn last_fit;
    const mg_instance* last_instance = nullptr;
    for (const auto& inst : windows) {
        esn_forecaster model(cfg, derive_seed(base_seed, static_cast<std::uint64_t>(inst.index)));
        model.train(inst.train);
        const auto predictions = model.forecast(inst.eval.size());
        result.any_diverged |= model.diverged();
        result.scores.instance_smape.push_back(smape(predictions, inst.eval));
        if (inst.index + 1 == instances) {
            last_fit = model.fit();
            last_instance = &inst;
        }
    }
    double sum = 0;
    for (double v : result.scores.instance_smape) sum += v;
    result.scores.mean_smape = sum / static_cast<double>(result.scores.instance_smape.size());

    // Complexity metrics: express the last trained network as a layer graph
    // and replay its evaluation window (teacher forced) under instrumentation.
    result.final_model = last_fit.model;
    const auto g = build_model(esn_to_model_desc(last_fit.model));
    model_runner runner(g);
    std::vector<std::vector<Tensor>> samples(1);
    samples[0].reserve(last_instance->eval.size());
    for (double v : last_instance->eval) samples[0].push_back(Tensor::vec({1.0, v}));
    const auto wl = run_workload(runner, samples);
    result.report = full_report(g, wl.trace);
    result.report.correctness_name = "smape";
    result.report.correctness_value = result.scores.mean_smape;
    return result;
}

grid_search_result grid_search_esn(const mg_series& series, int instances,
                                   std::span<const esn_config> candidates,
                                   std::uint64_t base_seed) {
    if (candidates.empty())
        throw data_error("reservoir: grid search needs at least one candidate");
    grid_search_result result;
    result.all_scores.reserve(candidates.size());
    bool have_best = false;
    for (const auto& cand : candidates) {
        const auto report =
            run_chaotic_benchmark(series, instances, esn_forecaster_factory(cand, base_seed));
        result.all_scores.push_back(report.mean_smape);
        if (!have_best || report.mean_smape < result.best_mean_smape) {
            have_best = true;
            result.best = cand;
            result.best_mean_smape = report.mean_smape;
        }
    }
    return result;
}

model_desc esn_to_model_desc(const esn_model& m) {
    m.params.validate();
    const std::size_t d = m.params.input_dim;
    const std::size_t D = m.params.reservoir_dim;
    const std::size_t cols = m.readout_cols();
    if (m.readout.empty() || m.readout.size() % cols != 0)
        throw data_error("reservoir: cannot express an untrained model as a layer graph");

    // The graph consumes [1; f(t)] so the constant columns of the input and
    // readout matrices stay ordinary synaptic weights, exactly as they are
    // counted in the native form.
    model_desc desc;
    desc.input_dim = d + 1;
    desc.precision_bytes = 8;

    linear_spec input;
    input.in = d + 1;
    input.out = D;
    input.weight.resize(D * (d + 1));
    for (std::size_t i = 0; i < input.weight.size(); ++i)
        input.weight[i] = m.params.beta_in * m.params.w_in[i];
    desc.layers.push_back({"input", std::move(input)});

    linear_spec recurrent;
    recurrent.in = D;
    recurrent.out = D;
    recurrent.weight.resize(D * D);
    for (std::size_t i = 0; i < recurrent.weight.size(); ++i)
        recurrent.weight[i] = m.params.gamma * m.params.w[i];
    recurrent.input = linear_input::feedback;
    recurrent.feedback_of = "reservoir";
    desc.layers.push_back({"recurrent", std::move(recurrent)});

    neuron_spec pool;
    pool.model = neuron_model::tanh_reservoir;
    pool.size = D;
    pool.alpha = m.params.alpha;
    desc.layers.push_back({"reservoir", pool});

    linear_spec readout;
    readout.in = cols;  // [1; f; r] = the model input concatenated with the chain
    readout.out = m.readout.size() / cols;
    readout.weight = m.readout;
    readout.input = linear_input::chain_with_input;
    desc.layers.push_back({"readout", std::move(readout)});

    return desc;
}

}  // namespace spikemark
