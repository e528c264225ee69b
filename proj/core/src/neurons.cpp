#include "spikemark/neurons.hpp"

#include <cmath>
#include <string>

#include "spikemark/errors.hpp"

namespace spikemark {

namespace {

void check_size(const char* who, std::size_t want, std::size_t got) {
    if (want != got)
        throw data_error(std::string(who) + ": expected " + std::to_string(want) +
                         " values, got " + std::to_string(got));
}

}  // namespace

void lif_delayed_reset_step(const neuron_spec& spec, std::span<const double> x,
                            std::vector<double>& u, std::vector<double>& s,
                            std::vector<double>& out) {
    const std::size_t n = spec.size;
    check_size("lif_delayed_reset_step input", n, x.size());
    check_size("lif_delayed_reset_step state", n, u.size());
    check_size("lif_delayed_reset_step spikes", n, s.size());
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (s[i] != 0.0) {
            u[i] = spec.v_reset(i);  // the input of this step is discarded
        } else {
            u[i] = spec.beta(i) * u[i] + x[i];
        }
        const bool spike = u[i] > spec.v_th(i);
        s[i] = spike ? 1.0 : 0.0;
        out[i] = s[i];
    }
}

void lif_decay_to_input_step(const neuron_spec& spec, std::span<const double> x,
                             std::vector<double>& u, std::vector<double>& out) {
    const std::size_t n = spec.size;
    check_size("lif_decay_to_input_step input", n, x.size());
    check_size("lif_decay_to_input_step state", n, u.size());
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double h = u[i] + (x[i] - u[i]) / spec.tau(i);
        const bool spike = h >= spec.v_th(i);
        u[i] = spike ? spec.v_reset(i) : h;  // same-step reset
        out[i] = spike ? 1.0 : 0.0;
    }
}

void adlif_step(const neuron_spec& spec, std::span<const double> x,
                std::vector<double>& u, std::vector<double>& w,
                std::vector<double>& s, std::vector<double>& out) {
    const std::size_t n = spec.size;
    check_size("adlif_step input", n, x.size());
    check_size("adlif_step potential", n, u.size());
    check_size("adlif_step adaptation", n, w.size());
    check_size("adlif_step spikes", n, s.size());
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u_old = u[i];
        const double w_old = w[i];
        const double s_old = s[i];
        const double alpha = spec.alpha(i);
        const double beta = spec.beta(i);
        const double theta = spec.theta(i);
        u[i] = alpha * u_old + (1.0 - alpha) * (x[i] - w_old) - theta * s_old;
        w[i] = beta * w_old + spec.a(i) * (1.0 - beta) * u_old + spec.b(i) * s_old;
        s[i] = (u[i] >= theta) ? 1.0 : 0.0;
        out[i] = s[i];
    }
}

void leaky_readout_step(const neuron_spec& spec, std::span<const double> x,
                        std::vector<double>& u, std::vector<double>& out) {
    const std::size_t n = spec.size;
    check_size("leaky_readout_step input", n, x.size());
    check_size("leaky_readout_step state", n, u.size());
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = spec.beta(i) * u[i] + x[i];
        out[i] = u[i];
    }
}

void tanh_reservoir_step(const neuron_spec& spec, std::span<const double> x,
                         std::vector<double>& r, std::vector<double>& out) {
    const std::size_t n = spec.size;
    check_size("tanh_reservoir_step input", n, x.size());
    check_size("tanh_reservoir_step state", n, r.size());
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double alpha = spec.alpha(i);
        r[i] = (1.0 - alpha) * r[i] + alpha * std::tanh(x[i]);
        out[i] = r[i];
    }
}

std::vector<double> adlif_current(const std::vector<double>& w_f, std::size_t out,
                                  std::size_t in, std::span<const double> x_in,
                                  const affine_spec& affine,
                                  const std::vector<double>& w_r,
                                  std::span<const double> s_prev) {
    if (w_f.size() != out * in)
        throw data_error("adlif_current: forward weight matrix is " +
                         std::to_string(w_f.size()) + " values, expected " +
                         std::to_string(out * in));
    check_size("adlif_current input", in, x_in.size());
    if (w_r.size() != out * out)
        throw data_error("adlif_current: recurrent weight matrix is " +
                         std::to_string(w_r.size()) + " values, expected " +
                         std::to_string(out * out));
    check_size("adlif_current previous spikes", out, s_prev.size());
    check_size("adlif_current affine scale", out, affine.scale.size());
    check_size("adlif_current affine shift", out, affine.shift.size());

    std::vector<double> current(out, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < in; ++c) acc += w_f[r * in + c] * x_in[c];
        acc = affine.scale[r] * acc + affine.shift[r];
        for (std::size_t c = 0; c < out; ++c) acc += w_r[r * out + c] * s_prev[c];
        current[r] = acc;
    }
    return current;
}

void esn_params::validate() const {
    if (reservoir_dim == 0) throw data_error("reservoir: dimension must be positive");
    if (w.size() != reservoir_dim * reservoir_dim)
        throw data_error("reservoir: recurrent matrix is " + std::to_string(w.size()) +
                         " values, expected " + std::to_string(reservoir_dim * reservoir_dim));
    if (w_in.size() != reservoir_dim * (input_dim + 1))
        throw data_error("reservoir: input matrix is " + std::to_string(w_in.size()) +
                         " values, expected " +
                         std::to_string(reservoir_dim * (input_dim + 1)));
    if (alpha < 0.0 || alpha > 1.0)
        throw data_error("reservoir: leak rate must lie in [0, 1]");
}

void esn_step(std::vector<double>& r, const esn_params& p, std::span<const double> f) {
    p.validate();
    check_size("esn_step state", p.reservoir_dim, r.size());
    check_size("esn_step input", p.input_dim, f.size());
    const std::size_t d1 = p.input_dim + 1;
    std::vector<double> next(p.reservoir_dim);
    for (std::size_t i = 0; i < p.reservoir_dim; ++i) {
        double pre = 0.0;
        for (std::size_t j = 0; j < p.reservoir_dim; ++j)
            pre += p.w[i * p.reservoir_dim + j] * r[j];
        pre *= p.gamma;
        double inp = p.w_in[i * d1];  // constant bias column
        for (std::size_t j = 0; j < p.input_dim; ++j) inp += p.w_in[i * d1 + 1 + j] * f[j];
        pre += p.beta_in * inp;
        next[i] = (1.0 - p.alpha) * r[i] + p.alpha * std::tanh(pre);
    }
    r = std::move(next);
}

}  // namespace spikemark
