#pragma once

#include <span>
#include <vector>

#include "spikemark/model.hpp"

namespace spikemark {

// Single-step neuron updates, vectorized over a layer. All are pure given
// (state, params, input): they read the passed-in state, write the new state
// back, and fill `out` with the layer output. Sizes must agree with spec.size.

/// Membrane integrates beta*u + X unless the previous step spiked, in which
/// case the potential is pinned to v_reset and this step's input is discarded.
/// Spike condition is strictly u > v_th. `s` holds the previous spikes on
/// entry and the new spikes on return.
void lif_delayed_reset_step(const neuron_spec& spec, std::span<const double> x,
                            std::vector<double>& u, std::vector<double>& s,
                            std::vector<double>& out);

/// Potential decays toward the input: h = u + (X - u)/tau. Spikes when
/// h >= v_th and resets in the same step.
void lif_decay_to_input_step(const neuron_spec& spec, std::span<const double> x,
                             std::vector<double>& u, std::vector<double>& out);

/// Adaptive LIF. `x` is the input current I(t); `u` the potential, `w` the
/// adaptation variable, `s` the previous spikes (updated to the new spikes).
///   u(t) = alpha*u(t-1) + (1-alpha)*(I(t) - w(t-1)) - theta*s(t-1)
///   w(t) = beta*w(t-1) + a*(1-beta)*u(t-1) + b*s(t-1)
///   s(t) = 1 iff u(t) >= theta
void adlif_step(const neuron_spec& spec, std::span<const double> x,
                std::vector<double>& u, std::vector<double>& w,
                std::vector<double>& s, std::vector<double>& out);

/// Leaky accumulator u = beta*u + X with the potential itself as output
/// (regression readout; no spikes, no reset).
void leaky_readout_step(const neuron_spec& spec, std::span<const double> x,
                        std::vector<double>& u, std::vector<double>& out);

/// Leaky tanh reservoir unit: r = (1-alpha)*r + alpha*tanh(x), where x is the
/// summed pre-activation (recurrent + input contributions).
void tanh_reservoir_step(const neuron_spec& spec, std::span<const double> x,
                         std::vector<double>& r, std::vector<double>& out);

/// Input current for an adaptive-LIF layer with recurrence:
///   I = affine(W_f · x_in) + W_r · s_prev
/// where affine applies the frozen per-channel scale/shift. W_f is out×in and
/// W_r out×out, both row-major. Throws data_error on dimension mismatch.
std::vector<double> adlif_current(const std::vector<double>& w_f, std::size_t out,
                                  std::size_t in, std::span<const double> x_in,
                                  const affine_spec& affine,
                                  const std::vector<double>& w_r,
                                  std::span<const double> s_prev);

/// Echo-state reservoir dynamics. Matrices are owned here and evaluated here;
/// their random initialization lives in the reservoir module.
struct esn_params {
    double alpha = 0.3;    ///< leak rate in (0,1]
    double gamma = 1.0;    ///< recurrent gain
    double beta_in = 0.5;  ///< input gain
    std::size_t reservoir_dim = 0;              ///< D
    std::size_t input_dim = 0;                  ///< d
    std::vector<double> w;                      ///< recurrent D×D, row-major
    std::vector<double> w_in;                   ///< input D×(d+1); column 0 is the constant bias
    void validate() const;                      ///< throws data_error on shape mismatch
};

/// One reservoir update:
///   r(t) = (1-alpha)·r(t-1) + alpha·tanh(gamma·W·r(t-1) + beta_in·W_in·[1; f(t)])
/// Throws data_error on dimension mismatch.
void esn_step(std::vector<double>& r, const esn_params& p, std::span<const double> f);

}  // namespace spikemark
