#pragma once

// Resistive power of one memristive SAR conversion: integration power on the
// neuron feedback resistor plus synapse power, summed over the N stages.
// Activation power is constant and not modelled.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "memsar/adc.hpp"
#include "memsar/noise.hpp"

namespace memsar {

struct PowerBreakdown {
    double p_int = 0.0;  // watts
    double p_syn = 0.0;  // watts

    double total() const noexcept { return p_int + p_syn; }

    PowerBreakdown& operator+=(const PowerBreakdown& o) noexcept {
        p_int += o.p_int;
        p_syn += o.p_syn;
        return *this;
    }
    PowerBreakdown scaled(double s) const noexcept { return {p_int * s, p_syn * s}; }
};

// (v - W_ref^(n) V_ref - sum_{i>n} W_i^(n) V_i)^2 / R_ref, V_i = V_ref if B_i = +1 else 0.
double integration_power_bit(double v_in, int n, const BitVector& bits, const MemristorWeights& w,
                             const AdcConfig& config);

// (v^2 + W_ref^(n) V_ref^2 + sum_{i>n} W_i^(n) V_i^2) / R_ref.
double synapse_power_bit(double v_in, int n, const BitVector& bits, const MemristorWeights& w,
                         const AdcConfig& config);

PowerBreakdown conversion_power(double v_in, const MemristorWeights& w, const AdcConfig& config);
PowerBreakdown conversion_power(double v_in, const BitVector& bits, const MemristorWeights& w,
                                const AdcConfig& config);

// Differentiable variant for training: V_i = V_ref * (b_i + 1) / 2 with soft bits.
PowerBreakdown soft_conversion_power(double v_in, const SoftBitVector& soft,
                                     const MemristorWeights& w, const AdcConfig& config);

// Adds d(g_total * P_total)/d{v, b, W} into grad_v, grad_bits and grad_w.
void soft_conversion_power_backward(double v_in, const SoftBitVector& soft,
                                    const MemristorWeights& w, const AdcConfig& config,
                                    double g_total, double& grad_v, std::span<double> grad_bits,
                                    std::span<double> grad_w);

// ADC input voltages of a batch, laid out [sample][step][adc].
struct AdcInputBatch {
    std::size_t samples = 0;
    std::size_t steps = 0;
    std::size_t adcs = 0;
    std::vector<double> volts;

    double at(std::size_t s, std::size_t z, std::size_t j) const {
        return volts[(s * steps + z) * adcs + j];
    }
};

// Monte Carlo estimate of the dataset power: each draw perturbs every
// conversion with fresh noise, powers are summed over ADCs and steps, and the
// result is averaged over samples and draws. Conversion (d, s, z) uses
// draw_id = draw_base + (d * samples + s) * steps + z.
PowerBreakdown expected_power(const AdcInputBatch& batch, std::span<const MemristorWeights> w_tilde,
                              const AdcConfig& config, const NoiseSpec& noise,
                              std::size_t mc_draws, std::uint64_t draw_base = 0);

}  // namespace memsar
