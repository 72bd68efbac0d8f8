#include "memsar/power.hpp"

#include <stdexcept>

namespace memsar {

namespace {

// h[i] is the "on" fraction of bit i: 0/1 for hard bits, (b+1)/2 for soft.
template <typename OnFraction>
PowerBreakdown stage_power(double v_in, int n, OnFraction&& h, const MemristorWeights& w,
                           const AdcConfig& config) {
    const double vr = config.v_ref();
    double drive = w.ref(n) * vr;
    double syn = v_in * v_in + w.ref(n) * vr * vr;
    for (int i = n + 1; i < config.n_bits(); ++i) {
        const double vi = vr * h(i);
        drive += w.cross(i, n) * vi;
        syn += w.cross(i, n) * vi * vi;
    }
    const double s = v_in - drive;
    return {s * s / config.r_ref(), syn / config.r_ref()};
}

}  // namespace

double integration_power_bit(double v_in, int n, const BitVector& bits, const MemristorWeights& w,
                             const AdcConfig& config) {
    return stage_power(v_in, n, [&](int i) { return bits.bits[static_cast<std::size_t>(i)] > 0 ? 1.0 : 0.0; },
                       w, config)
        .p_int;
}

double synapse_power_bit(double v_in, int n, const BitVector& bits, const MemristorWeights& w,
                         const AdcConfig& config) {
    return stage_power(v_in, n, [&](int i) { return bits.bits[static_cast<std::size_t>(i)] > 0 ? 1.0 : 0.0; },
                       w, config)
        .p_syn;
}

PowerBreakdown conversion_power(double v_in, const BitVector& bits, const MemristorWeights& w,
                                const AdcConfig& config) {
    PowerBreakdown total;
    auto on = [&](int i) { return bits.bits[static_cast<std::size_t>(i)] > 0 ? 1.0 : 0.0; };
    for (int n = 0; n < config.n_bits(); ++n) total += stage_power(v_in, n, on, w, config);
    return total;
}

PowerBreakdown conversion_power(double v_in, const MemristorWeights& w, const AdcConfig& config) {
    return conversion_power(v_in, quantize_hard(v_in, w, config), w, config);
}

PowerBreakdown soft_conversion_power(double v_in, const SoftBitVector& soft,
                                     const MemristorWeights& w, const AdcConfig& config) {
    PowerBreakdown total;
    auto on = [&](int i) { return 0.5 * (soft.soft_bits[static_cast<std::size_t>(i)] + 1.0); };
    for (int n = 0; n < config.n_bits(); ++n) total += stage_power(v_in, n, on, w, config);
    return total;
}

void soft_conversion_power_backward(double v_in, const SoftBitVector& soft,
                                    const MemristorWeights& w, const AdcConfig& config,
                                    double g_total, double& grad_v, std::span<double> grad_bits,
                                    std::span<double> grad_w) {
    const int n_bits = config.n_bits();
    const double vr = config.v_ref();
    const double g = g_total / config.r_ref();
    const auto& b = soft.soft_bits;
    for (int n = 0; n < n_bits; ++n) {
        const auto un = static_cast<std::size_t>(n);
        double drive = w.ref(n) * vr;
        for (int i = n + 1; i < n_bits; ++i) {
            drive += w.cross(i, n) * vr * 0.5 * (b[static_cast<std::size_t>(i)] + 1.0);
        }
        const double s = v_in - drive;
        // integration: d(s^2) = 2 s ds ; synapse: linear in W, quadratic in V_i
        grad_v += g * (2.0 * s + 2.0 * v_in);
        grad_w[un] += g * (-2.0 * s * vr + vr * vr);
        for (int i = n + 1; i < n_bits; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const double h = 0.5 * (b[ui] + 1.0);
            const double wi = w.cross(i, n);
            grad_w[w.cross_index(i, n)] += g * (-2.0 * s * vr * h + vr * vr * h * h);
            const double g_h = g * (-2.0 * s * vr * wi + 2.0 * wi * vr * vr * h);
            grad_bits[ui] += 0.5 * g_h;
        }
    }
}

PowerBreakdown expected_power(const AdcInputBatch& batch, std::span<const MemristorWeights> w_tilde,
                              const AdcConfig& config, const NoiseSpec& noise,
                              std::size_t mc_draws, std::uint64_t draw_base) {
    if (mc_draws == 0) throw std::invalid_argument("expected_power: mc_draws must be >= 1");
    if (w_tilde.size() != batch.adcs) {
        throw std::invalid_argument("expected_power: one weight set per ADC required");
    }
    if (batch.volts.size() != batch.samples * batch.steps * batch.adcs || batch.samples == 0) {
        throw std::invalid_argument("expected_power: malformed batch");
    }
    PowerBreakdown acc;
    const bool noisy = noise.active();
    for (std::size_t d = 0; d < mc_draws; ++d) {
        for (std::size_t s = 0; s < batch.samples; ++s) {
            for (std::size_t z = 0; z < batch.steps; ++z) {
                const std::uint64_t draw_id = draw_base + (d * batch.samples + s) * batch.steps + z;
                for (std::size_t j = 0; j < batch.adcs; ++j) {
                    const double v = batch.at(s, z, j);
                    if (noisy) {
                        const auto w = sample_weights(w_tilde[j], noise, draw_id, j);
                        acc += conversion_power(v, w, config);
                    } else {
                        acc += conversion_power(v, w_tilde[j], config);
                    }
                }
            }
        }
    }
    return acc.scaled(1.0 / static_cast<double>(mc_draws * batch.samples));
}

}  // namespace memsar
