#include "memsar/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace memsar {

SystemParams SystemParams::init(const SystemShape& shape, const AdcConfig& adc, std::uint64_t seed) {
    SystemParams p;
    p.frontend = AnalogMap(shape.frontend, shape.sensors, shape.frontend_outputs);
    p.adc = adc;
    p.time_samples = shape.time_samples;
    const std::size_t channels = p.frontend.channels();
    p.calibration.offset.assign(channels, 0.0);
    p.calibration.gain.assign(channels, 1.0);
    p.adcs.assign(channels, uniform_weights(adc));
    std::vector<std::size_t> widths{channels * shape.time_samples};
    widths.insert(widths.end(), shape.hidden.begin(), shape.hidden.end());
    widths.push_back(shape.num_classes);
    p.net = MlpParams::init(widths, seed);
    return p;
}

void SystemParams::validate() const {
    const std::size_t c = channels();
    if (adcs.size() != c) throw std::invalid_argument("SystemParams: one ADC per channel required");
    for (const auto& w : adcs) {
        if (w.n_bits() != adc.n_bits()) throw std::invalid_argument("SystemParams: ADC bit depth mismatch");
    }
    if (calibration.offset.size() != c || calibration.gain.size() != c) {
        throw std::invalid_argument("SystemParams: calibration size mismatch");
    }
    if (net.input_width() != conversions()) {
        throw std::invalid_argument("SystemParams: net input width must equal channels * time samples");
    }
}

void calibrate(SystemParams& params, const LabeledDataset& data, std::span<const std::size_t> indices) {
    const std::size_t channels = params.channels();
    if (data.sensors != params.frontend.inputs() || data.time_samples != params.time_samples) {
        throw std::invalid_argument("calibrate: dataset shape does not match the system");
    }
    std::vector<double> lo(channels, std::numeric_limits<double>::infinity());
    std::vector<double> hi(channels, -std::numeric_limits<double>::infinity());
    const auto mat = params.frontend.materialize();
    std::vector<double> y(channels);
    for (std::size_t i : indices) {
        for (std::size_t z = 0; z < data.time_samples; ++z) {
            apply_matrix(mat, data.time_slice(i, z), y);
            for (std::size_t c = 0; c < channels; ++c) {
                lo[c] = std::min(lo[c], y[c]);
                hi[c] = std::max(hi[c], y[c]);
            }
        }
    }
    if (indices.empty()) throw std::invalid_argument("calibrate: no samples");
    params.calibration = fit_calibration(lo, hi, params.adc.supply_voltage());
}

SystemGrads SystemGrads::zeros_like(const SystemParams& params) {
    SystemGrads g;
    g.theta1.assign(params.frontend.theta().size(), 0.0);
    g.adcs.assign(params.adcs.size(), MemristorWeights(params.adc.n_bits()));
    g.net = MlpParams::zeros_like(params.net);
    return g;
}

void SystemGrads::set_zero() noexcept {
    std::fill(theta1.begin(), theta1.end(), 0.0);
    for (auto& w : adcs) {
        auto v = w.values();
        std::fill(v.begin(), v.end(), 0.0);
    }
    net.set_zero();
}

void chain_forward_soft(const SystemParams& params, const FrontendMatrix& mat,
                        std::span<const double> x, const NoiseSpec& noise, std::uint64_t draw_base,
                        ChainTrace& trace) {
    const std::size_t C = params.channels();
    const std::size_t Z = params.time_samples;
    const std::size_t M = params.frontend.inputs();
    const bool noisy = noise.active();
    trace.y.resize(Z * C);
    trace.v.resize(Z * C);
    trace.soft.resize(Z * C);
    trace.net_input.resize(Z * C);
    if (!noisy) {
        trace.used.clear();
    } else if (trace.used.size() != Z * C) {
        trace.used.assign(Z * C, MemristorWeights(params.adc.n_bits()));
    }
    trace.power = {};
    const double scale = params.code_scale();
    for (std::size_t z = 0; z < Z; ++z) {
        apply_matrix(mat, x.subspan(z * M, M), std::span<double>(trace.y).subspan(z * C, C));
        for (std::size_t c = 0; c < C; ++c) {
            const std::size_t k = z * C + c;
            const double v = params.calibration.apply(c, trace.y[k]);
            trace.v[k] = v;
            const MemristorWeights* w = &params.adcs[c];
            if (noisy) {
                sample_weights_into(params.adcs[c], noise, draw_base + z, c, trace.used[k]);
                w = &trace.used[k];
            }
            trace.soft[k] = quantize_soft(v, *w, params.adc);
            trace.power += soft_conversion_power(v, trace.soft[k], *w, params.adc);
            trace.net_input[k] = trace.soft[k].value * scale;
        }
    }
    forward(params.net, trace.net_input, trace.mlp);
}

void chain_backward_soft(const SystemParams& params, const FrontendMatrix& mat,
                         std::span<const double> x, const ChainTrace& trace,
                         std::span<const double> grad_logits, double grad_power,
                         SystemGrads& grads) {
    const std::size_t C = params.channels();
    const std::size_t Z = params.time_samples;
    const std::size_t M = params.frontend.inputs();
    const int n_bits = params.adc.n_bits();
    const bool noisy = !trace.used.empty() && trace.used.size() == Z * C;
    const bool need_upstream = !params.frozen.frontend || !params.frozen.adc;

    std::vector<double> g_in(need_upstream ? Z * C : 0, 0.0);
    backward(params.net, trace.mlp, grad_logits, grads.net, g_in);
    if (!need_upstream) return;

    const double scale = params.code_scale();
    std::vector<double> grad_bits(static_cast<std::size_t>(n_bits));
    std::vector<double> g_y(Z * C, 0.0);
    for (std::size_t k = 0; k < Z * C; ++k) {
        const std::size_t c = k % C;
        const MemristorWeights& w = noisy ? trace.used[k] : params.adcs[c];
        for (int i = 0; i < n_bits; ++i) {
            grad_bits[static_cast<std::size_t>(i)] = g_in[k] * scale * 0.5 * std::ldexp(1.0, i);
        }
        double g_v = 0.0;
        auto gw = grads.adcs[c].values();
        if (grad_power != 0.0) {
            soft_conversion_power_backward(trace.v[k], trace.soft[k], w, params.adc, grad_power, g_v,
                                           grad_bits, gw);
        }
        quantize_soft_backward(trace.v[k], w, params.adc, trace.soft[k], grad_bits, g_v, gw);
        g_y[k] = g_v * params.calibration.gain[c];
    }
    if (params.frozen.frontend) return;
    for (std::size_t z = 0; z < Z; ++z) {
        grad_theta1_matrix(params.frontend, mat, std::span<const double>(g_y).subspan(z * C, C),
                           x.subspan(z * M, M), grads.theta1);
    }
}

HardOutput chain_forward_hard(const SystemParams& params, const FrontendMatrix& mat,
                              std::span<const double> x, const NoiseSpec& noise,
                              std::uint64_t draw_base) {
    const std::size_t C = params.channels();
    const std::size_t Z = params.time_samples;
    const std::size_t M = params.frontend.inputs();
    const bool noisy = noise.active();
    HardOutput out;
    out.codes.resize(Z * C);
    std::vector<double> y(C), net_input(Z * C);
    MemristorWeights used(params.adc.n_bits());
    const double scale = params.code_scale();
    for (std::size_t z = 0; z < Z; ++z) {
        apply_matrix(mat, x.subspan(z * M, M), y);
        for (std::size_t c = 0; c < C; ++c) {
            const double v = params.calibration.apply(c, y[c]);
            const MemristorWeights* w = &params.adcs[c];
            if (noisy) {
                sample_weights_into(params.adcs[c], noise, draw_base + z, c, used);
                w = &used;
            }
            const auto bits = quantize_hard(v, *w, params.adc);
            out.power += conversion_power(v, bits, *w, params.adc);
            out.codes[z * C + c] = bits.code;
            net_input[z * C + c] = static_cast<double>(bits.code) * scale;
        }
    }
    out.out = forward(params.net, net_input);
    out.predicted = argmax(out.out.logits);
    return out;
}

}  // namespace memsar
