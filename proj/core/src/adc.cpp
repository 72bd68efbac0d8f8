#include "memsar/adc.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace memsar {

AdcConfig::AdcConfig(int n_bits, double supply_voltage, double r_ref, double sharpness_a,
                     std::optional<double> v_ref)
    : n_bits_(n_bits),
      supply_(supply_voltage),
      v_w_(0.0),
      v_ref_(v_ref.value_or(supply_voltage)),
      r_ref_(r_ref),
      sharpness_(sharpness_a) {
    if (n_bits < 1 || n_bits > 16) {
        throw std::invalid_argument("AdcConfig: n_bits must be in [1, 16], got " +
                                    std::to_string(n_bits));
    }
    if (!(supply_ > 0.0) || !(v_ref_ > 0.0) || !(r_ref_ > 0.0)) {
        throw std::invalid_argument("AdcConfig: voltages and r_ref must be strictly positive");
    }
    if (!(sharpness_ > 0.0)) {
        throw std::invalid_argument("AdcConfig: sharpness_a must be positive");
    }
    v_w_ = supply_ / static_cast<double>(levels());
}

AdcConfig AdcConfig::with_sharpness(double a) const {
    return AdcConfig(n_bits_, supply_, r_ref_, a, v_ref_);
}

MemristorWeights::MemristorWeights(int n_bits) : n_bits_(n_bits) {
    if (n_bits < 1) throw std::invalid_argument("MemristorWeights: n_bits must be >= 1");
    values_.assign(count(n_bits), 0.0);
}

bool MemristorWeights::all_finite() const noexcept {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

MemristorWeights uniform_weights(const AdcConfig& config) {
    const int n_bits = config.n_bits();
    MemristorWeights w(n_bits);
    for (int n = 0; n < n_bits; ++n) {
        w.ref(n) = std::ldexp(1.0, n);
        for (int i = n + 1; i < n_bits; ++i) w.cross(i, n) = std::ldexp(1.0, i);
    }
    return w;
}

double reference_voltage(int n, std::span<const int> higher_bits, const MemristorWeights& w,
                         const AdcConfig& config) {
    const int n_bits = config.n_bits();
    if (n < 0 || n >= n_bits) throw std::out_of_range("reference_voltage: bit index");
    if (higher_bits.size() < static_cast<std::size_t>(n_bits) && n + 1 < n_bits) {
        throw std::invalid_argument("reference_voltage: higher_bits must span all bit positions");
    }
    double r = w.ref(n);
    for (int i = n + 1; i < n_bits; ++i) {
        if (higher_bits[static_cast<std::size_t>(i)] > 0) r += w.cross(i, n);
    }
    return r * config.v_w();
}

BitVector quantize_hard(double v_in, const MemristorWeights& w, const AdcConfig& config) {
    const int n_bits = config.n_bits();
    BitVector out;
    out.bits.assign(static_cast<std::size_t>(n_bits), -1);
    const double v_w = config.v_w();
    for (int n = n_bits - 1; n >= 0; --n) {
        double r = w.ref(n);
        for (int i = n + 1; i < n_bits; ++i) {
            if (out.bits[static_cast<std::size_t>(i)] > 0) r += w.cross(i, n);
        }
        if (v_in - r * v_w >= 0.0) {
            out.bits[static_cast<std::size_t>(n)] = 1;
            out.code |= (1u << n);
        }
    }
    return out;
}

SoftBitVector quantize_soft(double v_in, const MemristorWeights& w, const AdcConfig& config) {
    const int n_bits = config.n_bits();
    const double a = config.sharpness_a();
    const double v_w = config.v_w();
    SoftBitVector out;
    out.soft_bits.assign(static_cast<std::size_t>(n_bits), 0.0);
    auto& b = out.soft_bits;
    for (int n = n_bits - 1; n >= 0; --n) {
        double r = w.ref(n);
        for (int i = n + 1; i < n_bits; ++i) r += w.cross(i, n) * 0.5 * (b[static_cast<std::size_t>(i)] + 1.0);
        b[static_cast<std::size_t>(n)] = std::tanh(a * (v_in - r * v_w));
    }
    for (int i = 0; i < n_bits; ++i) {
        out.value += 0.5 * (b[static_cast<std::size_t>(i)] + 1.0) * std::ldexp(1.0, i);
    }
    return out;
}

void quantize_soft_backward(double v_in, const MemristorWeights& w, const AdcConfig& config,
                            const SoftBitVector& forward, std::span<double> grad_bits,
                            double& grad_v, std::span<double> grad_w) {
    (void)v_in;
    const int n_bits = config.n_bits();
    const double a = config.sharpness_a();
    const double v_w = config.v_w();
    const auto& b = forward.soft_bits;
    // Stage n reads bits above it, so walking LSB -> MSB finishes every
    // consumer of b_i before b_i itself is differentiated.
    for (int n = 0; n < n_bits; ++n) {
        const auto un = static_cast<std::size_t>(n);
        const double g_u = grad_bits[un] * (1.0 - b[un] * b[un]) * a;
        grad_v += g_u;
        const double g_r = -g_u * v_w;
        grad_w[un] += g_r;
        for (int i = n + 1; i < n_bits; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            grad_w[w.cross_index(i, n)] += g_r * 0.5 * (b[ui] + 1.0);
            grad_bits[ui] += g_r * 0.5 * w.cross(i, n);
        }
    }
}

int region_level(std::size_t j, int n_bits) {
    const std::size_t levels = std::size_t{1} << n_bits;
    if (j < 1 || j >= levels) {
        throw std::out_of_range("region_level: j must be in [1, 2^N - 1], got " + std::to_string(j));
    }
    return std::countr_one(j - 1);
}

namespace {

double edge_value(std::size_t j, const MemristorWeights& w, int n_bits) {
    const std::size_t code = j - 1;
    const int l = std::countr_one(code);
    double e = w.ref(l);
    for (int i = l + 1; i < n_bits; ++i) {
        if ((code >> i) & 1u) e += w.cross(i, l);
    }
    return e;
}

void edge_grad(std::size_t j, const MemristorWeights& w, int n_bits, double g,
               std::span<double> grad_w) {
    const std::size_t code = j - 1;
    const int l = std::countr_one(code);
    grad_w[static_cast<std::size_t>(l)] += g;
    for (int i = l + 1; i < n_bits; ++i) {
        if ((code >> i) & 1u) grad_w[w.cross_index(i, l)] += g;
    }
}

}  // namespace

std::vector<double> region_edges(const MemristorWeights& w, const AdcConfig& config) {
    const int n_bits = config.n_bits();
    std::vector<double> edges(config.levels() - 1);
    for (std::size_t j = 1; j < config.levels(); ++j) {
        edges[j - 1] = edge_value(j, w, n_bits) * config.v_w();
    }
    return edges;
}

double collapse_regularizer(const MemristorWeights& w, const AdcConfig& config,
                            std::span<double> grad_w, double scale) {
    const int n_bits = config.n_bits();
    const auto edges = region_edges(w, config);
    const std::size_t count = edges.size();
    double total = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double next = (k + 1 < count) ? edges[k + 1] : config.supply_voltage();
        const double gap = edges[k] - next;
        if (gap > 0.0) {
            const double term = std::exp(gap);
            total += term;
            if (!grad_w.empty()) {
                const double g = scale * term * config.v_w();
                edge_grad(k + 1, w, n_bits, g, grad_w);
                if (k + 1 < count) edge_grad(k + 2, w, n_bits, -g, grad_w);
            }
        } else {
            total += 1.0;
        }
    }
    return total;
}

std::size_t effective_levels(const MemristorWeights& w, const AdcConfig& config,
                             std::size_t sweep_points) {
    if (sweep_points < 16 * config.levels()) {
        throw std::invalid_argument("effective_levels: sweep_points must be >= 16 * 2^N");
    }
    std::vector<bool> seen(config.levels(), false);
    std::size_t distinct = 0;
    const double step = config.supply_voltage() / static_cast<double>(sweep_points);
    for (std::size_t k = 0; k < sweep_points; ++k) {
        const auto code = quantize_hard(static_cast<double>(k) * step, w, config).code;
        if (!seen[code]) {
            seen[code] = true;
            ++distinct;
        }
    }
    return distinct;
}

}  // namespace memsar
