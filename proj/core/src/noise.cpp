#include "memsar/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "memsar/rng.hpp"

namespace memsar {

bool NoiseSpec::active() const noexcept {
    if (per_weight_sigma.empty()) return sigma > 0.0;
    for (double s : per_weight_sigma) {
        if (s > 0.0) return true;
    }
    return false;
}

void NoiseSpec::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("NoiseSpec: sigma must be finite and >= 0");
    }
    for (double s : per_weight_sigma) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("NoiseSpec: per-weight sigma must be finite and >= 0");
        }
    }
}

double noise_variate(const NoiseSpec& noise, std::uint64_t draw_id, std::uint64_t adc,
                     std::uint64_t weight) noexcept {
    return rng::standard_normal(rng::derive({noise.seed, draw_id, adc, weight}));
}

void sample_weights_into(const MemristorWeights& w_tilde, const NoiseSpec& noise,
                         std::uint64_t draw_id, std::uint64_t adc, MemristorWeights& out) {
    if (out.size() != w_tilde.size()) {
        throw std::invalid_argument("sample_weights_into: size mismatch");
    }
    const auto src = w_tilde.values();
    auto dst = out.values();
    if (!noise.per_weight_sigma.empty() && noise.per_weight_sigma.size() != src.size()) {
        throw std::invalid_argument("sample_weights: per-weight sigma table has wrong size");
    }
    for (std::size_t k = 0; k < src.size(); ++k) {
        const double s = noise.sigma_for(k);
        dst[k] = s > 0.0 ? src[k] + s * noise_variate(noise, draw_id, adc, k) : src[k];
    }
}

MemristorWeights sample_weights(const MemristorWeights& w_tilde, const NoiseSpec& noise,
                                std::uint64_t draw_id, std::uint64_t adc) {
    MemristorWeights out(w_tilde.n_bits());
    sample_weights_into(w_tilde, noise, draw_id, adc, out);
    return out;
}

}  // namespace memsar
