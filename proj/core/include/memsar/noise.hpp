#pragma once

// Gaussian read/write noise on memristor weights, W = W~ + eps.
//
// The perturbation of weight k of ADC a in conversion `draw_id` is
// sigma_k * z, with z a standard normal keyed by (seed, draw_id, a, k). Two
// noise specs that differ only in sigma therefore share the same z.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "memsar/adc.hpp"

namespace memsar {

struct NoiseSpec {
    double sigma = 0.0;
    // Optional per-weight override, in MemristorWeights flat order.
    std::vector<double> per_weight_sigma;
    std::uint64_t seed = 0;

    double sigma_for(std::size_t weight_index) const noexcept {
        return per_weight_sigma.empty() ? sigma : per_weight_sigma[weight_index];
    }
    bool active() const noexcept;
    void validate() const;

    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

// Standard normal for one (draw, adc, weight) cell of the stream.
double noise_variate(const NoiseSpec& noise, std::uint64_t draw_id, std::uint64_t adc,
                     std::uint64_t weight) noexcept;

MemristorWeights sample_weights(const MemristorWeights& w_tilde, const NoiseSpec& noise,
                                std::uint64_t draw_id, std::uint64_t adc = 0);

// Allocation-free variant for hot loops; `out` must have the same size.
void sample_weights_into(const MemristorWeights& w_tilde, const NoiseSpec& noise,
                         std::uint64_t draw_id, std::uint64_t adc, MemristorWeights& out);

}  // namespace memsar
