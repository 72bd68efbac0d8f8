#pragma once

// The full acquisition chain theta = {theta1, W~, theta2}:
//
//   x[z] --H(theta1)--> y[z] --calibration--> v[z] --ADC_c--> q[z] --MLP--> p
//
// One ADC per frontend channel converts all Z time samples of that channel.
// The MLP sees the codes of every (z, c) pair, flattened z-major and scaled
// by 2^-N.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "memsar/adc.hpp"
#include "memsar/dataset.hpp"
#include "memsar/frontend.hpp"
#include "memsar/mlp.hpp"
#include "memsar/noise.hpp"
#include "memsar/power.hpp"

namespace memsar {

struct SystemShape {
    FrontendKind frontend = FrontendKind::fourier;
    std::size_t sensors = 16;           // M
    std::size_t frontend_outputs = 4;   // J
    std::size_t time_samples = 3;       // Z
    std::size_t num_classes = 32;
    std::vector<std::size_t> hidden{64};
};

struct FrozenGroups {
    bool frontend = false;
    bool adc = false;
    bool net = false;

    friend bool operator==(const FrozenGroups&, const FrozenGroups&) = default;
};

struct SystemParams {
    AnalogMap frontend;
    Calibration calibration;
    AdcConfig adc{1};
    std::vector<MemristorWeights> adcs;
    MlpParams net;
    std::size_t time_samples = 1;
    FrozenGroups frozen;

    // Classical frontend, uniform ADCs, identity calibration, random MLP.
    static SystemParams init(const SystemShape& shape, const AdcConfig& adc, std::uint64_t seed);

    std::size_t channels() const noexcept { return frontend.channels(); }
    std::size_t conversions() const noexcept { return channels() * time_samples; }
    double code_scale() const noexcept { return 1.0 / static_cast<double>(adc.levels()); }
    void validate() const;
};

// Fits the fixed ADC-range calibration from frontend outputs on `indices`.
void calibrate(SystemParams& params, const LabeledDataset& data, std::span<const std::size_t> indices);

struct SystemGrads {
    std::vector<double> theta1;
    std::vector<MemristorWeights> adcs;
    MlpParams net;

    static SystemGrads zeros_like(const SystemParams& params);
    void set_zero() noexcept;
};

// Forward record of one sample through the soft (training) chain.
struct ChainTrace {
    std::vector<double> y;                 // [z][c] frontend output
    std::vector<double> v;                 // [z][c] ADC input voltage
    std::vector<SoftBitVector> soft;       // [z][c]
    std::vector<MemristorWeights> used;    // [z][c] realized weights, only when noisy
    std::vector<double> net_input;
    MlpTrace mlp;
    PowerBreakdown power;                  // summed over conversions
};

// Conversion (z, c) uses draw_id = draw_base + z and ADC index c.
void chain_forward_soft(const SystemParams& params, const FrontendMatrix& mat,
                        std::span<const double> x, const NoiseSpec& noise, std::uint64_t draw_base,
                        ChainTrace& trace);

// Reverse pass given dL/dlogits and dL/dP (P = trace.power.total()).
void chain_backward_soft(const SystemParams& params, const FrontendMatrix& mat,
                         std::span<const double> x, const ChainTrace& trace,
                         std::span<const double> grad_logits, double grad_power,
                         SystemGrads& grads);

struct HardOutput {
    LogitsAndProbs out;
    std::size_t predicted = 0;
    PowerBreakdown power;
    std::vector<std::uint32_t> codes;  // [z][c]
};

// Inference path with comparator bits.
HardOutput chain_forward_hard(const SystemParams& params, const FrontendMatrix& mat,
                              std::span<const double> x, const NoiseSpec& noise,
                              std::uint64_t draw_base);

}  // namespace memsar
