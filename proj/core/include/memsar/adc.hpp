#pragma once

// Loop-unrolled memristive SAR quantizer.
//
// Every stage n (MSB = N-1 .. LSB = 0) compares the input with a reference
//
//     V_ref^(n) = (W_ref^(n) + sum_{i>n} W_i^(n) * (B_i + 1) / 2) * v_w
//
// built from the bits already decided. Bits live in {-1, +1}; all vectors
// below are indexed by bit position, so element N-1 is the MSB.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace memsar {

class AdcConfig {
public:
    // v_ref defaults to the supply voltage.
    explicit AdcConfig(int n_bits, double supply_voltage = 1.0, double r_ref = 1e6,
                       double sharpness_a = 10.0, std::optional<double> v_ref = std::nullopt);

    int n_bits() const noexcept { return n_bits_; }
    double supply_voltage() const noexcept { return supply_; }
    double v_w() const noexcept { return v_w_; }
    double v_ref() const noexcept { return v_ref_; }
    double r_ref() const noexcept { return r_ref_; }
    double sharpness_a() const noexcept { return sharpness_; }
    std::size_t levels() const noexcept { return std::size_t{1} << n_bits_; }

    AdcConfig with_sharpness(double a) const;

    friend bool operator==(const AdcConfig&, const AdcConfig&) = default;

private:
    int n_bits_;
    double supply_;
    double v_w_;
    double v_ref_;
    double r_ref_;
    double sharpness_;
};

// Trainable tensor W of one ADC: N reference weights followed by the
// N(N-1)/2 cross weights W_i^(n), i > n, in the flat order
// i = 1..N-1, n = 0..i-1.
class MemristorWeights {
public:
    explicit MemristorWeights(int n_bits);

    static std::size_t count(int n_bits) noexcept {
        const auto n = static_cast<std::size_t>(n_bits);
        return n + n * (n - 1) / 2;
    }
    std::size_t cross_index(int i, int n) const noexcept {
        return static_cast<std::size_t>(n_bits_) + static_cast<std::size_t>(i * (i - 1) / 2 + n);
    }

    int n_bits() const noexcept { return n_bits_; }
    std::size_t size() const noexcept { return values_.size(); }

    double ref(int n) const noexcept { return values_[static_cast<std::size_t>(n)]; }
    double& ref(int n) noexcept { return values_[static_cast<std::size_t>(n)]; }
    double cross(int i, int n) const noexcept { return values_[cross_index(i, n)]; }
    double& cross(int i, int n) noexcept { return values_[cross_index(i, n)]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept;

    friend bool operator==(const MemristorWeights&, const MemristorWeights&) = default;

private:
    int n_bits_;
    std::vector<double> values_;
};

struct BitVector {
    std::vector<int> bits;  // bits[i] = B_i in {-1, +1}
    std::uint32_t code = 0;
};

struct SoftBitVector {
    std::vector<double> soft_bits;  // each in (-1, 1)
    double value = 0.0;             // sum_i (b_i + 1) / 2 * 2^i
};

// W_ref^(n) = 2^n, W_i^(n) = 2^i: thresholds at every multiple of v_w.
MemristorWeights uniform_weights(const AdcConfig& config);

// `higher_bits` is indexed by bit position; only entries n+1..N-1 are read.
double reference_voltage(int n, std::span<const int> higher_bits, const MemristorWeights& w,
                         const AdcConfig& config);

// Comparator with sign(0) = +1. Inputs outside [0, supply] saturate.
BitVector quantize_hard(double v_in, const MemristorWeights& w, const AdcConfig& config);

// tanh(A * (v - V_ref)) with the soft bits fed forward into later references.
SoftBitVector quantize_soft(double v_in, const MemristorWeights& w, const AdcConfig& config);

// Reverse pass through quantize_soft. `grad_bits` holds dL/db_i on entry and is
// consumed. Gradients are accumulated into grad_v and grad_w.
void quantize_soft_backward(double v_in, const MemristorWeights& w, const AdcConfig& config,
                            const SoftBitVector& forward, std::span<double> grad_bits,
                            double& grad_v, std::span<double> grad_w);

// Bit index that flips -1 -> +1 between codes j-1 and j, for j in [1, 2^N - 1].
int region_level(std::size_t j, int n_bits);

// Right edges E_1 .. E_{2^N - 1} in volts.
std::vector<double> region_edges(const MemristorWeights& w, const AdcConfig& config);

// sum_j exp(max(E_j - E_{j+1}, 0)) with E_{2^N} = supply. If grad_w is set,
// scale * dL/dW is added to it.
double collapse_regularizer(const MemristorWeights& w, const AdcConfig& config,
                            std::span<double> grad_w = {}, double scale = 1.0);

// Distinct output codes over a uniform sweep of [0, supply).
std::size_t effective_levels(const MemristorWeights& w, const AdcConfig& config,
                             std::size_t sweep_points);

}  // namespace memsar
