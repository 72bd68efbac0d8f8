#pragma once

// Fully connected classifier head: Dense -> ReLU -> ... -> Dense -> softmax,
// with a hand-written reverse pass.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace memsar {

struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weight;  // [output][input]
    std::vector<double> bias;

    DenseLayer() = default;
    DenseLayer(std::size_t in, std::size_t out)
        : inputs(in), outputs(out), weight(in * out, 0.0), bias(out, 0.0) {}

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct MlpParams {
    std::vector<DenseLayer> layers;

    // Zero biases, weights uniform in +-1/sqrt(fan_in).
    static MlpParams init(std::span<const std::size_t> widths, std::uint64_t seed);
    // Same shapes, all zeros.
    static MlpParams zeros_like(const MlpParams& shape);

    std::size_t input_width() const;
    std::size_t output_width() const;
    std::size_t parameter_count() const noexcept;
    void set_zero() noexcept;

    friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

struct LogitsAndProbs {
    std::vector<double> logits;
    std::vector<double> probs;
};

// Intermediate values kept for the reverse pass.
struct MlpTrace {
    std::vector<std::vector<double>> inputs;  // input of every layer (post-ReLU)
    LogitsAndProbs out;
};

std::vector<double> softmax(std::span<const double> logits);
// softmax(logits / tau); rejects tau <= 0.
std::vector<double> tempered_softmax(std::span<const double> logits, double tau);

// First maximal entry.
std::size_t argmax(std::span<const double> values) noexcept;

LogitsAndProbs forward(const MlpParams& params, std::span<const double> input);
void forward(const MlpParams& params, std::span<const double> input, MlpTrace& trace);

// Accumulates parameter gradients into `grads` (same shapes as params) and, if
// non-empty, writes dL/dinput into grad_input.
void backward(const MlpParams& params, const MlpTrace& trace, std::span<const double> grad_logits,
              MlpParams& grads, std::span<double> grad_input = {});

}  // namespace memsar
