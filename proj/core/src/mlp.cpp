#include "memsar/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "memsar/rng.hpp"

namespace memsar {

MlpParams MlpParams::init(std::span<const std::size_t> widths, std::uint64_t seed) {
    if (widths.size() < 2) throw std::invalid_argument("MlpParams::init: need at least two widths");
    MlpParams p;
    rng::Stream stream(rng::derive({seed, 0x6d6c70ULL}));
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        if (widths[l] == 0 || widths[l + 1] == 0) {
            throw std::invalid_argument("MlpParams::init: zero width");
        }
        DenseLayer layer(widths[l], widths[l + 1]);
        const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
        for (double& w : layer.weight) w = stream.uniform(-bound, bound);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

MlpParams MlpParams::zeros_like(const MlpParams& shape) {
    MlpParams p;
    for (const auto& l : shape.layers) p.layers.emplace_back(l.inputs, l.outputs);
    return p;
}

std::size_t MlpParams::input_width() const {
    if (layers.empty()) throw std::logic_error("MlpParams: no layers");
    return layers.front().inputs;
}

std::size_t MlpParams::output_width() const {
    if (layers.empty()) throw std::logic_error("MlpParams: no layers");
    return layers.back().outputs;
}

std::size_t MlpParams::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

void MlpParams::set_zero() noexcept {
    for (auto& l : layers) {
        std::fill(l.weight.begin(), l.weight.end(), 0.0);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> p(logits.begin(), logits.end());
    if (p.empty()) return p;
    const double top = *std::max_element(p.begin(), p.end());
    double sum = 0.0;
    for (double& v : p) {
        v = std::exp(v - top);
        sum += v;
    }
    for (double& v : p) v /= sum;
    return p;
}

std::vector<double> tempered_softmax(std::span<const double> logits, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("tempered_softmax: tau must be positive");
    std::vector<double> scaled(logits.begin(), logits.end());
    for (double& v : scaled) v /= tau;
    return softmax(scaled);
}

std::size_t argmax(std::span<const double> values) noexcept {
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] > values[best]) best = k;
    }
    return best;
}

void forward(const MlpParams& params, std::span<const double> input, MlpTrace& trace) {
    if (input.size() != params.input_width()) {
        throw std::invalid_argument("mlp forward: expected input width " +
                                    std::to_string(params.input_width()) + ", got " +
                                    std::to_string(input.size()));
    }
    const std::size_t depth = params.layers.size();
    trace.inputs.resize(depth);
    trace.inputs[0].assign(input.begin(), input.end());
    std::vector<double> z;
    for (std::size_t l = 0; l < depth; ++l) {
        const auto& layer = params.layers[l];
        const auto& x = trace.inputs[l];
        z.assign(layer.bias.begin(), layer.bias.end());
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            const double* row = layer.weight.data() + o * layer.inputs;
            double acc = 0.0;
            for (std::size_t i = 0; i < layer.inputs; ++i) acc += row[i] * x[i];
            z[o] += acc;
        }
        if (l + 1 < depth) {
            auto& next = trace.inputs[l + 1];
            next.resize(z.size());
            for (std::size_t o = 0; o < z.size(); ++o) next[o] = z[o] > 0.0 ? z[o] : 0.0;
        }
    }
    trace.out.logits = z;
    trace.out.probs = softmax(z);
}

LogitsAndProbs forward(const MlpParams& params, std::span<const double> input) {
    MlpTrace trace;
    forward(params, input, trace);
    return std::move(trace.out);
}

void backward(const MlpParams& params, const MlpTrace& trace, std::span<const double> grad_logits,
              MlpParams& grads, std::span<double> grad_input) {
    const std::size_t depth = params.layers.size();
    std::vector<double> g(grad_logits.begin(), grad_logits.end());
    std::vector<double> g_prev;
    for (std::size_t l = depth; l-- > 0;) {
        const auto& layer = params.layers[l];
        auto& gl = grads.layers[l];
        const auto& x = trace.inputs[l];
        const bool need_input = l > 0 || !grad_input.empty();
        g_prev.assign(need_input ? layer.inputs : 0, 0.0);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            const double go = g[o];
            if (go == 0.0) continue;
            gl.bias[o] += go;
            double* grow = gl.weight.data() + o * layer.inputs;
            const double* wrow = layer.weight.data() + o * layer.inputs;
            for (std::size_t i = 0; i < layer.inputs; ++i) grow[i] += go * x[i];
            if (need_input) {
                for (std::size_t i = 0; i < layer.inputs; ++i) g_prev[i] += go * wrow[i];
            }
        }
        if (l > 0) {
            // ReLU: the stored input of layer l is relu(z_{l-1}).
            for (std::size_t i = 0; i < g_prev.size(); ++i) {
                if (x[i] <= 0.0) g_prev[i] = 0.0;
            }
            g.swap(g_prev);
        } else if (!grad_input.empty()) {
            std::copy(g_prev.begin(), g_prev.end(), grad_input.begin());
        }
    }
}

}  // namespace memsar
