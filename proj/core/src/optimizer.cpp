#include "memsar/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace memsar {

std::string_view to_string(OptimizerKind kind) noexcept {
    return kind == OptimizerKind::sgd ? "sgd" : "adam";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
    if (name == "sgd") return OptimizerKind::sgd;
    if (name == "adam") return OptimizerKind::adam;
    throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

void sgd_update(std::span<double> params, std::span<const double> grads, double learning_rate) noexcept {
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= learning_rate * grads[k];
}

void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, std::size_t step, const OptimizerConfig& config) noexcept {
    const double t = static_cast<double>(step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = grads[k];
        m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g;
        v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g * g;
        const double m_hat = m[k] / c1;
        const double v_hat = v[k] / c2;
        params[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
}

Optimizer::Optimizer(const OptimizerConfig& config, const SystemParams& shape) : config_(config) {
    if (!(config.learning_rate > 0.0)) throw std::invalid_argument("Optimizer: learning rate must be positive");
    auto add = [&](std::size_t n) {
        Slot s;
        if (config_.kind == OptimizerKind::adam) {
            s.m.assign(n, 0.0);
            s.v.assign(n, 0.0);
        }
        slots_.push_back(std::move(s));
    };
    add(shape.frontend.theta().size());
    for (const auto& w : shape.adcs) add(w.size());
    for (const auto& l : shape.net.layers) {
        add(l.weight.size());
        add(l.bias.size());
    }
}

void Optimizer::apply(std::span<double> p, std::span<const double> g, Slot& slot) {
    if (config_.kind == OptimizerKind::sgd) {
        sgd_update(p, g, config_.learning_rate);
    } else {
        adam_update(p, g, slot.m, slot.v, step_, config_);
    }
}

void Optimizer::step(SystemParams& params, const SystemGrads& grads) {
    ++step_;
    std::size_t s = 0;
    if (!params.frozen.frontend) apply(params.frontend.theta(), grads.theta1, slots_[s]);
    ++s;
    for (std::size_t c = 0; c < params.adcs.size(); ++c, ++s) {
        if (!params.frozen.adc) apply(params.adcs[c].values(), grads.adcs[c].values(), slots_[s]);
    }
    for (std::size_t l = 0; l < params.net.layers.size(); ++l) {
        auto& layer = params.net.layers[l];
        const auto& gl = grads.net.layers[l];
        if (!params.frozen.net) {
            apply(layer.weight, gl.weight, slots_[s]);
            apply(layer.bias, gl.bias, slots_[s + 1]);
        }
        s += 2;
    }
}

}  // namespace memsar
