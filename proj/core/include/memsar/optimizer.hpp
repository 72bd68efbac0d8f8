#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "memsar/system.hpp"

namespace memsar {

enum class OptimizerKind { sgd, adam };

std::string_view to_string(OptimizerKind kind) noexcept;
OptimizerKind parse_optimizer_kind(std::string_view name);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

// p -= lr * g
void sgd_update(std::span<double> params, std::span<const double> grads, double learning_rate) noexcept;

// One bias-corrected Adam step; `step` is 1-based.
void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, std::size_t step, const OptimizerConfig& config) noexcept;

// Applies the configured rule to every unfrozen group of a SystemParams.
class Optimizer {
public:
    Optimizer(const OptimizerConfig& config, const SystemParams& shape);

    void step(SystemParams& params, const SystemGrads& grads);
    std::size_t steps() const noexcept { return step_; }

private:
    struct Slot {
        std::vector<double> m;
        std::vector<double> v;
    };
    void apply(std::span<double> p, std::span<const double> g, Slot& slot);

    OptimizerConfig config_;
    std::size_t step_ = 0;
    std::vector<Slot> slots_;
};

}  // namespace memsar
