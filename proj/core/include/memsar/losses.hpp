#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "memsar/dataset.hpp"
#include "memsar/noise.hpp"
#include "memsar/system.hpp"

namespace memsar {

// Probabilities below this floor are clamped inside log().
inline constexpr double kProbabilityFloor = 1e-12;

enum class Reduction { mean, sum };

struct ClampedValue {
    double value = 0.0;
    std::size_t clamped = 0;  // number of clamped log arguments
};

using ProbabilityBatch = std::vector<std::vector<double>>;

// -sum_r log p_r[label_r], divided by the batch size under Reduction::mean.
ClampedValue cross_entropy(const ProbabilityBatch& probs, std::span<const int> labels,
                           Reduction reduction = Reduction::mean);

// sum_r sum_k t_k log(t_k / s_k): KL from the softened teacher to the student.
ClampedValue kd_divergence(const ProbabilityBatch& student, const ProbabilityBatch& teacher,
                           Reduction reduction = Reduction::mean);

struct LossReport {
    double ce = 0.0;
    double kd = 0.0;
    double reg = 0.0;            // summed over ADCs
    double power_penalty = 0.0;  // P_D in penalty units
    double power_watts = 0.0;    // P_D in watts (soft bits)
    double total = 0.0;
    std::size_t clamped = 0;
};

struct ObjectiveWeights {
    double alpha = 0.1;
    double beta = 0.0;
    double gamma = 0.0;
    double tau = 2.0;
    Reduction reduction = Reduction::mean;
    // true: KD uses softmax(z_student / tau) instead of the plain student probs.
    bool soften_student = false;
    // P_D is divided by this before weighting with beta (default: microwatts).
    double power_unit_watts = 1e-6;

    friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;
};

// tau-softened teacher probabilities for every sample of a dataset, from the
// teacher's noise-free hard-bit chain.
using TeacherTargets = std::vector<std::vector<double>>;
TeacherTargets teacher_targets(const SystemParams& teacher, const LabeledDataset& data, double tau);

// Monte Carlo student objective
//   (1/D) sum_d [ce + gamma tau^2 kd + beta P_D / unit] + alpha sum_adc reg(W~)
// on a mini-batch. Conversion (d, b, z) of the batch reads noise draw
// draw_base + (d * |batch| + b) * Z + z. If grads is non-null the exact
// gradient of `total` is accumulated into it.
LossReport batch_objective(const SystemParams& params, const LabeledDataset& data,
                           std::span<const std::size_t> batch, const ObjectiveWeights& weights,
                           const TeacherTargets* teacher, const NoiseSpec& noise,
                           std::size_t mc_draws, std::uint64_t draw_base, SystemGrads* grads);

// ce + alpha * reg, noise-free, no power term.
LossReport teacher_loss(const SystemParams& psi, const LabeledDataset& data,
                        std::span<const std::size_t> batch, double alpha,
                        Reduction reduction = Reduction::mean, SystemGrads* grads = nullptr);

LossReport student_loss(const SystemParams& theta, const LabeledDataset& data,
                        std::span<const std::size_t> batch, const TeacherTargets* teacher,
                        const ObjectiveWeights& weights, const NoiseSpec& noise,
                        std::size_t mc_draws, std::uint64_t draw_base = 0,
                        SystemGrads* grads = nullptr);

}  // namespace memsar
