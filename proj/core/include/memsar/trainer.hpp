#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "memsar/dataset.hpp"
#include "memsar/losses.hpp"
#include "memsar/optimizer.hpp"
#include "memsar/power.hpp"
#include "memsar/system.hpp"

namespace memsar {

struct TrainConfig {
    std::size_t epochs = 20;
    std::size_t batch_size = 1024;
    OptimizerConfig optimizer;
    ObjectiveWeights objective;
    std::size_t mc_draws = 1;
    std::size_t eval_mc_draws = 1;
    std::uint64_t seed = 0;
    // Geometric sharpness schedule from the ADC's A to this value over the
    // epochs; disabled when empty.
    std::optional<double> sharpness_final;

    void validate() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// One row per epoch. Loss terms are means over the epoch's training batches;
// accuracy and power come from a hard-bit evaluation of the test indices.
struct MetricsRecord {
    std::size_t epoch = 0;
    double accuracy = 0.0;  // percent
    double ce = 0.0;
    double kd = 0.0;
    double reg = 0.0;
    double p_int = 0.0;  // watts
    double p_syn = 0.0;
    double p_total = 0.0;
    double beta = 0.0;
    double sigma = 0.0;
    std::size_t clamped = 0;

    friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

struct TrainResult {
    SystemParams params;
    std::vector<MetricsRecord> records;
};

class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EvalResult {
    double accuracy = 0.0;  // percent
    PowerBreakdown power;   // mean per sample, summed over ADCs and time steps
    std::size_t evaluated = 0;
};

// Hard-bit forward passes with fresh noise per conversion. Repetition d of
// sample position i reads draws (d * |indices| + i) * Z + z.
EvalResult evaluate(const SystemParams& params, const LabeledDataset& data,
                    std::span<const std::size_t> indices, const NoiseSpec& noise,
                    std::size_t mc_draws = 1);

// Mini-batch descent on ce + alpha * reg, noise-free.
TrainResult train_teacher(const SystemParams& init, const LabeledDataset& data,
                          std::span<const std::size_t> train, std::span<const std::size_t> test,
                          const TrainConfig& config);

// Noisy power-aware training. `teacher` may be null when gamma = 0.
// Training noise and evaluation noise are separate streams.
TrainResult train_student(const SystemParams& init, const LabeledDataset& data,
                          std::span<const std::size_t> train, std::span<const std::size_t> test,
                          const TeacherTargets* teacher, const TrainConfig& config,
                          const NoiseSpec& train_noise, const NoiseSpec& eval_noise);

}  // namespace memsar
