#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "memsar/dataset.hpp"
#include "memsar/frontend.hpp"
#include "memsar/noise.hpp"
#include "memsar/system.hpp"
#include "memsar/trainer.hpp"

namespace memsar {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Task { synthetic, digits };
enum class Pipeline { uniform, noise_free, noisy_inference, noisy_training, distillation };

std::string_view to_string(Task task) noexcept;
std::string_view to_string(Pipeline pipeline) noexcept;
Task parse_task(std::string_view name);
Pipeline parse_pipeline(std::string_view name);

struct DigitsSource {
    std::filesystem::path train_images;
    std::filesystem::path train_labels;
    std::filesystem::path test_images;
    std::filesystem::path test_labels;
    // Use only the first n samples of a split; 0 keeps all.
    std::size_t train_limit = 0;
    std::size_t test_limit = 0;

    friend bool operator==(const DigitsSource&, const DigitsSource&) = default;
};

struct AdcSection {
    int n_bits = 3;
    std::size_t channels = 4;  // J
    double supply_voltage = 1.0;
    double r_ref = 1e6;
    std::optional<double> v_ref;
    double sharpness = 10.0;

    AdcConfig to_config() const;
    friend bool operator==(const AdcSection&, const AdcSection&) = default;
};

struct ExperimentConfig {
    Task task = Task::synthetic;
    Pipeline pipeline = Pipeline::distillation;
    std::uint64_t seed = 0;
    std::string output_dir;

    AdcSection adc;
    FrontendKind frontend = FrontendKind::fourier;
    std::vector<std::size_t> hidden{64};

    double sigma = 0.0;
    // Noise stream seed; derived from `seed` when empty.
    std::optional<std::uint64_t> noise_seed;

    TrainConfig train;
    // Teacher budget for the distillation pipeline; `train.epochs` when empty.
    std::optional<std::size_t> teacher_epochs;
    // Distillation student starts from the trained teacher instead of the
    // shared initialization.
    bool warm_start_student = false;

    // Synthetic data realization; its seed is derived from `seed` when empty.
    SyntheticSpec synthetic;
    std::optional<std::uint64_t> data_seed;
    DigitsSource digits;

    std::vector<double> sweep_beta;

    ExperimentConfig();
    void validate() const;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Strict parsing: unknown keys and malformed values raise ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
// Relative digit paths are resolved against the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

// 64-bit FNV-1a of the serialized config without its output directory.
std::uint64_t config_hash(const ExperimentConfig& config);

// Flag > config file > MEMSAR_OUTPUT_ROOT/<run name> > ./runs/<run name>.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config,
                                         const std::optional<std::string>& flag);

// Derived seeds used by `run`.
std::uint64_t effective_noise_seed(const ExperimentConfig& config) noexcept;
std::uint64_t effective_data_seed(const ExperimentConfig& config) noexcept;
NoiseSpec training_noise(const ExperimentConfig& config);
NoiseSpec evaluation_noise(const ExperimentConfig& config);

LabeledDataset load_task_data(const ExperimentConfig& config);
SystemShape system_shape(const ExperimentConfig& config, const LabeledDataset& data);

struct RunSummary {
    Pipeline pipeline = Pipeline::distillation;
    double beta = 0.0;
    double sigma = 0.0;
    double accuracy = 0.0;  // percent, test split
    PowerBreakdown power;   // watts per sample
    std::optional<double> teacher_accuracy;
    std::vector<std::size_t> effective_levels;  // per ADC, of W~
};

struct RunResult {
    RunSummary summary;
    std::vector<MetricsRecord> records;
    std::vector<MetricsRecord> teacher_records;
    SystemParams params;
};

// Executes one pipeline on `data` (loaded from the config when null). When
// `out_dir` is set the run artifacts are written there.
RunResult run_pipeline(const ExperimentConfig& config, const LabeledDataset* data = nullptr,
                       const std::optional<std::filesystem::path>& out_dir = std::nullopt);

// One run per sweep_beta value (or the single configured beta), each in its
// own subdirectory, plus sweep_summary.csv in `out_dir`.
std::vector<RunSummary> run(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                            const LabeledDataset* data = nullptr);

void emit_csv(std::span<const MetricsRecord> records, const std::filesystem::path& path);
std::string format_csv(std::span<const MetricsRecord> records);
std::vector<MetricsRecord> parse_csv(std::string_view text);
std::vector<MetricsRecord> read_csv(const std::filesystem::path& path);

std::string summary_to_json(const RunSummary& summary);

}  // namespace memsar
