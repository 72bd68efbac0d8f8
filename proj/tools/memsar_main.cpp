#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "memsar/checkpoint.hpp"
#include "memsar/experiment.hpp"

namespace {

int run_command(const std::string& config_path, const std::optional<std::string>& pipeline,
                const std::vector<double>& betas, const std::optional<std::uint64_t>& seed,
                const std::optional<double>& sigma, const std::optional<std::size_t>& epochs,
                const std::optional<std::string>& out) {
    memsar::ExperimentConfig config = memsar::load_config(config_path);
    if (pipeline) config.pipeline = memsar::parse_pipeline(*pipeline);
    if (seed) config.seed = *seed;
    if (sigma) config.sigma = *sigma;
    if (epochs) config.train.epochs = *epochs;
    if (betas.size() == 1) {
        config.train.objective.beta = betas.front();
        config.sweep_beta.clear();
    } else if (betas.size() > 1) {
        config.sweep_beta = betas;
    }
    config.validate();
    const auto dir = memsar::resolve_output_dir(config, out);
    const auto summaries = memsar::run(config, dir);
    for (const auto& s : summaries) {
        std::printf("%s beta=%g sigma=%g accuracy=%.2f%% power=%.4g uW\n",
                    std::string(memsar::to_string(s.pipeline)).c_str(), s.beta, s.sigma, s.accuracy,
                    s.power.total() * 1e6);
    }
    std::printf("artifacts: %s\n", dir.string().c_str());
    return 0;
}

int export_command(const std::string& config_path, const std::string& stem) {
    const auto config = memsar::load_config(config_path);
    if (config.task != memsar::Task::synthetic) throw memsar::ConfigError("export-synthetic needs task=synthetic");
    const auto data = memsar::load_task_data(config);
    memsar::write_tensor_container(data, stem, memsar::effective_data_seed(config));
    std::printf("wrote %s.bin and %s.json (%zu samples)\n", stem.c_str(), stem.c_str(), data.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Task-based memristive SAR ADC experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", memsar::library_version());

    auto* run = app.add_subcommand("run", "Run a pipeline (or a beta sweep) from a JSON config");
    std::string config_path;
    std::optional<std::string> pipeline, out;
    std::vector<double> betas;
    std::optional<std::uint64_t> seed;
    std::optional<double> sigma;
    std::optional<std::size_t> epochs;
    run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--pipeline", pipeline,
                    "uniform | noise_free | noisy_inference | noisy_training | distillation");
    run->add_option("--beta", betas, "Power weight; several values run a sweep")->delimiter(',');
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--sigma", sigma, "Weight noise standard deviation");
    run->add_option("--epochs", epochs, "Training epochs");
    run->add_option("--out", out, "Output directory (default: config output_dir, then $MEMSAR_OUTPUT_ROOT, then ./runs)");

    auto* exp = app.add_subcommand("export-synthetic", "Write the synthetic dataset of a config as a tensor container");
    std::string export_config, stem;
    exp->add_option("--config", export_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    exp->add_option("--out", stem, "Output stem; writes <stem>.bin and <stem>.json")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return run_command(config_path, pipeline, betas, seed, sigma, epochs, out);
        if (*exp) return export_command(export_config, stem);
    } catch (const memsar::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
