#include "memsar/trainer.hpp"

#include <cmath>
#include <string>

namespace memsar {

void TrainConfig::validate() const {
    if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(optimizer.learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning rate must be positive");
    if (mc_draws == 0 || eval_mc_draws == 0) throw std::invalid_argument("TrainConfig: mc_draws must be >= 1");
    if (!(objective.tau > 0.0)) throw std::invalid_argument("TrainConfig: tau must be positive");
    if (sharpness_final && !(*sharpness_final > 0.0)) {
        throw std::invalid_argument("TrainConfig: sharpness_final must be positive");
    }
}

EvalResult evaluate(const SystemParams& params, const LabeledDataset& data,
                    std::span<const std::size_t> indices, const NoiseSpec& noise,
                    std::size_t mc_draws) {
    if (mc_draws == 0) throw std::invalid_argument("evaluate: mc_draws must be >= 1");
    EvalResult res;
    if (indices.empty()) return res;
    const auto mat = params.frontend.materialize();
    const std::size_t draws = noise.active() ? mc_draws : 1;
    const std::size_t n = indices.size();
    std::size_t correct = 0;
    for (std::size_t d = 0; d < draws; ++d) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = indices[i];
            const auto out = chain_forward_hard(params, mat, data.sample(idx), noise,
                                                (d * n + i) * params.time_samples);
            if (out.predicted == static_cast<std::size_t>(data.labels[idx])) ++correct;
            res.power += out.power;
        }
    }
    res.evaluated = draws * n;
    res.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(res.evaluated);
    res.power = res.power.scaled(1.0 / static_cast<double>(res.evaluated));
    return res;
}

namespace {

double sharpness_at(const TrainConfig& config, double a0, std::size_t epoch) {
    if (!config.sharpness_final || config.epochs <= 1) return a0;
    const double frac = static_cast<double>(epoch) / static_cast<double>(config.epochs - 1);
    return a0 * std::pow(*config.sharpness_final / a0, frac);
}

TrainResult fit(const SystemParams& init, const LabeledDataset& data, std::span<const std::size_t> train,
                std::span<const std::size_t> test, const TeacherTargets* teacher,
                const TrainConfig& config, const ObjectiveWeights& weights,
                const NoiseSpec& train_noise, const NoiseSpec& eval_noise) {
    config.validate();
    init.validate();
    TrainResult result{init, {}};
    if (config.epochs == 0) return result;
    if (train.empty()) throw std::invalid_argument("train: empty training set");

    SystemParams& params = result.params;
    const double a0 = init.adc.sharpness_a();
    EpochBatcher batcher({train.begin(), train.end()}, config.batch_size, config.seed);
    Optimizer optimizer(config.optimizer, params);
    SystemGrads grads = SystemGrads::zeros_like(params);
    std::uint64_t step = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        params.adc = params.adc.with_sharpness(sharpness_at(config, a0, epoch));
        MetricsRecord rec;
        rec.epoch = epoch + 1;
        rec.beta = weights.beta;
        rec.sigma = eval_noise.sigma;
        const auto batches = batcher.epoch(epoch);
        for (const auto& batch : batches) {
            ++step;
            grads.set_zero();
            const auto rep = batch_objective(params, data, batch, weights, teacher, train_noise,
                                             config.mc_draws, step << 32, &grads);
            if (!std::isfinite(rep.total)) {
                throw TrainingDiverged("loss became non-finite at epoch " + std::to_string(epoch + 1));
            }
            optimizer.step(params, grads);
            rec.ce += rep.ce;
            rec.kd += rep.kd;
            rec.reg += rep.reg;
            rec.clamped += rep.clamped;
        }
        const double nb = static_cast<double>(batches.size());
        rec.ce /= nb;
        rec.kd /= nb;
        rec.reg /= nb;
        const auto eval = evaluate(params, data, test, eval_noise, config.eval_mc_draws);
        rec.accuracy = eval.accuracy;
        rec.p_int = eval.power.p_int;
        rec.p_syn = eval.power.p_syn;
        rec.p_total = eval.power.total();
        result.records.push_back(rec);
    }
    return result;
}

}  // namespace

TrainResult train_teacher(const SystemParams& init, const LabeledDataset& data,
                          std::span<const std::size_t> train, std::span<const std::size_t> test,
                          const TrainConfig& config) {
    ObjectiveWeights weights = config.objective;
    weights.beta = 0.0;
    weights.gamma = 0.0;
    const NoiseSpec none;
    return fit(init, data, train, test, nullptr, config, weights, none, none);
}

TrainResult train_student(const SystemParams& init, const LabeledDataset& data,
                          std::span<const std::size_t> train, std::span<const std::size_t> test,
                          const TeacherTargets* teacher, const TrainConfig& config,
                          const NoiseSpec& train_noise, const NoiseSpec& eval_noise) {
    train_noise.validate();
    eval_noise.validate();
    return fit(init, data, train, test, teacher, config, config.objective, train_noise, eval_noise);
}

}  // namespace memsar
