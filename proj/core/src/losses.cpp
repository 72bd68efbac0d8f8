#include "memsar/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace memsar {

namespace {

double safe_log(double p, std::size_t& clamped) {
    if (p < kProbabilityFloor) {
        ++clamped;
        p = kProbabilityFloor;
    }
    return std::log(p);
}

double reduction_weight(Reduction reduction, std::size_t n) {
    return reduction == Reduction::mean ? 1.0 / static_cast<double>(n) : 1.0;
}

}  // namespace

ClampedValue cross_entropy(const ProbabilityBatch& probs, std::span<const int> labels, Reduction reduction) {
    if (probs.size() != labels.size() || probs.empty()) {
        throw std::invalid_argument("cross_entropy: need one label per probability vector");
    }
    ClampedValue out;
    for (std::size_t r = 0; r < probs.size(); ++r) {
        out.value -= safe_log(probs[r].at(static_cast<std::size_t>(labels[r])), out.clamped);
    }
    out.value *= reduction_weight(reduction, probs.size());
    return out;
}

ClampedValue kd_divergence(const ProbabilityBatch& student, const ProbabilityBatch& teacher, Reduction reduction) {
    if (student.size() != teacher.size() || student.empty()) {
        throw std::invalid_argument("kd_divergence: batch size mismatch");
    }
    ClampedValue out;
    for (std::size_t r = 0; r < student.size(); ++r) {
        if (student[r].size() != teacher[r].size()) throw std::invalid_argument("kd_divergence: class count mismatch");
        for (std::size_t k = 0; k < student[r].size(); ++k) {
            const double t = teacher[r][k];
            if (t <= 0.0) continue;
            out.value += t * (std::log(t) - safe_log(student[r][k], out.clamped));
        }
    }
    out.value *= reduction_weight(reduction, student.size());
    return out;
}

TeacherTargets teacher_targets(const SystemParams& teacher, const LabeledDataset& data, double tau) {
    const auto mat = teacher.frontend.materialize();
    const NoiseSpec none;
    TeacherTargets targets(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto out = chain_forward_hard(teacher, mat, data.sample(i), none, 0);
        targets[i] = tempered_softmax(out.out.logits, tau);
    }
    return targets;
}

LossReport batch_objective(const SystemParams& params, const LabeledDataset& data,
                           std::span<const std::size_t> batch, const ObjectiveWeights& weights,
                           const TeacherTargets* teacher, const NoiseSpec& noise,
                           std::size_t mc_draws, std::uint64_t draw_base, SystemGrads* grads) {
    if (batch.empty()) throw std::invalid_argument("batch_objective: empty batch");
    if (mc_draws == 0) throw std::invalid_argument("batch_objective: mc_draws must be >= 1");
    const bool use_kd = weights.gamma != 0.0;
    if (use_kd && teacher == nullptr) throw std::invalid_argument("batch_objective: KD term needs teacher targets");
    if (!(weights.tau > 0.0)) throw std::invalid_argument("batch_objective: tau must be positive");

    const auto mat = params.frontend.materialize();
    const std::size_t B = batch.size();
    const std::size_t Z = params.time_samples;
    const std::size_t K = params.net.output_width();
    const double w_sample = reduction_weight(weights.reduction, B) / static_cast<double>(mc_draws);
    const double w_power = 1.0 / static_cast<double>(B * mc_draws);
    const double kd_coef = weights.gamma * weights.tau * weights.tau;
    const double power_coef = weights.beta / weights.power_unit_watts;
    // Without noise every draw is identical; evaluate once.
    const std::size_t draws = noise.active() ? mc_draws : 1;
    const double draw_scale = static_cast<double>(mc_draws) / static_cast<double>(draws);

    LossReport rep;
    ChainTrace trace;
    std::vector<double> g_logits(K);
    for (std::size_t d = 0; d < draws; ++d) {
        for (std::size_t b = 0; b < B; ++b) {
            const std::size_t idx = batch[b];
            const auto x = data.sample(idx);
            const std::uint64_t base = draw_base + (d * B + b) * Z;
            chain_forward_soft(params, mat, x, noise, base, trace);
            const auto& p = trace.mlp.out.probs;
            const auto label = static_cast<std::size_t>(data.labels[idx]);

            std::size_t clamp_before = rep.clamped;
            const double ce = -safe_log(p[label], rep.clamped);
            const bool ce_clamped = rep.clamped != clamp_before;
            rep.ce += w_sample * draw_scale * ce;
            for (std::size_t k = 0; k < K; ++k) g_logits[k] = ce_clamped ? 0.0 : p[k];
            if (!ce_clamped) g_logits[label] -= 1.0;
            for (double& g : g_logits) g *= w_sample * draw_scale;

            if (use_kd) {
                const auto& t = (*teacher)[idx];
                const std::vector<double> soft_student =
                    weights.soften_student ? tempered_softmax(trace.mlp.out.logits, weights.tau) : p;
                double kd = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    if (t[k] <= 0.0) continue;
                    kd += t[k] * (std::log(t[k]) - safe_log(soft_student[k], rep.clamped));
                }
                rep.kd += w_sample * draw_scale * kd;
                // d KL / d z = (s - t), times 1/tau when the student is softened.
                const double dz = weights.soften_student ? 1.0 / weights.tau : 1.0;
                for (std::size_t k = 0; k < K; ++k) {
                    g_logits[k] += kd_coef * w_sample * draw_scale * dz * (soft_student[k] - t[k]);
                }
            }

            const double p_sample = trace.power.total();
            rep.power_watts += w_power * draw_scale * p_sample;
            if (grads != nullptr) {
                chain_backward_soft(params, mat, x, trace, g_logits,
                                    power_coef * w_power * draw_scale, *grads);
            }
        }
    }

    for (std::size_t c = 0; c < params.adcs.size(); ++c) {
        std::span<double> gw;
        if (grads != nullptr && weights.alpha != 0.0) gw = grads->adcs[c].values();
        rep.reg += collapse_regularizer(params.adcs[c], params.adc, gw, weights.alpha);
    }
    rep.power_penalty = rep.power_watts / weights.power_unit_watts;
    rep.total = rep.ce + kd_coef * rep.kd + weights.alpha * rep.reg + weights.beta * rep.power_penalty;
    return rep;
}

LossReport teacher_loss(const SystemParams& psi, const LabeledDataset& data,
                        std::span<const std::size_t> batch, double alpha, Reduction reduction,
                        SystemGrads* grads) {
    ObjectiveWeights w;
    w.alpha = alpha;
    w.beta = 0.0;
    w.gamma = 0.0;
    w.reduction = reduction;
    return batch_objective(psi, data, batch, w, nullptr, NoiseSpec{}, 1, 0, grads);
}

LossReport student_loss(const SystemParams& theta, const LabeledDataset& data,
                        std::span<const std::size_t> batch, const TeacherTargets* teacher,
                        const ObjectiveWeights& weights, const NoiseSpec& noise,
                        std::size_t mc_draws, std::uint64_t draw_base, SystemGrads* grads) {
    return batch_objective(theta, data, batch, weights, teacher, noise, mc_draws, draw_base, grads);
}

}  // namespace memsar
