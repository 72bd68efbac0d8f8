#include <stdexcept>
#include <cmath>
#include <functional>
#include <vector>

#include "check.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "memsar/losses.hpp"
#include "memsar/rng.hpp"
#include "memsar/system.hpp"

using namespace memsar;
using memsar::testing::rel_error;

namespace {

// Every trainable scalar of a SystemParams together with its gradient slot.
std::vector<std::pair<double*, double*>> parameter_slots(SystemParams& p, SystemGrads& g) {
    std::vector<std::pair<double*, double*>> slots;
    for (std::size_t k = 0; k < p.frontend.theta().size(); ++k) slots.emplace_back(&p.frontend.theta()[k], &g.theta1[k]);
    for (std::size_t a = 0; a < p.adcs.size(); ++a)
        for (std::size_t k = 0; k < p.adcs[a].size(); ++k) slots.emplace_back(&p.adcs[a].values()[k], &g.adcs[a].values()[k]);
    for (std::size_t l = 0; l < p.net.layers.size(); ++l) {
        for (std::size_t k = 0; k < p.net.layers[l].weight.size(); ++k)
            slots.emplace_back(&p.net.layers[l].weight[k], &g.net.layers[l].weight[k]);
        for (std::size_t k = 0; k < p.net.layers[l].bias.size(); ++k)
            slots.emplace_back(&p.net.layers[l].bias[k], &g.net.layers[l].bias[k]);
    }
    return slots;
}

void check_gradient(SystemParams params, const LabeledDataset& data, const ObjectiveWeights& w,
                    const TeacherTargets* targets, const NoiseSpec& noise, std::size_t draws) {
    const std::vector<std::size_t> batch{0, 5, 9, 14};
    auto grads = SystemGrads::zeros_like(params);
    batch_objective(params, data, batch, w, targets, noise, draws, 77, &grads);
    auto slots = parameter_slots(params, grads);
    const double h = 1e-6;
    std::size_t worst_bad = 0;
    for (auto [value, grad] : slots) {
        const double saved = *value;
        *value = saved + h;
        const double fp = batch_objective(params, data, batch, w, targets, noise, draws, 77, nullptr).total;
        *value = saved - h;
        const double fm = batch_objective(params, data, batch, w, targets, noise, draws, 77, nullptr).total;
        *value = saved;
        const double fd = (fp - fm) / (2 * h);
        if (std::abs(*grad - fd) > 1e-3 * std::max(1.0, std::abs(fd))) ++worst_bad;
    }
    CHECK(worst_bad == 0);
}

}  // namespace

TEST_CASE("init produces a consistent system") {
    const auto data = memsar::testing::small_synthetic();
    const auto p = memsar::testing::small_system(data);
    CHECK(p.channels() == 4);
    CHECK(p.conversions() == 8);
    CHECK(p.net.input_width() == 8);
    CHECK(p.net.output_width() == 4);
    CHECK(p.code_scale() == 0.25);
    CHECK_NOTHROW(p.validate());
    for (const auto& w : p.adcs) CHECK(w == uniform_weights(p.adc));
    auto broken = p;
    broken.adcs.pop_back();
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("calibration puts training voltages inside the supply range") {
    const auto data = memsar::testing::small_synthetic();
    const auto p = memsar::testing::small_system(data);
    const auto mat = p.frontend.materialize();
    std::vector<double> y(p.channels());
    double lo = 1e9, hi = -1e9;
    for (std::size_t i : data.indices(SplitTag::train)) {
        for (std::size_t z = 0; z < data.time_samples; ++z) {
            apply_matrix(mat, data.time_slice(i, z), y);
            for (std::size_t c = 0; c < y.size(); ++c) {
                const double v = p.calibration.apply(c, y[c]);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    CHECK(lo == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hi == doctest::Approx(1.0));
}

TEST_CASE("hard chain codes equal the ADC of the calibrated frontend output") {
    const auto data = memsar::testing::small_synthetic();
    const auto p = memsar::testing::small_system(data);
    const auto mat = p.frontend.materialize();
    for (std::size_t i = 0; i < 10; ++i) {
        const auto out = chain_forward_hard(p, mat, data.sample(i), NoiseSpec{}, 0);
        PowerBreakdown power;
        std::vector<double> net_in;
        for (std::size_t z = 0; z < data.time_samples; ++z) {
            const auto y = p.frontend.apply(data.time_slice(i, z));
            for (std::size_t c = 0; c < p.channels(); ++c) {
                const double v = p.calibration.apply(c, y[c]);
                const auto bits = quantize_hard(v, p.adcs[c], p.adc);
                CHECK(out.codes[z * p.channels() + c] == bits.code);
                power += conversion_power(v, p.adcs[c], p.adc);
                net_in.push_back(bits.code * 0.25);
            }
        }
        CHECK(rel_error(out.power.total(), power.total()) < 1e-12);
        const auto ref = forward(p.net, net_in);
        CHECK(out.predicted == argmax(ref.logits));
    }
}

TEST_CASE("soft chain converges to the hard chain for a sharp surrogate") {
    const auto data = memsar::testing::small_synthetic();
    const auto p = memsar::testing::small_system(data, FrontendKind::fourier, 3, 1e5);
    const auto mat = p.frontend.materialize();
    ChainTrace trace;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < 32; ++i) {
        chain_forward_soft(p, mat, data.sample(i), NoiseSpec{}, 0, trace);
        const auto hard = chain_forward_hard(p, mat, data.sample(i), NoiseSpec{}, 0);
        if (argmax(trace.mlp.out.logits) == hard.predicted) ++agree;
    }
    CHECK(agree >= 31);
}

TEST_CASE("noisy chains read draw_base + z for each conversion") {
    const auto data = memsar::testing::small_synthetic();
    const auto p = memsar::testing::small_system(data);
    const auto mat = p.frontend.materialize();
    const NoiseSpec noise{0.3, {}, 8};
    const auto out = chain_forward_hard(p, mat, data.sample(2), noise, 40);
    for (std::size_t z = 0; z < data.time_samples; ++z) {
        const auto y = p.frontend.apply(data.time_slice(2, z));
        for (std::size_t c = 0; c < p.channels(); ++c) {
            const auto w = sample_weights(p.adcs[c], noise, 40 + z, c);
            CHECK(out.codes[z * p.channels() + c] == quantize_hard(p.calibration.apply(c, y[c]), w, p.adc).code);
        }
    }
}

TEST_CASE("end-to-end gradient matches finite differences") {
    const auto data = memsar::testing::small_synthetic();
    ObjectiveWeights w;
    w.alpha = 0.2;
    w.beta = 0.05;
    w.gamma = 0.5;
    w.tau = 2.0;

    SUBCASE("fourier, noise-free, plain student") {
        auto p = memsar::testing::small_system(data, FrontendKind::fourier, 2, 5.0);
        rng::Stream s(1);
        for (auto& a : p.adcs)
            for (double& v : a.values()) v *= s.uniform(0.8, 1.2);
        const auto targets = teacher_targets(p, data, w.tau);
        check_gradient(p, data, w, &targets, NoiseSpec{}, 1);
    }
    SUBCASE("dct, noisy, softened student, three bits") {
        auto p = memsar::testing::small_system(data, FrontendKind::dct, 3, 5.0);
        const auto targets = teacher_targets(p, data, w.tau);
        w.soften_student = true;
        check_gradient(p, data, w, &targets, NoiseSpec{0.05, {}, 2}, 2);
    }
    SUBCASE("overlapping regions activate the regularizer gradient") {
        auto p = memsar::testing::small_system(data, FrontendKind::fourier, 3, 5.0);
        for (auto& a : p.adcs) a.ref(0) = 3.0;  // pushes E_1 past E_2
        w.gamma = 0.0;
        check_gradient(p, data, w, nullptr, NoiseSpec{}, 1);
    }
}

TEST_CASE("frozen groups receive no upstream gradient") {
    const auto data = memsar::testing::small_synthetic();
    auto p = memsar::testing::small_system(data);
    p.frozen.frontend = true;
    p.frozen.adc = true;
    auto g = SystemGrads::zeros_like(p);
    ObjectiveWeights w;
    w.alpha = 0.0;
    batch_objective(p, data, std::vector<std::size_t>{0, 1}, w, nullptr, NoiseSpec{}, 1, 0, &g);
    for (double v : g.theta1) CHECK(v == 0.0);
    for (const auto& a : g.adcs)
        for (double v : a.values()) CHECK(v == 0.0);
    double net_norm = 0.0;
    for (const auto& l : g.net.layers)
        for (double v : l.weight) net_norm += std::abs(v);
    CHECK(net_norm > 0.0);
}
