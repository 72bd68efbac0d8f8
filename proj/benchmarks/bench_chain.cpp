#include <benchmark/benchmark.h>

#include <vector>

#include "memsar/adc.hpp"
#include "memsar/losses.hpp"
#include "memsar/power.hpp"
#include "memsar/rng.hpp"
#include "memsar/system.hpp"

using namespace memsar;

namespace {

std::vector<double> voltages(std::size_t n) {
    rng::Stream s(1);
    std::vector<double> v(n);
    for (double& x : v) x = s.uniform();
    return v;
}

void BM_QuantizeHard(benchmark::State& state) {
    const AdcConfig cfg(static_cast<int>(state.range(0)));
    const auto w = uniform_weights(cfg);
    const auto v = voltages(1024);
    for (auto _ : state) {
        for (double x : v) benchmark::DoNotOptimize(quantize_hard(x, w, cfg).code);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}
BENCHMARK(BM_QuantizeHard)->Arg(2)->Arg(4)->Arg(8);

void BM_QuantizeSoftWithBackward(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const AdcConfig cfg(n);
    const auto w = uniform_weights(cfg);
    const auto v = voltages(1024);
    std::vector<double> gb(static_cast<std::size_t>(n)), gw(w.size());
    for (auto _ : state) {
        for (double x : v) {
            const auto soft = quantize_soft(x, w, cfg);
            std::fill(gb.begin(), gb.end(), 1.0);
            double gv = 0.0;
            quantize_soft_backward(x, w, cfg, soft, gb, gv, gw);
            benchmark::DoNotOptimize(gv);
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}
BENCHMARK(BM_QuantizeSoftWithBackward)->Arg(2)->Arg(4)->Arg(8);

void BM_ExpectedPower(benchmark::State& state) {
    const AdcConfig cfg(3);
    AdcInputBatch batch{256, 3, 4, voltages(256 * 3 * 4)};
    const std::vector<MemristorWeights> w(4, uniform_weights(cfg));
    const NoiseSpec noise{0.05, {}, 1};
    const auto draws = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(expected_power(batch, w, cfg, noise, draws).total());
}
BENCHMARK(BM_ExpectedPower)->Arg(1)->Arg(16);

// One training step's objective and gradient on a 1024-sample synthetic batch.
void BM_BatchObjective(benchmark::State& state) {
    SyntheticSpec spec;
    spec.n_samples = 1024;
    const auto data = generate_synthetic(spec);
    SystemShape shape;
    shape.sensors = data.sensors;
    shape.frontend_outputs = 4;
    shape.time_samples = data.time_samples;
    shape.num_classes = data.num_classes;
    auto params = SystemParams::init(shape, AdcConfig(3), 1);
    const auto all = data.all_indices();
    calibrate(params, data, all);
    const auto targets = teacher_targets(params, data, 2.0);
    ObjectiveWeights w;
    w.beta = 1e-3;
    w.gamma = 0.5;
    const NoiseSpec noise{state.range(0) ? 0.05 : 0.0, {}, 1};
    auto grads = SystemGrads::zeros_like(params);
    for (auto _ : state) {
        grads.set_zero();
        benchmark::DoNotOptimize(batch_objective(params, data, all, w, &targets, noise, 1, 0, &grads).total);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(all.size()));
}
BENCHMARK(BM_BatchObjective)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
