#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "memsar/rng.hpp"
#include "memsar/trainer.hpp"

using namespace memsar;

namespace {

// One sensor, one time step: class 0 below 0.4, class 1 above 0.6.
LabeledDataset separable(std::size_t n, std::uint64_t seed) {
    LabeledDataset d;
    d.sensors = 1;
    d.time_samples = 1;
    d.num_classes = 2;
    rng::Stream s(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const int y = static_cast<int>(i % 2);
        d.labels.push_back(y);
        d.features.push_back(y == 0 ? s.uniform(0.0, 0.4) : s.uniform(0.6, 1.0));
        d.split.push_back(i % 4 >= 2 && i % 8 < 4 ? SplitTag::test : SplitTag::train);
    }
    return d;
}

SystemParams separable_system(const LabeledDataset& d, int n_bits = 2) {
    SystemShape shape;
    shape.frontend = FrontendKind::identity;
    shape.sensors = 1;
    shape.frontend_outputs = 1;
    shape.time_samples = 1;
    shape.num_classes = 2;
    shape.hidden = {8};
    auto p = SystemParams::init(shape, AdcConfig(n_bits, 1.0, 1e6, 20.0), 1);
    calibrate(p, d, d.indices(SplitTag::train));
    return p;
}

TrainConfig quick_config(std::size_t epochs) {
    TrainConfig c;
    c.epochs = epochs;
    c.batch_size = 16;
    c.optimizer.learning_rate = 0.05;
    c.objective.alpha = 0.1;
    c.seed = 3;
    return c;
}

}  // namespace

TEST_CASE("a linearly separable toy problem is learned perfectly") {
    const auto d = separable(200, 1);
    const auto init = separable_system(d);
    const auto res = train_teacher(init, d, d.indices(SplitTag::train), d.indices(SplitTag::test), quick_config(40));
    REQUIRE(res.records.size() == 40);
    CHECK(res.records.back().accuracy == doctest::Approx(100.0));
    CHECK(res.records.back().ce < res.records.front().ce);
    CHECK(res.records.front().epoch == 1);
}

TEST_CASE("zero epochs returns the initial parameters and no records") {
    const auto d = separable(40, 2);
    const auto init = separable_system(d);
    const auto res = train_teacher(init, d, d.indices(SplitTag::train), d.indices(SplitTag::test), quick_config(0));
    CHECK(res.records.empty());
    CHECK(res.params.net == init.net);
    CHECK(res.params.adcs == init.adcs);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const auto data = memsar::testing::small_synthetic(96);
    const auto init = memsar::testing::small_system(data);
    const auto train = data.indices(SplitTag::train), test = data.indices(SplitTag::test);
    auto cfg = quick_config(3);
    cfg.objective.beta = 0.01;
    const NoiseSpec noise{0.05, {}, 5};
    const auto a = train_student(init, data, train, test, nullptr, cfg, noise, noise);
    const auto b = train_student(init, data, train, test, nullptr, cfg, noise, noise);
    CHECK(a.records == b.records);
    CHECK(a.params.net == b.params.net);
    CHECK(a.params.adcs == b.params.adcs);
    cfg.seed = 4;
    const auto c = train_student(init, data, train, test, nullptr, cfg, noise, noise);
    CHECK_FALSE(c.params.net == a.params.net);
}

TEST_CASE("a student with sigma = beta = gamma = 0 reproduces the teacher") {
    const auto data = memsar::testing::small_synthetic(96);
    const auto init = memsar::testing::small_system(data);
    const auto train = data.indices(SplitTag::train), test = data.indices(SplitTag::test);
    auto cfg = quick_config(3);
    cfg.objective.beta = 0.0;
    cfg.objective.gamma = 0.0;
    const auto t = train_teacher(init, data, train, test, cfg);
    const auto s = train_student(init, data, train, test, nullptr, cfg, NoiseSpec{}, NoiseSpec{});
    CHECK(s.params.net == t.params.net);
    CHECK(s.params.adcs == t.params.adcs);
    CHECK(s.records == t.records);
}

TEST_CASE("evaluate examples") {
    const auto d = separable(40, 3);
    auto p = separable_system(d);
    const auto test = d.indices(SplitTag::test);
    // Zero network: all logits tie and argmax picks class 0.
    for (auto& l : p.net.layers) std::fill(l.weight.begin(), l.weight.end(), 0.0);
    const auto r = evaluate(p, d, test, NoiseSpec{});
    std::size_t zeros = 0;
    for (std::size_t i : test) zeros += d.labels[i] == 0 ? 1 : 0;
    CHECK(r.evaluated == test.size());
    CHECK(r.accuracy == doctest::Approx(100.0 * zeros / test.size()));
    CHECK(r.power.total() > 0.0);
    CHECK(evaluate(p, d, {}, NoiseSpec{}).evaluated == 0);
    CHECK(evaluate(p, d, test, NoiseSpec{0.1, {}, 1}, 3).evaluated == 3 * test.size());
    CHECK_THROWS_AS(evaluate(p, d, test, NoiseSpec{}, 0), std::invalid_argument);
}

TEST_CASE("untrained network on random labels sits near chance") {
    auto d = memsar::testing::small_synthetic(2000, 7);
    rng::Stream s(1);
    for (int& y : d.labels) y = static_cast<int>(s.below(4));
    const auto p = memsar::testing::small_system(d);
    const auto r = evaluate(p, d, d.all_indices(), NoiseSpec{});
    CHECK(r.accuracy > 20.0);
    CHECK(r.accuracy < 30.0);
}

TEST_CASE("sharpness annealing ends at the configured value") {
    const auto d = separable(40, 4);
    const auto init = separable_system(d);
    auto cfg = quick_config(3);
    cfg.sharpness_final = 80.0;
    const auto res = train_teacher(init, d, d.indices(SplitTag::train), d.indices(SplitTag::test), cfg);
    CHECK(res.params.adc.sharpness_a() == doctest::Approx(80.0));
    cfg.sharpness_final = -1.0;
    CHECK_THROWS_AS(train_teacher(init, d, d.indices(SplitTag::train), d.indices(SplitTag::test), cfg),
                    std::invalid_argument);
}

TEST_CASE("invalid configs are rejected") {
    TrainConfig c;
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = TrainConfig{};
    c.mc_draws = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = TrainConfig{};
    CHECK_NOTHROW(c.validate());
}
