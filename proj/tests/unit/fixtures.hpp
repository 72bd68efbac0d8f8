#pragma once

#include <cstdint>

#include "memsar/dataset.hpp"
#include "memsar/system.hpp"

namespace memsar::testing {

inline LabeledDataset small_synthetic(std::size_t n = 64, std::uint64_t seed = 1) {
    SyntheticSpec spec;
    spec.sensors = 6;
    spec.task_bits = 2;
    spec.time_samples = 2;
    spec.n_samples = n;
    spec.train_fraction = 0.75;
    spec.seed = seed;
    return generate_synthetic(spec);
}

// A calibrated system sized for small_synthetic().
inline SystemParams small_system(const LabeledDataset& data, FrontendKind kind = FrontendKind::fourier,
                                 int n_bits = 2, double sharpness = 5.0, std::uint64_t seed = 3) {
    SystemShape shape;
    shape.frontend = kind;
    shape.sensors = data.sensors;
    shape.frontend_outputs = 2;
    shape.time_samples = data.time_samples;
    shape.num_classes = data.num_classes;
    shape.hidden = {8};
    auto p = SystemParams::init(shape, AdcConfig(n_bits, 1.0, 1e6, sharpness), seed);
    const auto train = data.indices(SplitTag::train);
    calibrate(p, data, train);
    return p;
}

}  // namespace memsar::testing
