#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "memsar/adc.hpp"
#include "memsar/noise.hpp"

using namespace memsar;

TEST_CASE("zero sigma leaves the weights untouched") {
    const AdcConfig cfg(4);
    const auto w = uniform_weights(cfg);
    const NoiseSpec none{0.0, {}, 17};
    CHECK_FALSE(none.active());
    CHECK(sample_weights(w, none, 123, 2) == w);
}

TEST_CASE("sampling is a pure function of (seed, draw, adc, weight)") {
    const AdcConfig cfg(3);
    const auto w = uniform_weights(cfg);
    const NoiseSpec noise{0.1, {}, 5};
    CHECK(sample_weights(w, noise, 7, 1) == sample_weights(w, noise, 7, 1));
    CHECK_FALSE(sample_weights(w, noise, 7, 1) == sample_weights(w, noise, 8, 1));
    CHECK_FALSE(sample_weights(w, noise, 7, 1) == sample_weights(w, noise, 7, 2));
    NoiseSpec other = noise;
    other.seed = 6;
    CHECK_FALSE(sample_weights(w, noise, 7, 1) == sample_weights(w, other, 7, 1));
}

TEST_CASE("specs differing only in sigma share the standard-normal draws") {
    const AdcConfig cfg(3);
    const auto w = uniform_weights(cfg);
    const NoiseSpec a{0.01, {}, 9}, b{0.3, {}, 9};
    const auto wa = sample_weights(w, a, 4, 0);
    const auto wb = sample_weights(w, b, 4, 0);
    for (std::size_t k = 0; k < w.size(); ++k) {
        CHECK((wb.values()[k] - w.values()[k]) == doctest::Approx(30.0 * (wa.values()[k] - w.values()[k])).epsilon(1e-9));
    }
}

TEST_CASE("perturbation moments match sigma") {
    const MemristorWeights w(2);  // all zeros, three weights
    const NoiseSpec noise{0.05, {}, 11};
    const std::size_t n = 200000;
    double sum = 0.0, sq = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        const auto s = sample_weights(w, noise, d, 0);
        for (double e : s.values()) {
            sum += e;
            sq += e * e;
        }
    }
    const double count = 3.0 * n;
    const double mean = sum / count;
    const double var = sq / count - mean * mean;
    CHECK(std::abs(mean) < 4 * 0.05 / std::sqrt(count));
    CHECK(std::sqrt(var) == doctest::Approx(0.05).epsilon(0.01));
}

TEST_CASE("per-weight sigma overrides the scalar") {
    const AdcConfig cfg(2);
    const auto w = uniform_weights(cfg);
    NoiseSpec noise{0.5, {0.0, 0.2, 0.0}, 3};
    CHECK(noise.active());
    const auto s = sample_weights(w, noise, 1, 0);
    CHECK(s.values()[0] == w.values()[0]);
    CHECK(s.values()[2] == w.values()[2]);
    CHECK(s.values()[1] != w.values()[1]);
    CHECK((s.values()[1] - w.values()[1]) == doctest::Approx(0.2 * noise_variate(noise, 1, 0, 1)));
    noise.per_weight_sigma = {0.0, 0.0};
    CHECK_THROWS_AS(sample_weights(w, noise, 1, 0), std::invalid_argument);
    noise.per_weight_sigma = {0.0, 0.0, 0.0};
    CHECK_FALSE(noise.active());
}

TEST_CASE("NoiseSpec validation") {
    CHECK_NOTHROW((NoiseSpec{0.1, {}, 0}.validate()));
    CHECK_THROWS_AS((NoiseSpec{-0.1, {}, 0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((NoiseSpec{NAN, {}, 0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((NoiseSpec{0.0, {0.1, -1.0}, 0}.validate()), std::invalid_argument);
}

TEST_CASE("sample_weights_into rejects a mismatched output") {
    const AdcConfig cfg(3);
    MemristorWeights out(2);
    const NoiseSpec noise{0.1, {}, 0};
    CHECK_THROWS_AS(sample_weights_into(uniform_weights(cfg), noise, 0, 0, out), std::invalid_argument);
}
