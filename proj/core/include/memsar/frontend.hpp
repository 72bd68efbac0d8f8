#pragma once

// Memoryless linear analog mappings y = H(theta1) x.
//
//   fourier: H_{m,j} = exp(-2 pi i m theta_j / M); complex outputs are split
//            into 2J real channels laid out [Re_0..Re_{J-1}, Im_0..Im_{J-1}].
//   dct:     H_{m,j} = phi_m cos(pi/M (j + 0.5) m + theta_{m,j}), real, J channels.
//   identity: y = x, no parameters.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memsar {

enum class FrontendKind { identity, fourier, dct };

std::string_view to_string(FrontendKind kind) noexcept;
FrontendKind parse_frontend_kind(std::string_view name);

std::complex<double> fourier_entry(int m, int j, double theta_j, int inputs);
double dct_entry(int m, int j, double phase, int inputs, double norm);
// Orthonormal DCT-II scaling: sqrt(1/M) for m = 0, sqrt(2/M) otherwise.
double dct_norm(int m, int inputs) noexcept;

// Dense real form of the map plus its entrywise parameter derivatives. Built
// once per batch; apply/grad_theta1 on AnalogMap evaluate entries directly.
struct FrontendMatrix {
    std::size_t inputs = 0;
    std::size_t channels = 0;
    std::vector<double> h;   // [channel][input]
    std::vector<double> dh;  // d h / d theta owning that entry, same layout
};

class AnalogMap {
public:
    AnalogMap() = default;
    // Classical initialization: fourier bins theta_j = j + 1, dct phases 0.
    AnalogMap(FrontendKind kind, std::size_t inputs, std::size_t outputs);

    FrontendKind kind() const noexcept { return kind_; }
    std::size_t inputs() const noexcept { return inputs_; }
    std::size_t outputs() const noexcept { return outputs_; }
    std::size_t channels() const noexcept;

    std::span<double> theta() noexcept { return theta_; }
    std::span<const double> theta() const noexcept { return theta_; }

    std::vector<double> apply(std::span<const double> x) const;

    // d(upstream . apply(x)) / d theta, added into grad (size theta().size()).
    void grad_theta1(std::span<const double> upstream, std::span<const double> x,
                     std::span<double> grad) const;
    std::vector<double> grad_theta1(std::span<const double> upstream,
                                    std::span<const double> x) const;

    FrontendMatrix materialize() const;

private:
    FrontendKind kind_ = FrontendKind::identity;
    std::size_t inputs_ = 0;
    std::size_t outputs_ = 0;
    std::vector<double> theta_;
};

// y = H x using a materialized matrix.
void apply_matrix(const FrontendMatrix& mat, std::span<const double> x, std::span<double> y);

// Same contract as AnalogMap::grad_theta1, evaluated from a materialized matrix.
void grad_theta1_matrix(const AnalogMap& map, const FrontendMatrix& mat,
                        std::span<const double> upstream, std::span<const double> x,
                        std::span<double> grad);

// Fixed per-channel affine map of frontend outputs into the ADC range:
// v = (y - offset) * gain.
struct Calibration {
    std::vector<double> offset;
    std::vector<double> gain;

    double apply(std::size_t channel, double y) const noexcept {
        return (y - offset[channel]) * gain[channel];
    }
};

// Maps the observed [min, max] of every channel onto [0, supply]. Channels
// with no spread are centred at supply / 2 with unit gain.
Calibration fit_calibration(std::span<const double> min_per_channel,
                            std::span<const double> max_per_channel, double supply);

}  // namespace memsar
