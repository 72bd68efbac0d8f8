#include "memsar/frontend.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace memsar {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string_view to_string(FrontendKind kind) noexcept {
    switch (kind) {
        case FrontendKind::identity: return "identity";
        case FrontendKind::fourier: return "fourier";
        case FrontendKind::dct: return "dct";
    }
    return "identity";
}

FrontendKind parse_frontend_kind(std::string_view name) {
    if (name == "identity") return FrontendKind::identity;
    if (name == "fourier") return FrontendKind::fourier;
    if (name == "dct") return FrontendKind::dct;
    throw std::invalid_argument("unknown frontend kind '" + std::string(name) + "'");
}

std::complex<double> fourier_entry(int m, int j, double theta_j, int inputs) {
    (void)j;
    if (m < 0 || m >= inputs) throw std::out_of_range("fourier_entry: m out of range");
    const double phase = -2.0 * kPi * m * theta_j / inputs;
    return {std::cos(phase), std::sin(phase)};
}

double dct_norm(int m, int inputs) noexcept {
    return m == 0 ? std::sqrt(1.0 / inputs) : std::sqrt(2.0 / inputs);
}

double dct_entry(int m, int j, double phase, int inputs, double norm) {
    if (m < 0 || m >= inputs) throw std::out_of_range("dct_entry: m out of range");
    return norm * std::cos(kPi / inputs * ((j + 0.5) * m) + phase);
}

AnalogMap::AnalogMap(FrontendKind kind, std::size_t inputs, std::size_t outputs)
    : kind_(kind), inputs_(inputs), outputs_(outputs) {
    if (inputs == 0) throw std::invalid_argument("AnalogMap: inputs must be positive");
    switch (kind) {
        case FrontendKind::identity:
            outputs_ = inputs;
            break;
        case FrontendKind::fourier:
            if (outputs == 0) throw std::invalid_argument("AnalogMap: outputs must be positive");
            theta_.resize(outputs);
            for (std::size_t j = 0; j < outputs; ++j) theta_[j] = static_cast<double>(j + 1);
            break;
        case FrontendKind::dct:
            if (outputs == 0) throw std::invalid_argument("AnalogMap: outputs must be positive");
            theta_.assign(inputs * outputs, 0.0);  // [m][j]
            break;
    }
}

std::size_t AnalogMap::channels() const noexcept {
    return kind_ == FrontendKind::fourier ? 2 * outputs_ : outputs_;
}

std::vector<double> AnalogMap::apply(std::span<const double> x) const {
    if (x.size() != inputs_) {
        throw std::invalid_argument("AnalogMap::apply: expected " + std::to_string(inputs_) +
                                    " inputs, got " + std::to_string(x.size()));
    }
    const int M = static_cast<int>(inputs_);
    std::vector<double> y(channels(), 0.0);
    switch (kind_) {
        case FrontendKind::identity:
            y.assign(x.begin(), x.end());
            break;
        case FrontendKind::fourier:
            for (std::size_t j = 0; j < outputs_; ++j) {
                std::complex<double> acc{0.0, 0.0};
                for (int m = 0; m < M; ++m) {
                    acc += fourier_entry(m, static_cast<int>(j), theta_[j], M) * x[static_cast<std::size_t>(m)];
                }
                y[j] = acc.real();
                y[outputs_ + j] = acc.imag();
            }
            break;
        case FrontendKind::dct:
            for (std::size_t j = 0; j < outputs_; ++j) {
                double acc = 0.0;
                for (int m = 0; m < M; ++m) {
                    const auto um = static_cast<std::size_t>(m);
                    acc += dct_entry(m, static_cast<int>(j), theta_[um * outputs_ + j], M, dct_norm(m, M)) * x[um];
                }
                y[j] = acc;
            }
            break;
    }
    return y;
}

void AnalogMap::grad_theta1(std::span<const double> upstream, std::span<const double> x,
                            std::span<double> grad) const {
    if (upstream.size() != channels() || x.size() != inputs_ || grad.size() != theta_.size()) {
        throw std::invalid_argument("AnalogMap::grad_theta1: dimension mismatch");
    }
    const int M = static_cast<int>(inputs_);
    switch (kind_) {
        case FrontendKind::identity:
            break;
        case FrontendKind::fourier:
            for (std::size_t j = 0; j < outputs_; ++j) {
                // Re = sum x cos(phi), Im = sum x sin(phi), phi = -2 pi m theta / M
                double g = 0.0;
                for (int m = 0; m < M; ++m) {
                    const double dphi = -2.0 * kPi * m / M;
                    const double phi = dphi * theta_[j];
                    const double xm = x[static_cast<std::size_t>(m)];
                    g += upstream[j] * (-std::sin(phi)) * dphi * xm;
                    g += upstream[outputs_ + j] * std::cos(phi) * dphi * xm;
                }
                grad[j] += g;
            }
            break;
        case FrontendKind::dct:
            for (int m = 0; m < M; ++m) {
                const auto um = static_cast<std::size_t>(m);
                const double norm = dct_norm(m, M);
                for (std::size_t j = 0; j < outputs_; ++j) {
                    const double arg = kPi / M * ((static_cast<double>(j) + 0.5) * m) + theta_[um * outputs_ + j];
                    grad[um * outputs_ + j] += upstream[j] * (-norm * std::sin(arg)) * x[um];
                }
            }
            break;
    }
}

std::vector<double> AnalogMap::grad_theta1(std::span<const double> upstream,
                                           std::span<const double> x) const {
    std::vector<double> grad(theta_.size(), 0.0);
    grad_theta1(upstream, x, grad);
    return grad;
}

FrontendMatrix AnalogMap::materialize() const {
    FrontendMatrix mat;
    mat.inputs = inputs_;
    mat.channels = channels();
    mat.h.assign(mat.inputs * mat.channels, 0.0);
    mat.dh.assign(mat.inputs * mat.channels, 0.0);
    const int M = static_cast<int>(inputs_);
    switch (kind_) {
        case FrontendKind::identity:
            for (std::size_t c = 0; c < inputs_; ++c) mat.h[c * inputs_ + c] = 1.0;
            break;
        case FrontendKind::fourier:
            for (std::size_t j = 0; j < outputs_; ++j) {
                for (int m = 0; m < M; ++m) {
                    const auto um = static_cast<std::size_t>(m);
                    const double dphi = -2.0 * kPi * m / M;
                    const double phi = dphi * theta_[j];
                    mat.h[j * inputs_ + um] = std::cos(phi);
                    mat.dh[j * inputs_ + um] = -std::sin(phi) * dphi;
                    mat.h[(outputs_ + j) * inputs_ + um] = std::sin(phi);
                    mat.dh[(outputs_ + j) * inputs_ + um] = std::cos(phi) * dphi;
                }
            }
            break;
        case FrontendKind::dct:
            for (std::size_t j = 0; j < outputs_; ++j) {
                for (int m = 0; m < M; ++m) {
                    const auto um = static_cast<std::size_t>(m);
                    const double norm = dct_norm(m, M);
                    const double arg = kPi / M * ((static_cast<double>(j) + 0.5) * m) + theta_[um * outputs_ + j];
                    mat.h[j * inputs_ + um] = norm * std::cos(arg);
                    mat.dh[j * inputs_ + um] = -norm * std::sin(arg);
                }
            }
            break;
    }
    return mat;
}

void apply_matrix(const FrontendMatrix& mat, std::span<const double> x, std::span<double> y) {
    for (std::size_t c = 0; c < mat.channels; ++c) {
        const double* row = mat.h.data() + c * mat.inputs;
        double acc = 0.0;
        for (std::size_t m = 0; m < mat.inputs; ++m) acc += row[m] * x[m];
        y[c] = acc;
    }
}

void grad_theta1_matrix(const AnalogMap& map, const FrontendMatrix& mat,
                        std::span<const double> upstream, std::span<const double> x,
                        std::span<double> grad) {
    const std::size_t M = mat.inputs;
    const std::size_t J = map.outputs();
    switch (map.kind()) {
        case FrontendKind::identity:
            break;
        case FrontendKind::fourier:
            for (std::size_t j = 0; j < J; ++j) {
                const double* re = mat.dh.data() + j * M;
                const double* im = mat.dh.data() + (J + j) * M;
                double g = 0.0;
                for (std::size_t m = 0; m < M; ++m) g += (upstream[j] * re[m] + upstream[J + j] * im[m]) * x[m];
                grad[j] += g;
            }
            break;
        case FrontendKind::dct:
            for (std::size_t j = 0; j < J; ++j) {
                const double u = upstream[j];
                if (u == 0.0) continue;
                const double* row = mat.dh.data() + j * M;
                for (std::size_t m = 0; m < M; ++m) grad[m * J + j] += u * row[m] * x[m];
            }
            break;
    }
}

Calibration fit_calibration(std::span<const double> min_per_channel,
                            std::span<const double> max_per_channel, double supply) {
    if (min_per_channel.size() != max_per_channel.size()) {
        throw std::invalid_argument("fit_calibration: size mismatch");
    }
    Calibration cal;
    cal.offset.resize(min_per_channel.size());
    cal.gain.resize(min_per_channel.size());
    for (std::size_t c = 0; c < min_per_channel.size(); ++c) {
        const double span = max_per_channel[c] - min_per_channel[c];
        if (span > 1e-12) {
            cal.offset[c] = min_per_channel[c];
            cal.gain[c] = supply / span;
        } else {
            cal.offset[c] = min_per_channel[c] - 0.5 * supply;
            cal.gain[c] = 1.0;
        }
    }
    return cal;
}

}  // namespace memsar
