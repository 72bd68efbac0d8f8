#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace memsar {

enum class SplitTag : std::uint8_t { train, test };

// Real-valued inputs of shape [sample][time][sensor] with class labels.
struct LabeledDataset {
    std::size_t sensors = 0;       // M
    std::size_t time_samples = 1;  // Z
    std::size_t num_classes = 0;
    std::vector<double> features;
    std::vector<int> labels;
    std::vector<SplitTag> split;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t sample_width() const noexcept { return sensors * time_samples; }

    std::span<const double> sample(std::size_t i) const {
        return {features.data() + i * sample_width(), sample_width()};
    }
    std::span<const double> time_slice(std::size_t i, std::size_t z) const {
        return {features.data() + i * sample_width() + z * sensors, sensors};
    }
    std::vector<std::size_t> indices(SplitTag tag) const;
    std::vector<std::size_t> all_indices() const;
};

// x(t) = G(t) s + w(t), (G(t))_{a,b} = sqrt(rho) (1 + 0.5 cos(2 pi t / T_s)) e^{-|a-b|},
// sampled at t = z T_s. Labels encode s in {-1,+1}^k as sum_b (s_b + 1)/2 * 2^b.
struct SyntheticSpec {
    std::size_t sensors = 16;
    std::size_t task_bits = 5;
    std::size_t time_samples = 3;
    double snr = 10.0;  // linear rho; 10 dB
    std::size_t n_samples = 20000;
    double train_fraction = 0.9;
    std::uint64_t seed = 0;

    static double snr_from_db(double db) noexcept;
    void validate() const;

    friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

// (G(t))_{a,b} with zero-based a, b and t expressed in sampling intervals.
double measurement_gain(const SyntheticSpec& spec, std::size_t a, std::size_t b, double t_over_ts) noexcept;

LabeledDataset generate_synthetic(const SyntheticSpec& spec);

// ---- IDX (big-endian, magic-numbered) ------------------------------------

class IdxError : public std::runtime_error {
public:
    enum class Kind { io, bad_magic, truncated, count_mismatch };
    IdxError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Pixels scaled to [0, 1], images flattened row-major; sensors = rows * cols,
// time_samples = 1, every sample tagged `tag`.
LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                        SplitTag tag = SplitTag::train, std::size_t num_classes = 10);

void write_idx_images(const std::filesystem::path& path, std::span<const std::uint8_t> pixels,
                      std::size_t count, std::size_t rows, std::size_t cols);
void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels);

// ---- splitting and batching -----------------------------------------------

// Shuffled mini-batches over a fixed index set; epoch e uses its own
// substream of `seed`. The final partial batch is kept.
class EpochBatcher {
public:
    EpochBatcher(std::vector<std::size_t> indices, std::size_t batch_size, std::uint64_t seed);

    std::vector<std::vector<std::size_t>> epoch(std::size_t e) const;
    std::size_t batch_size() const noexcept { return batch_size_; }
    std::span<const std::size_t> indices() const noexcept { return indices_; }

private:
    std::vector<std::size_t> indices_;
    std::size_t batch_size_;
    std::uint64_t seed_;
};

struct SplitBatches {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    EpochBatcher batches;
};

SplitBatches split_and_batch(const LabeledDataset& dataset, double train_fraction,
                             std::size_t batch_size, std::uint64_t seed);

// ---- tensor container -----------------------------------------------------

// <stem>.bin holds little-endian float64 features then int32 labels then
// uint8 split tags; <stem>.json records shapes and the generating seed.
void write_tensor_container(const LabeledDataset& dataset, const std::filesystem::path& stem,
                            std::uint64_t seed);
LabeledDataset read_tensor_container(const std::filesystem::path& stem);

}  // namespace memsar
