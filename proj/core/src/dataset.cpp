#include "memsar/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "memsar/rng.hpp"

namespace memsar {

namespace fs = std::filesystem;

std::vector<std::size_t> LabeledDataset::indices(SplitTag tag) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (split[i] == tag) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> LabeledDataset::all_indices() const {
    std::vector<std::size_t> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    return out;
}

double SyntheticSpec::snr_from_db(double db) noexcept { return std::pow(10.0, db / 10.0); }

void SyntheticSpec::validate() const {
    if (sensors == 0 || task_bits == 0 || time_samples == 0 || n_samples == 0) {
        throw std::invalid_argument("SyntheticSpec: dimensions must be positive");
    }
    if (task_bits > 20) throw std::invalid_argument("SyntheticSpec: task_bits too large");
    if (!(snr > 0.0)) throw std::invalid_argument("SyntheticSpec: snr must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("SyntheticSpec: train_fraction must be in (0, 1)");
    }
}

double measurement_gain(const SyntheticSpec& spec, std::size_t a, std::size_t b, double t_over_ts) noexcept {
    const double dist = std::abs(static_cast<double>(a) - static_cast<double>(b));
    return std::sqrt(spec.snr) * (1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * t_over_ts)) *
           std::exp(-dist);
}

namespace {

std::vector<SplitTag> make_split(std::size_t n, double train_fraction, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng::Stream stream(rng::derive({seed, 0x73706c6974ULL}));
    rng::shuffle(order, stream);
    auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n > 1 ? n - 1 : 1);
    std::vector<SplitTag> tags(n, SplitTag::test);
    for (std::size_t k = 0; k < n_train; ++k) tags[order[k]] = SplitTag::train;
    return tags;
}

}  // namespace

LabeledDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    LabeledDataset ds;
    ds.sensors = spec.sensors;
    ds.time_samples = spec.time_samples;
    ds.num_classes = std::size_t{1} << spec.task_bits;
    ds.features.resize(spec.n_samples * ds.sample_width());
    ds.labels.resize(spec.n_samples);

    // G depends on t only through cos(2 pi z), tabulate per time sample.
    std::vector<double> gain(spec.time_samples * spec.sensors * spec.task_bits);
    for (std::size_t z = 0; z < spec.time_samples; ++z) {
        for (std::size_t a = 0; a < spec.sensors; ++a) {
            for (std::size_t b = 0; b < spec.task_bits; ++b) {
                gain[(z * spec.sensors + a) * spec.task_bits + b] =
                    measurement_gain(spec, a, b, static_cast<double>(z));
            }
        }
    }

    rng::Stream stream(rng::derive({spec.seed, 0x73796e7468ULL}));
    std::vector<double> s(spec.task_bits);
    for (std::size_t r = 0; r < spec.n_samples; ++r) {
        int label = 0;
        for (std::size_t b = 0; b < spec.task_bits; ++b) {
            const bool up = (stream.next() >> 63) != 0;
            s[b] = up ? 1.0 : -1.0;
            if (up) label |= (1 << b);
        }
        ds.labels[r] = label;
        double* x = ds.features.data() + r * ds.sample_width();
        for (std::size_t z = 0; z < spec.time_samples; ++z) {
            for (std::size_t a = 0; a < spec.sensors; ++a) {
                double acc = stream.normal();
                const double* g = gain.data() + (z * spec.sensors + a) * spec.task_bits;
                for (std::size_t b = 0; b < spec.task_bits; ++b) acc += g[b] * s[b];
                x[z * spec.sensors + a] = acc;
            }
        }
    }
    ds.split = make_split(spec.n_samples, spec.train_fraction, spec.seed);
    return ds;
}

// ---- IDX -------------------------------------------------------------------

namespace {

std::vector<std::uint8_t> read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IdxError(IdxError::Kind::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<std::uint8_t>& bytes, std::size_t offset) {
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IdxError(IdxError::Kind::io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IdxError(IdxError::Kind::io, "write failed for " + path.string());
}

}  // namespace

LabeledDataset load_idx(const fs::path& images, const fs::path& labels, SplitTag tag,
                        std::size_t num_classes) {
    const auto img = read_all(images);
    const auto lab = read_all(labels);
    if (img.size() < 16) throw IdxError(IdxError::Kind::truncated, "image header truncated");
    if (lab.size() < 8) throw IdxError(IdxError::Kind::truncated, "label header truncated");
    if (be32(img, 0) != kIdxImageMagic) {
        throw IdxError(IdxError::Kind::bad_magic, "bad image magic in " + images.string());
    }
    if (be32(lab, 0) != kIdxLabelMagic) {
        throw IdxError(IdxError::Kind::bad_magic, "bad label magic in " + labels.string());
    }
    const std::size_t count = be32(img, 4);
    const std::size_t rows = be32(img, 8);
    const std::size_t cols = be32(img, 12);
    const std::size_t label_count = be32(lab, 4);
    const std::size_t pixels = rows * cols;
    if (img.size() < 16 + count * pixels) {
        throw IdxError(IdxError::Kind::truncated, "image payload truncated in " + images.string());
    }
    if (lab.size() < 8 + label_count) {
        throw IdxError(IdxError::Kind::truncated, "label payload truncated in " + labels.string());
    }
    if (count != label_count) {
        throw IdxError(IdxError::Kind::count_mismatch,
                       "image count " + std::to_string(count) + " != label count " +
                           std::to_string(label_count));
    }
    LabeledDataset ds;
    ds.sensors = pixels;
    ds.time_samples = 1;
    ds.num_classes = num_classes;
    ds.features.resize(count * pixels);
    for (std::size_t k = 0; k < count * pixels; ++k) ds.features[k] = img[16 + k] / 255.0;
    ds.labels.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        ds.labels[k] = lab[8 + k];
        if (static_cast<std::size_t>(ds.labels[k]) >= num_classes) {
            throw IdxError(IdxError::Kind::count_mismatch, "label out of class range");
        }
    }
    ds.split.assign(count, tag);
    return ds;
}

void write_idx_images(const fs::path& path, std::span<const std::uint8_t> pixels, std::size_t count,
                      std::size_t rows, std::size_t cols) {
    if (pixels.size() != count * rows * cols) {
        throw std::invalid_argument("write_idx_images: pixel count does not match shape");
    }
    std::vector<std::uint8_t> out;
    out.reserve(16 + pixels.size());
    put_be32(out, kIdxImageMagic);
    put_be32(out, static_cast<std::uint32_t>(count));
    put_be32(out, static_cast<std::uint32_t>(rows));
    put_be32(out, static_cast<std::uint32_t>(cols));
    out.insert(out.end(), pixels.begin(), pixels.end());
    write_bytes(path, out);
}

void write_idx_labels(const fs::path& path, std::span<const std::uint8_t> labels) {
    std::vector<std::uint8_t> out;
    out.reserve(8 + labels.size());
    put_be32(out, kIdxLabelMagic);
    put_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.insert(out.end(), labels.begin(), labels.end());
    write_bytes(path, out);
}

// ---- batching --------------------------------------------------------------

EpochBatcher::EpochBatcher(std::vector<std::size_t> indices, std::size_t batch_size, std::uint64_t seed)
    : indices_(std::move(indices)), batch_size_(batch_size), seed_(seed) {
    if (batch_size_ == 0) throw std::invalid_argument("EpochBatcher: batch_size must be >= 1");
    if (indices_.empty()) throw std::invalid_argument("EpochBatcher: empty index set");
}

std::vector<std::vector<std::size_t>> EpochBatcher::epoch(std::size_t e) const {
    std::vector<std::size_t> order = indices_;
    rng::Stream stream(rng::derive({seed_, 0x65706f6368ULL, e}));
    rng::shuffle(order, stream);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < order.size(); start += batch_size_) {
        const std::size_t end = std::min(order.size(), start + batch_size_);
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

SplitBatches split_and_batch(const LabeledDataset& dataset, double train_fraction,
                             std::size_t batch_size, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("split_and_batch: train_fraction must be in (0, 1)");
    }
    const auto tags = make_split(dataset.size(), train_fraction, seed);
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        (tags[i] == SplitTag::train ? train : test).push_back(i);
    }
    if (train.empty() || test.empty()) throw std::invalid_argument("split_and_batch: empty split");
    EpochBatcher batcher(train, batch_size, seed);
    return {std::move(train), std::move(test), std::move(batcher)};
}

// ---- tensor container ---------------------------------------------------------

namespace {

template <typename T>
void put_le(std::ofstream& out, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::ifstream& in) {
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if (!in) throw std::runtime_error("tensor container: payload truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

fs::path with_suffix(const fs::path& stem, const char* suffix) {
    fs::path p = stem;
    p += suffix;
    return p;
}

}  // namespace

void write_tensor_container(const LabeledDataset& dataset, const fs::path& stem, std::uint64_t seed) {
    {
        std::ofstream bin(with_suffix(stem, ".bin"), std::ios::binary);
        if (!bin) throw std::runtime_error("cannot write " + with_suffix(stem, ".bin").string());
        for (double v : dataset.features) put_le<double>(bin, v);
        for (int l : dataset.labels) put_le<std::int32_t>(bin, l);
        for (auto t : dataset.split) put_le<std::uint8_t>(bin, static_cast<std::uint8_t>(t));
        if (!bin) throw std::runtime_error("tensor container: write failed");
    }
    nlohmann::ordered_json meta;
    meta["format"] = "memsar-tensor/1";
    meta["samples"] = dataset.size();
    meta["time_samples"] = dataset.time_samples;
    meta["sensors"] = dataset.sensors;
    meta["num_classes"] = dataset.num_classes;
    meta["features"] = {{"dtype", "float64le"}, {"shape", {dataset.size(), dataset.time_samples, dataset.sensors}}};
    meta["labels"] = {{"dtype", "int32le"}, {"shape", {dataset.size()}}};
    meta["split"] = {{"dtype", "uint8"}, {"shape", {dataset.size()}}, {"values", {"train", "test"}}};
    meta["seed"] = seed;
    std::ofstream js(with_suffix(stem, ".json"));
    if (!js) throw std::runtime_error("cannot write " + with_suffix(stem, ".json").string());
    js << meta.dump(2) << '\n';
}

LabeledDataset read_tensor_container(const fs::path& stem) {
    std::ifstream js(with_suffix(stem, ".json"));
    if (!js) throw std::runtime_error("cannot open " + with_suffix(stem, ".json").string());
    const auto meta = nlohmann::json::parse(js);
    if (meta.at("format") != "memsar-tensor/1") throw std::runtime_error("tensor container: unknown format");
    LabeledDataset ds;
    const auto n = meta.at("samples").get<std::size_t>();
    ds.time_samples = meta.at("time_samples").get<std::size_t>();
    ds.sensors = meta.at("sensors").get<std::size_t>();
    ds.num_classes = meta.at("num_classes").get<std::size_t>();
    std::ifstream bin(with_suffix(stem, ".bin"), std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open " + with_suffix(stem, ".bin").string());
    ds.features.resize(n * ds.sample_width());
    for (double& v : ds.features) v = get_le<double>(bin);
    ds.labels.resize(n);
    for (int& l : ds.labels) l = get_le<std::int32_t>(bin);
    ds.split.resize(n);
    for (auto& t : ds.split) t = static_cast<SplitTag>(get_le<std::uint8_t>(bin));
    return ds;
}

}  // namespace memsar
