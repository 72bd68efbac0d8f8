#include "memsar/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#ifndef MEMSAR_VERSION
#define MEMSAR_VERSION "unknown"
#endif

namespace memsar {

using nlohmann::json;

std::string library_version() { return MEMSAR_VERSION; }

namespace {

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

template <typename T>
T get(const json& j, const char* key) {
    if (!j.contains(key)) throw CheckpointError(std::string("checkpoint: missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw CheckpointError(std::string("checkpoint: bad field '") + key + "': " + e.what());
    }
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
    const SystemParams& p = ckpt.params;
    json adc = {{"n_bits", p.adc.n_bits()},           {"supply_voltage", p.adc.supply_voltage()},
                {"r_ref", p.adc.r_ref()},             {"sharpness_a", p.adc.sharpness_a()},
                {"v_ref", p.adc.v_ref()}};
    json adcs = json::array();
    for (const auto& w : p.adcs) adcs.push_back(as_vector(w.values()));
    json layers = json::array();
    for (const auto& l : p.net.layers) {
        layers.push_back({{"inputs", l.inputs}, {"outputs", l.outputs}, {"weight", l.weight}, {"bias", l.bias}});
    }
    json doc = {
        {"format", kCheckpointFormat},
        {"version", ckpt.version.empty() ? library_version() : ckpt.version},
        {"seed", ckpt.seed},
        {"adc", adc},
        {"frontend",
         {{"kind", std::string(to_string(p.frontend.kind()))},
          {"inputs", p.frontend.inputs()},
          {"outputs", p.frontend.outputs()},
          {"theta", as_vector(p.frontend.theta())}}},
        {"calibration", {{"offset", p.calibration.offset}, {"gain", p.calibration.gain}}},
        {"time_samples", p.time_samples},
        {"w_tilde", adcs},
        {"layers", layers},
        {"frozen", {{"frontend", p.frozen.frontend}, {"adc", p.frozen.adc}, {"net", p.frozen.net}}},
    };
    if (!ckpt.config_json.empty()) doc["config"] = json::parse(ckpt.config_json);
    return doc.dump(2) + "\n";
}

namespace {

Checkpoint from_document(const json& doc) {
    if (get<std::string>(doc, "format") != kCheckpointFormat) {
        throw CheckpointError("checkpoint: unsupported format '" + doc.at("format").dump() + "'");
    }
    Checkpoint ckpt;
    ckpt.version = get<std::string>(doc, "version");
    ckpt.seed = get<std::uint64_t>(doc, "seed");
    if (doc.contains("config")) ckpt.config_json = doc.at("config").dump();

    SystemParams& p = ckpt.params;
    const json& adc = doc.at("adc");
    p.adc = AdcConfig(get<int>(adc, "n_bits"), get<double>(adc, "supply_voltage"), get<double>(adc, "r_ref"),
                      get<double>(adc, "sharpness_a"), get<double>(adc, "v_ref"));

    const json& fe = doc.at("frontend");
    p.frontend = AnalogMap(parse_frontend_kind(get<std::string>(fe, "kind")), get<std::size_t>(fe, "inputs"),
                           get<std::size_t>(fe, "outputs"));
    const auto theta = get<std::vector<double>>(fe, "theta");
    if (theta.size() != p.frontend.theta().size()) throw CheckpointError("checkpoint: theta size mismatch");
    std::copy(theta.begin(), theta.end(), p.frontend.theta().begin());

    const json& cal = doc.at("calibration");
    p.calibration.offset = get<std::vector<double>>(cal, "offset");
    p.calibration.gain = get<std::vector<double>>(cal, "gain");
    p.time_samples = get<std::size_t>(doc, "time_samples");

    for (const auto& values : doc.at("w_tilde")) {
        MemristorWeights w(p.adc.n_bits());
        const auto v = values.get<std::vector<double>>();
        if (v.size() != w.size()) throw CheckpointError("checkpoint: ADC weight count mismatch");
        std::copy(v.begin(), v.end(), w.values().begin());
        p.adcs.push_back(std::move(w));
    }
    for (const auto& l : doc.at("layers")) {
        DenseLayer layer(get<std::size_t>(l, "inputs"), get<std::size_t>(l, "outputs"));
        layer.weight = get<std::vector<double>>(l, "weight");
        layer.bias = get<std::vector<double>>(l, "bias");
        if (layer.weight.size() != layer.inputs * layer.outputs || layer.bias.size() != layer.outputs) {
            throw CheckpointError("checkpoint: layer shape mismatch");
        }
        p.net.layers.push_back(std::move(layer));
    }
    if (doc.contains("frozen")) {
        const json& f = doc.at("frozen");
        p.frozen = {get<bool>(f, "frontend"), get<bool>(f, "adc"), get<bool>(f, "net")};
    }
    p.validate();
    return ckpt;
}

}  // namespace

Checkpoint checkpoint_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw CheckpointError(std::string("checkpoint: invalid JSON: ") + e.what());
    }
    try {
        return from_document(doc);
    } catch (const json::exception& e) {
        throw CheckpointError(std::string("checkpoint: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("checkpoint: ") + e.what());
    }
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("checkpoint: cannot open " + path.string() + " for writing");
    out << checkpoint_to_json(ckpt);
    if (!out) throw CheckpointError("checkpoint: write failed for " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("checkpoint: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_json(ss.str());
}

}  // namespace memsar
