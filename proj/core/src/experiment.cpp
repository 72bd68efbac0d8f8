#include "memsar/experiment.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "memsar/checkpoint.hpp"
#include "memsar/losses.hpp"
#include "memsar/rng.hpp"

namespace memsar {

using nlohmann::json;

namespace {

constexpr std::uint64_t kNoiseTag = 0x6e6f697365ULL;
constexpr std::uint64_t kEvalTag = 0x6576616cULL;
constexpr std::uint64_t kDataTag = 0x64617461ULL;
constexpr std::uint64_t kInitTag = 0x696e6974ULL;
constexpr std::uint64_t kShuffleTag = 0x73687566ULL;

constexpr const char* kCsvHeader = "epoch,accuracy,ce,kd,reg,p_int,p_syn,p_total,beta,sigma";

}  // namespace

std::string_view to_string(Task task) noexcept {
    return task == Task::synthetic ? "synthetic" : "digits";
}

std::string_view to_string(Pipeline pipeline) noexcept {
    switch (pipeline) {
        case Pipeline::uniform: return "uniform";
        case Pipeline::noise_free: return "noise_free";
        case Pipeline::noisy_inference: return "noisy_inference";
        case Pipeline::noisy_training: return "noisy_training";
        case Pipeline::distillation: return "distillation";
    }
    return "distillation";
}

Task parse_task(std::string_view name) {
    if (name == "synthetic") return Task::synthetic;
    if (name == "digits") return Task::digits;
    throw ConfigError("unknown task '" + std::string(name) + "' (expected synthetic or digits)");
}

Pipeline parse_pipeline(std::string_view name) {
    for (auto p : {Pipeline::uniform, Pipeline::noise_free, Pipeline::noisy_inference,
                   Pipeline::noisy_training, Pipeline::distillation}) {
        if (name == to_string(p)) return p;
    }
    throw ConfigError("unknown pipeline '" + std::string(name) +
                      "' (expected uniform, noise_free, noisy_inference, noisy_training or distillation)");
}

AdcConfig AdcSection::to_config() const {
    return AdcConfig(n_bits, supply_voltage, r_ref, sharpness, v_ref);
}

ExperimentConfig::ExperimentConfig() {
    train.objective.gamma = 0.5;
}

void ExperimentConfig::validate() const {
    try {
        (void)adc.to_config();
        train.validate();
        synthetic.validate();
        NoiseSpec{sigma, {}, 0}.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (adc.channels == 0) throw ConfigError("adc.channels must be >= 1");
    if (hidden.empty()) throw ConfigError("hidden must list at least one layer width");
    for (auto h : hidden) {
        if (h == 0) throw ConfigError("hidden layer widths must be >= 1");
    }
    if (task == Task::digits &&
        (digits.train_images.empty() || digits.train_labels.empty() || digits.test_images.empty() ||
         digits.test_labels.empty())) {
        throw ConfigError("digits task needs train_images, train_labels, test_images and test_labels");
    }
}

// ---- parsing ------------------------------------------------------------

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown config key '" + where + (where.empty() ? "" : ".") + key + "'");
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for '" + where + (where.empty() ? "" : ".") + key + "': " +
                          obj.at(key).dump());
    }
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& out, const std::string& where) {
    if (!obj.contains(key)) return;
    if (obj.at(key).is_null()) {
        out.reset();
        return;
    }
    T v{};
    read(obj, key, v, where);
    out = v;
}

template <typename T>
void put_optional(json& obj, const char* key, const std::optional<T>& v) {
    if (v) obj[key] = *v;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(doc,
               {"task", "pipeline", "seed", "output_dir", "adc", "frontend", "hidden", "noise", "train",
                "synthetic", "digits", "sweep"},
               "");
    ExperimentConfig c;
    std::string s;
    if (doc.contains("task")) {
        read(doc, "task", s, "");
        c.task = parse_task(s);
    }
    if (doc.contains("pipeline")) {
        read(doc, "pipeline", s, "");
        c.pipeline = parse_pipeline(s);
    }
    read(doc, "seed", c.seed, "");
    read(doc, "output_dir", c.output_dir, "");
    if (doc.contains("frontend")) {
        read(doc, "frontend", s, "");
        try {
            c.frontend = parse_frontend_kind(s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    read(doc, "hidden", c.hidden, "");

    if (doc.contains("adc")) {
        const json& a = doc["adc"];
        check_keys(a, {"n_bits", "channels", "supply_voltage", "r_ref", "v_ref", "sharpness"}, "adc");
        read(a, "n_bits", c.adc.n_bits, "adc");
        read(a, "channels", c.adc.channels, "adc");
        read(a, "supply_voltage", c.adc.supply_voltage, "adc");
        read(a, "r_ref", c.adc.r_ref, "adc");
        read_optional(a, "v_ref", c.adc.v_ref, "adc");
        read(a, "sharpness", c.adc.sharpness, "adc");
    }
    if (doc.contains("noise")) {
        const json& n = doc["noise"];
        check_keys(n, {"sigma", "seed"}, "noise");
        read(n, "sigma", c.sigma, "noise");
        read_optional(n, "seed", c.noise_seed, "noise");
    }
    if (doc.contains("train")) {
        const json& t = doc["train"];
        check_keys(t,
                   {"epochs", "teacher_epochs", "batch_size", "optimizer", "learning_rate", "beta1", "beta2",
                    "epsilon", "alpha", "beta", "gamma", "tau", "mc_draws", "eval_mc_draws", "reduction",
                    "soften_student", "power_unit_watts", "sharpness_final", "shuffle_seed", "warm_start_student"},
                   "train");
        auto& tr = c.train;
        read(t, "epochs", tr.epochs, "train");
        read_optional(t, "teacher_epochs", c.teacher_epochs, "train");
        read(t, "batch_size", tr.batch_size, "train");
        if (t.contains("optimizer")) {
            read(t, "optimizer", s, "train");
            try {
                tr.optimizer.kind = parse_optimizer_kind(s);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        read(t, "learning_rate", tr.optimizer.learning_rate, "train");
        read(t, "beta1", tr.optimizer.beta1, "train");
        read(t, "beta2", tr.optimizer.beta2, "train");
        read(t, "epsilon", tr.optimizer.epsilon, "train");
        read(t, "alpha", tr.objective.alpha, "train");
        read(t, "beta", tr.objective.beta, "train");
        read(t, "gamma", tr.objective.gamma, "train");
        read(t, "tau", tr.objective.tau, "train");
        read(t, "mc_draws", tr.mc_draws, "train");
        read(t, "eval_mc_draws", tr.eval_mc_draws, "train");
        if (t.contains("reduction")) {
            read(t, "reduction", s, "train");
            if (s == "mean") tr.objective.reduction = Reduction::mean;
            else if (s == "sum") tr.objective.reduction = Reduction::sum;
            else throw ConfigError("train.reduction must be mean or sum");
        }
        read(t, "soften_student", tr.objective.soften_student, "train");
        read(t, "power_unit_watts", tr.objective.power_unit_watts, "train");
        read_optional(t, "sharpness_final", tr.sharpness_final, "train");
        read(t, "shuffle_seed", tr.seed, "train");
        read(t, "warm_start_student", c.warm_start_student, "train");
    }
    if (doc.contains("synthetic")) {
        const json& y = doc["synthetic"];
        check_keys(y, {"sensors", "task_bits", "time_samples", "snr", "snr_db", "n_samples", "train_fraction", "seed"},
                   "synthetic");
        auto& sp = c.synthetic;
        read(y, "sensors", sp.sensors, "synthetic");
        read(y, "task_bits", sp.task_bits, "synthetic");
        read(y, "time_samples", sp.time_samples, "synthetic");
        read(y, "snr", sp.snr, "synthetic");
        if (y.contains("snr_db")) {
            if (y.contains("snr")) throw ConfigError("synthetic: give either snr or snr_db, not both");
            double db = 0.0;
            read(y, "snr_db", db, "synthetic");
            sp.snr = SyntheticSpec::snr_from_db(db);
        }
        read(y, "n_samples", sp.n_samples, "synthetic");
        read(y, "train_fraction", sp.train_fraction, "synthetic");
        read_optional(y, "seed", c.data_seed, "synthetic");
    }
    if (doc.contains("digits")) {
        const json& d = doc["digits"];
        check_keys(d, {"train_images", "train_labels", "test_images", "test_labels", "train_limit", "test_limit"},
                   "digits");
        std::string p;
        auto path = [&](const char* key, std::filesystem::path& out) {
            if (!d.contains(key)) return;
            read(d, key, p, "digits");
            out = p;
        };
        path("train_images", c.digits.train_images);
        path("train_labels", c.digits.train_labels);
        path("test_images", c.digits.test_images);
        path("test_labels", c.digits.test_labels);
        read(d, "train_limit", c.digits.train_limit, "digits");
        read(d, "test_limit", c.digits.test_limit, "digits");
    }
    if (doc.contains("sweep")) {
        const json& w = doc["sweep"];
        check_keys(w, {"beta"}, "sweep");
        read(w, "beta", c.sweep_beta, "sweep");
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    ExperimentConfig c = parse_config(ss.str());
    const auto base = path.parent_path();
    for (auto* p : {&c.digits.train_images, &c.digits.train_labels, &c.digits.test_images, &c.digits.test_labels}) {
        if (!p->empty() && p->is_relative()) *p = (base / *p).lexically_normal();
    }
    return c;
}

namespace {

json config_json(const ExperimentConfig& c) {
    json adc = {{"n_bits", c.adc.n_bits},
                {"channels", c.adc.channels},
                {"supply_voltage", c.adc.supply_voltage},
                {"r_ref", c.adc.r_ref},
                {"sharpness", c.adc.sharpness}};
    put_optional(adc, "v_ref", c.adc.v_ref);
    json noise = {{"sigma", c.sigma}};
    put_optional(noise, "seed", c.noise_seed);
    const auto& tr = c.train;
    json train = {{"epochs", tr.epochs},
                  {"batch_size", tr.batch_size},
                  {"optimizer", std::string(to_string(tr.optimizer.kind))},
                  {"learning_rate", tr.optimizer.learning_rate},
                  {"beta1", tr.optimizer.beta1},
                  {"beta2", tr.optimizer.beta2},
                  {"epsilon", tr.optimizer.epsilon},
                  {"alpha", tr.objective.alpha},
                  {"beta", tr.objective.beta},
                  {"gamma", tr.objective.gamma},
                  {"tau", tr.objective.tau},
                  {"mc_draws", tr.mc_draws},
                  {"eval_mc_draws", tr.eval_mc_draws},
                  {"reduction", tr.objective.reduction == Reduction::mean ? "mean" : "sum"},
                  {"soften_student", tr.objective.soften_student},
                  {"power_unit_watts", tr.objective.power_unit_watts},
                  {"shuffle_seed", tr.seed},
                  {"warm_start_student", c.warm_start_student}};
    put_optional(train, "teacher_epochs", c.teacher_epochs);
    put_optional(train, "sharpness_final", tr.sharpness_final);
    json synthetic = {{"sensors", c.synthetic.sensors},
                      {"task_bits", c.synthetic.task_bits},
                      {"time_samples", c.synthetic.time_samples},
                      {"snr", c.synthetic.snr},
                      {"n_samples", c.synthetic.n_samples},
                      {"train_fraction", c.synthetic.train_fraction}};
    put_optional(synthetic, "seed", c.data_seed);
    json digits = {{"train_images", c.digits.train_images.generic_string()},
                   {"train_labels", c.digits.train_labels.generic_string()},
                   {"test_images", c.digits.test_images.generic_string()},
                   {"test_labels", c.digits.test_labels.generic_string()},
                   {"train_limit", c.digits.train_limit},
                   {"test_limit", c.digits.test_limit}};
    return {{"task", std::string(to_string(c.task))},
            {"pipeline", std::string(to_string(c.pipeline))},
            {"seed", c.seed},
            {"output_dir", c.output_dir},
            {"adc", adc},
            {"frontend", std::string(to_string(c.frontend))},
            {"hidden", c.hidden},
            {"noise", noise},
            {"train", train},
            {"synthetic", synthetic},
            {"digits", digits},
            {"sweep", {{"beta", c.sweep_beta}}}};
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory " + dir.string() +
                                 (ec ? ": " + ec.message() : ""));
    }
}

LabeledDataset take_first(LabeledDataset ds, std::size_t limit) {
    if (limit == 0 || limit >= ds.size()) return ds;
    ds.features.resize(limit * ds.sample_width());
    ds.labels.resize(limit);
    ds.split.resize(limit);
    return ds;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& config) { return config_json(config).dump(2) + "\n"; }

std::uint64_t config_hash(const ExperimentConfig& config) {
    json j = config_json(config);
    j.erase("output_dir");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (!config.output_dir.empty()) return config.output_dir;
    const std::string name = std::string(to_string(config.task)) + "-" + std::string(to_string(config.pipeline)) +
                             "-s" + std::to_string(config.seed);
    if (const char* root = std::getenv("MEMSAR_OUTPUT_ROOT"); root && *root) {
        return std::filesystem::path(root) / name;
    }
    return std::filesystem::path("runs") / name;
}

std::uint64_t effective_noise_seed(const ExperimentConfig& config) noexcept {
    return config.noise_seed ? *config.noise_seed : rng::derive({config.seed, kNoiseTag});
}

std::uint64_t effective_data_seed(const ExperimentConfig& config) noexcept {
    return config.data_seed ? *config.data_seed : rng::derive({config.seed, kDataTag});
}

NoiseSpec training_noise(const ExperimentConfig& config) {
    return NoiseSpec{config.sigma, {}, effective_noise_seed(config)};
}

NoiseSpec evaluation_noise(const ExperimentConfig& config) {
    return NoiseSpec{config.sigma, {}, rng::derive({effective_noise_seed(config), kEvalTag})};
}

LabeledDataset load_task_data(const ExperimentConfig& config) {
    if (config.task == Task::synthetic) {
        SyntheticSpec spec = config.synthetic;
        spec.seed = effective_data_seed(config);
        return generate_synthetic(spec);
    }
    auto train = take_first(load_idx(config.digits.train_images, config.digits.train_labels, SplitTag::train),
                            config.digits.train_limit);
    auto test = take_first(load_idx(config.digits.test_images, config.digits.test_labels, SplitTag::test),
                           config.digits.test_limit);
    if (train.sensors != test.sensors) throw ConfigError("digits: train and test image sizes differ");
    train.features.insert(train.features.end(), test.features.begin(), test.features.end());
    train.labels.insert(train.labels.end(), test.labels.begin(), test.labels.end());
    train.split.insert(train.split.end(), test.split.begin(), test.split.end());
    return train;
}

SystemShape system_shape(const ExperimentConfig& config, const LabeledDataset& data) {
    SystemShape shape;
    shape.frontend = config.frontend;
    shape.sensors = data.sensors;
    shape.frontend_outputs = config.adc.channels;
    shape.time_samples = data.time_samples;
    shape.num_classes = data.num_classes;
    shape.hidden = config.hidden;
    return shape;
}

// ---- pipelines ------------------------------------------------------------

RunResult run_pipeline(const ExperimentConfig& config, const LabeledDataset* data,
                       const std::optional<std::filesystem::path>& out_dir) {
    config.validate();
    if (out_dir) ensure_dir(*out_dir);
    LabeledDataset owned;
    if (data == nullptr) {
        owned = load_task_data(config);
        data = &owned;
    }
    const auto train_idx = data->indices(SplitTag::train);
    const auto test_idx = data->indices(SplitTag::test);
    if (train_idx.empty() || test_idx.empty()) throw ConfigError("dataset has an empty train or test split");

    const AdcConfig adc = config.adc.to_config();
    SystemParams init = SystemParams::init(system_shape(config, *data), adc, rng::derive({config.seed, kInitTag}));
    calibrate(init, *data, train_idx);

    TrainConfig tc = config.train;
    if (tc.seed == 0) tc.seed = rng::derive({config.seed, kShuffleTag});
    const NoiseSpec none;
    const NoiseSpec train_noise = training_noise(config);
    const NoiseSpec eval_noise = evaluation_noise(config);

    RunResult res;
    res.summary.pipeline = config.pipeline;
    res.summary.beta = tc.objective.beta;
    TrainResult tr;
    switch (config.pipeline) {
        case Pipeline::uniform:
        case Pipeline::noise_free:
        case Pipeline::noisy_inference: {
            tc.objective.gamma = 0.0;
            if (config.pipeline == Pipeline::uniform) init.frozen.adc = true;
            const NoiseSpec& ev = config.pipeline == Pipeline::noisy_inference ? eval_noise : none;
            tr = train_student(init, *data, train_idx, test_idx, nullptr, tc, none, ev);
            break;
        }
        case Pipeline::noisy_training:
            tc.objective.gamma = 0.0;
            tr = train_student(init, *data, train_idx, test_idx, nullptr, tc, train_noise, eval_noise);
            break;
        case Pipeline::distillation: {
            TrainConfig teacher_cfg = tc;
            teacher_cfg.epochs = config.teacher_epochs.value_or(tc.epochs);
            auto teacher = train_teacher(init, *data, train_idx, test_idx, teacher_cfg);
            teacher.params.adc = adc;
            res.teacher_records = teacher.records;
            if (!teacher.records.empty()) res.summary.teacher_accuracy = teacher.records.back().accuracy;
            const auto targets = teacher_targets(teacher.params, *data, tc.objective.tau);
            const TeacherTargets* t = tc.objective.gamma != 0.0 ? &targets : nullptr;
            const SystemParams& start = config.warm_start_student ? teacher.params : init;
            tr = train_student(start, *data, train_idx, test_idx, t, tc, train_noise, eval_noise);
            break;
        }
    }
    res.records = std::move(tr.records);
    res.params = std::move(tr.params);
    res.params.adc = adc;

    const bool noisy_eval = config.pipeline != Pipeline::uniform && config.pipeline != Pipeline::noise_free;
    res.summary.sigma = noisy_eval ? config.sigma : 0.0;
    if (!res.records.empty()) {
        res.summary.accuracy = res.records.back().accuracy;
        res.summary.power = {res.records.back().p_int, res.records.back().p_syn};
    } else {
        const auto ev = evaluate(res.params, *data, test_idx, noisy_eval ? eval_noise : none, tc.eval_mc_draws);
        res.summary.accuracy = ev.accuracy;
        res.summary.power = ev.power;
    }
    for (const auto& w : res.params.adcs) {
        res.summary.effective_levels.push_back(effective_levels(w, adc, std::size_t{1} << 16));
    }

    if (out_dir) {
        emit_csv(res.records, *out_dir / "metrics.csv");
        if (!res.teacher_records.empty()) emit_csv(res.teacher_records, *out_dir / "teacher_metrics.csv");
        write_text(*out_dir / "summary.json", summary_to_json(res.summary));
        write_checkpoint(*out_dir / "checkpoint.json",
                         Checkpoint{res.params, config.seed, config_json(config).dump(), library_version()});
        char hash[24];
        std::snprintf(hash, sizeof hash, "%016" PRIx64, config_hash(config));
        const json manifest = {{"format", "memsar-manifest/1"},
                               {"config_hash", hash},
                               {"seed", config.seed},
                               {"noise_seed", effective_noise_seed(config)},
                               {"data_seed", effective_data_seed(config)},
                               {"version", library_version()},
                               {"pipeline", std::string(to_string(config.pipeline))},
                               {"config", config_json(config)}};
        write_text(*out_dir / "manifest.json", manifest.dump(2) + "\n");
    }
    return res;
}

std::vector<RunSummary> run(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                            const LabeledDataset* data) {
    config.validate();
    ensure_dir(out_dir);
    LabeledDataset owned;
    if (data == nullptr) {
        owned = load_task_data(config);
        data = &owned;
    }
    std::vector<RunSummary> out;
    if (config.sweep_beta.empty()) {
        out.push_back(run_pipeline(config, data, out_dir).summary);
        return out;
    }
    std::string table = "beta,accuracy,p_int,p_syn,p_total\n";
    for (std::size_t k = 0; k < config.sweep_beta.size(); ++k) {
        ExperimentConfig point = config;
        point.sweep_beta.clear();
        point.train.objective.beta = config.sweep_beta[k];
        char name[48];
        std::snprintf(name, sizeof name, "beta_%02zu", k);
        const auto s = run_pipeline(point, data, out_dir / name).summary;
        table += fmt6(s.beta) + "," + fmt6(s.accuracy) + "," + fmt6(s.power.p_int) + "," + fmt6(s.power.p_syn) +
                 "," + fmt6(s.power.total()) + "\n";
        out.push_back(s);
    }
    write_text(out_dir / "sweep_summary.csv", table);
    return out;
}

// ---- CSV / summaries ----------------------------------------------------------

std::string format_csv(std::span<const MetricsRecord> records) {
    std::string text = std::string(kCsvHeader) + "\n";
    for (const auto& r : records) {
        text += std::to_string(r.epoch);
        for (double v : {r.accuracy, r.ce, r.kd, r.reg, r.p_int, r.p_syn, r.p_total, r.beta, r.sigma}) {
            text += ",";
            text += fmt6(v);
        }
        text += "\n";
    }
    return text;
}

void emit_csv(std::span<const MetricsRecord> records, const std::filesystem::path& path) {
    if (records.empty()) throw std::invalid_argument("emit_csv: no records");
    write_text(path, format_csv(records));
}

std::vector<MetricsRecord> parse_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("metrics csv: unexpected header");
    std::vector<MetricsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> f;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const auto comma = line.find(',', pos);
            const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size()) {
                throw std::runtime_error("metrics csv: bad cell '" + cell + "'");
            }
            f.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (f.size() != 10) throw std::runtime_error("metrics csv: expected 10 columns");
        MetricsRecord r;
        r.epoch = static_cast<std::size_t>(f[0]);
        r.accuracy = f[1];
        r.ce = f[2];
        r.kd = f[3];
        r.reg = f[4];
        r.p_int = f[5];
        r.p_syn = f[6];
        r.p_total = f[7];
        r.beta = f[8];
        r.sigma = f[9];
        out.push_back(r);
    }
    return out;
}

std::vector<MetricsRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

std::string summary_to_json(const RunSummary& s) {
    json j = {{"pipeline", std::string(to_string(s.pipeline))},
              {"beta", s.beta},
              {"sigma", s.sigma},
              {"accuracy", s.accuracy},
              {"p_int_w", s.power.p_int},
              {"p_syn_w", s.power.p_syn},
              {"p_total_w", s.power.total()},
              {"p_total_uw", s.power.total() * 1e6},
              {"effective_levels", s.effective_levels}};
    if (s.teacher_accuracy) j["teacher_accuracy"] = *s.teacher_accuracy;
    return j.dump(2) + "\n";
}

}  // namespace memsar
