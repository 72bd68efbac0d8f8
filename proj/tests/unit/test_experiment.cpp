#include <stdexcept>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "memsar/experiment.hpp"

using namespace memsar;
namespace fs = std::filesystem;

namespace {

const char* kTiny = R"({
  "task": "synthetic",
  "pipeline": "distillation",
  "seed": 5,
  "adc": {"n_bits": 2, "channels": 2, "sharpness": 20},
  "hidden": [8],
  "noise": {"sigma": 0.05},
  "train": {"epochs": 2, "batch_size": 64, "learning_rate": 0.01, "beta": 0.001, "gamma": 0.5},
  "synthetic": {"sensors": 6, "task_bits": 2, "time_samples": 2, "n_samples": 240, "snr_db": 10}
})";

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / "memsar_test_experiment" / name;
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("task and pipeline names round-trip") {
    for (auto p : {Pipeline::uniform, Pipeline::noise_free, Pipeline::noisy_inference, Pipeline::noisy_training,
                   Pipeline::distillation}) {
        CHECK(parse_pipeline(to_string(p)) == p);
    }
    CHECK(parse_task(to_string(Task::digits)) == Task::digits);
    CHECK_THROWS_AS(parse_pipeline("magic"), ConfigError);
    CHECK_THROWS_AS(parse_task("audio"), ConfigError);
}

TEST_CASE("parse_config reads values and fills defaults") {
    const auto c = parse_config(kTiny);
    CHECK(c.seed == 5);
    CHECK(c.adc.n_bits == 2);
    CHECK(c.adc.channels == 2);
    CHECK(c.adc.supply_voltage == 1.0);
    CHECK(c.sigma == 0.05);
    CHECK(c.train.epochs == 2);
    CHECK(c.train.objective.alpha == doctest::Approx(0.1));
    CHECK(c.train.objective.tau == doctest::Approx(2.0));
    CHECK(c.synthetic.snr == doctest::Approx(10.0));
    CHECK(c.frontend == FrontendKind::fourier);
    CHECK_FALSE(c.noise_seed.has_value());
    CHECK(ExperimentConfig{}.train.objective.gamma == 0.5);
}

TEST_CASE("serialize then parse is the identity") {
    auto c = parse_config(kTiny);
    c.sweep_beta = {0.0, 1e-3};
    c.noise_seed = 77;
    c.adc.v_ref = 0.9;
    c.train.sharpness_final = 100.0;
    c.teacher_epochs = 3;
    c.output_dir = "somewhere";
    CHECK(parse_config(serialize_config(c)) == c);
    CHECK(serialize_config(parse_config(serialize_config(c))) == serialize_config(c));
}

TEST_CASE("unknown keys and bad values are rejected") {
    CHECK_THROWS_AS(parse_config(R"({"sede": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"adc": {"bits": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"train": {"epochs": "many"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"adc": {"n_bits": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"noise": {"sigma": -1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"synthetic": {"snr": 10, "snr_db": 10}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"task": "digits"})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
}

TEST_CASE("config_hash ignores only the output directory") {
    auto a = parse_config(kTiny);
    auto b = a;
    b.output_dir = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 6;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("output directory precedence") {
    auto c = parse_config(kTiny);
    ::unsetenv("MEMSAR_OUTPUT_ROOT");
    CHECK(resolve_output_dir(c, std::nullopt) == fs::path("runs") / "synthetic-distillation-s5");
    ::setenv("MEMSAR_OUTPUT_ROOT", "/tmp/root", 1);
    CHECK(resolve_output_dir(c, std::nullopt) == fs::path("/tmp/root") / "synthetic-distillation-s5");
    c.output_dir = "from_file";
    CHECK(resolve_output_dir(c, std::nullopt) == fs::path("from_file"));
    CHECK(resolve_output_dir(c, std::string("flag")) == fs::path("flag"));
    ::unsetenv("MEMSAR_OUTPUT_ROOT");
}

TEST_CASE("derived seeds are stable and separate") {
    const auto c = parse_config(kTiny);
    CHECK(effective_noise_seed(c) == effective_noise_seed(c));
    CHECK(effective_noise_seed(c) != effective_data_seed(c));
    CHECK(training_noise(c).seed != evaluation_noise(c).seed);
    CHECK(training_noise(c).sigma == 0.05);
    auto d = c;
    d.noise_seed = 12;
    CHECK(effective_noise_seed(d) == 12);
}

TEST_CASE("metrics CSV round-trip") {
    std::vector<MetricsRecord> recs(2);
    recs[0] = {1, 50.5, 1.25, 0.5, 7.0, 1e-5, 2.5e-5, 3.5e-5, 0.001, 0.05, 0};
    recs[1] = {2, 75.25, 0.75, 0.25, 7.0, 1.5e-5, 2e-5, 3.5e-5, 0.001, 0.05, 0};
    const auto text = format_csv(recs);
    CHECK(text.rfind("epoch,accuracy,ce,kd,reg,p_int,p_syn,p_total,beta,sigma\n", 0) == 0);
    const auto back = parse_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(back[1].epoch == 2);
    CHECK(back[1].accuracy == doctest::Approx(75.25));
    CHECK(back[0].p_syn == doctest::Approx(2.5e-5));
    CHECK(back[1].sigma == doctest::Approx(0.05));
    const auto path = fresh_dir("csv");
    fs::create_directories(path);
    emit_csv(recs, path / "m.csv");
    CHECK(read_csv(path / "m.csv").size() == 2);
    CHECK_THROWS(emit_csv({}, path / "empty.csv"));
    CHECK_THROWS(parse_csv("wrong,header\n1,2\n"));
}

TEST_CASE("uniform pipeline keeps the ADC weights uniform") {
    auto c = parse_config(kTiny);
    c.pipeline = Pipeline::uniform;
    const auto r = run_pipeline(c);
    for (const auto& w : r.params.adcs) CHECK(w == uniform_weights(c.adc.to_config()));
    for (auto l : r.summary.effective_levels) CHECK(l == 4);
    CHECK(r.summary.sigma == 0.0);
}

TEST_CASE("runs are deterministic and write their artifacts") {
    const auto c = parse_config(kTiny);
    const auto data = load_task_data(c);
    const auto dir = fresh_dir("run");
    const auto a = run_pipeline(c, &data, dir);
    const auto b = run_pipeline(c, &data);
    CHECK(a.records == b.records);
    CHECK(a.teacher_records == b.teacher_records);
    CHECK(a.summary.accuracy == b.summary.accuracy);
    CHECK(a.summary.teacher_accuracy.has_value());
    for (const char* f : {"metrics.csv", "teacher_metrics.csv", "summary.json", "checkpoint.json", "manifest.json"}) {
        CHECK(fs::exists(dir / f));
    }
    CHECK(read_csv(dir / "metrics.csv").size() == 2);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("seed") == 5);
    CHECK(manifest.at("pipeline") == "distillation");
    CHECK(manifest.contains("config_hash"));
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("accuracy").get<double>() == doctest::Approx(a.summary.accuracy));
}

TEST_CASE("beta sweep produces one ordered run per value") {
    auto c = parse_config(kTiny);
    c.pipeline = Pipeline::noise_free;
    c.sweep_beta = {0.0, 1e-2, 1e-1};
    const auto dir = fresh_dir("sweep");
    const auto sums = run(c, dir);
    REQUIRE(sums.size() == 3);
    CHECK(sums[0].beta == 0.0);
    CHECK(sums[2].beta == 0.1);
    for (const char* d : {"beta_00", "beta_01", "beta_02"}) CHECK(fs::exists(dir / d / "summary.json"));
    std::istringstream csv(slurp(dir / "sweep_summary.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "beta,accuracy,p_int,p_syn,p_total");
    int rows = 0;
    while (std::getline(csv, line)) rows += line.empty() ? 0 : 1;
    CHECK(rows == 3);
}

TEST_CASE("shipped configs parse") {
    const fs::path dir = MEMSAR_CONFIG_DIR;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_config(entry.path()));
    }
}
