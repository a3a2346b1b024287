#include <doctest.h>

#include <fstream>
#include <random>

#include "dqn/checkpoint.hpp"
#include "dqn/error.hpp"
#include "dqn/run_config.hpp"
#include "dqn/svg.hpp"
#include "support.hpp"

using namespace dqn;

namespace {

std::string error_text(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

Checkpoint sample_checkpoint(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Checkpoint c;
    c.model = init_model(5, 3, seed, 0.9, 2.0);
    c.optimizer = OptimizerState::create(OptimizerKind::adam, {.learning_rate = 0.07}, c.model.parameter_count());
    std::normal_distribution<double> n;
    for (auto& v : c.optimizer.m) v = n(rng);
    for (auto& v : c.optimizer.v) v = std::abs(n(rng));
    c.optimizer.step = 17;
    c.epoch = 17;
    c.scaler = {Normalization::zscore, {0.1, -2.0, 3.5, 0, 1e-300}, {1.5, 0.25, 1, 1, 7e12}};
    c.dataset = "iris";
    return c;
}

}  // namespace

TEST_CASE("config documents") {
    const auto doc = parse_config_document("# comment\n dataset = iris  \n\nepochs=3 # trailing\n");
    CHECK(doc.size() == 2);
    CHECK(doc.at("dataset") == "iris");
    CHECK(doc.at("epochs") == "3");

    const auto msg = error_text([] { (void)parse_config_document("a = 1\nnonsense\na = 2\n", "x.cfg"); });
    CHECK(msg.find("x.cfg:2") != std::string::npos);
    CHECK(msg.find("x.cfg:3") != std::string::npos);

    auto d = doc;
    apply_override(d, "epochs=9");
    CHECK(d.at("epochs") == "9");
    CHECK_THROWS_AS(apply_override(d, "epochs"), ConfigError);
    CHECK_THROWS_AS(read_config_document("/nonexistent/run.cfg"), ConfigError);
}

TEST_CASE("run configuration validation lists every problem") {
    ConfigDocument doc{{"dataset", "iris"},      {"epochs", "0"},         {"learning_rate", "-1"},
                       {"backend", "quantum"},    {"colour", "blue"},      {"loss", "binary"},
                       {"noise.readout_eps0", "2"}};
    const auto msg = error_text([&] { (void)build_run_config(doc); });
    for (const char* needle : {"epochs", "learning_rate", "quantum", "colour", "binary", "readout_eps0"}) {
        CHECK_MESSAGE(msg.find(needle) != std::string::npos, needle);
    }
    CHECK(error_text([] { (void)build_run_config({{"dataset", "iris"}}); }).find("epochs") != std::string::npos);
}

TEST_CASE("preset configurations") {
    for (const char* name : {"iris", "wbc", "abalone"}) {
        const auto cfg = build_run_config(read_config_document(testing::config_dir() / (std::string(name) + ".cfg")));
        CHECK(cfg.dataset == name);
    }
    for (int digit = 0; digit < 10; ++digit) {
        const auto cfg =
            build_run_config(read_config_document(testing::config_dir() / ("mnist" + std::to_string(digit) + ".cfg")));
        CHECK(cfg.mnist_digit == static_cast<std::size_t>(digit));
        CHECK(cfg.epochs == 200);
        CHECK(cfg.is_binary());
    }
    const auto iris = build_run_config(read_config_document(testing::config_dir() / "iris.cfg"));
    CHECK(iris.epochs == 20);
    CHECK(iris.n_qubits(3) == 3);
    CHECK(iris.split_seed == iris.seed);
    CHECK(iris.stream_seed == iris.seed);
    const auto wbc = build_run_config(read_config_document(testing::config_dir() / "wbc.cfg"));
    CHECK(wbc.epochs == 200);
    CHECK(wbc.n_qubits(2) == 1);
    CHECK(build_run_config(read_config_document(testing::config_dir() / "abalone.cfg")).epochs == 12);
}

TEST_CASE("resolved documents round-trip") {
    auto doc = read_config_document(testing::config_dir() / "wbc.cfg");
    apply_override(doc, "backend=noisy");
    apply_override(doc, "noise.preset=nisq_low");
    apply_override(doc, "noise.depol_per_gate=0.0123");
    apply_override(doc, "learning_rate=0.1");
    apply_override(doc, "split_seed=99");
    const auto cfg = build_run_config(doc);
    CHECK(cfg.noise.depol_per_gate == 0.0123);
    CHECK(cfg.noise.amp_damp_gamma == noise_preset("nisq_low").amp_damp_gamma);
    CHECK(cfg.split_seed == 99);
    const auto text = format_document(to_document(cfg));
    const auto again = build_run_config(parse_config_document(text));
    CHECK(to_document(again) == to_document(cfg));
    CHECK(again.hyper == cfg.hyper);
    CHECK(again.noise == cfg.noise);
    for (const auto& [key, value] : to_document(cfg)) {
        CHECK(std::find(known_config_keys().begin(), known_config_keys().end(), key) != known_config_keys().end());
    }
}

TEST_CASE("prepared data follows the configuration") {
    auto doc = read_config_document(testing::config_dir() / "iris.cfg");
    doc["dataset_dir"] = testing::data_dir().string();
    const auto cfg = build_run_config(doc);
    const auto data = prepare_data(cfg);
    CHECK(data.train.size() == 120);
    CHECK(data.test.size() == 30);
    const auto again = prepare_data(cfg, data.scaler);
    CHECK(again.train.features == data.train.features);
    CHECK(again.test.features == data.test.features);
    CHECK_THROWS_AS(prepare_data(cfg, FeatureScaler::identity(3)), DataError);

    doc["dataset_dir"] = "/nonexistent";
    CHECK_THROWS_AS(prepare_data(build_run_config(doc)), DataError);
}

TEST_CASE("checkpoints round-trip bit-for-bit") {
    const auto c = sample_checkpoint(81);
    const auto bytes = serialize_checkpoint(c);
    const auto back = deserialize_checkpoint(bytes);
    CHECK(back == c);
    CHECK(serialize_checkpoint(back) == bytes);

    const auto header = std::string(bytes.begin(), bytes.begin() + 10);
    CHECK(header == "DQNCKPT 1\n");

    const auto dir = testing::scratch_dir("checkpoint");
    save_checkpoint(c, dir / "c.dqn");
    CHECK(load_checkpoint(dir / "c.dqn") == c);

    auto rms = c;
    rms.optimizer = OptimizerState::create(OptimizerKind::rmsprop, {}, c.model.parameter_count());
    CHECK(deserialize_checkpoint(serialize_checkpoint(rms)) == rms);

    SUBCASE("corruption is detected") {
        auto flipped = bytes;
        flipped[bytes.size() / 2] ^= 0x10;
        CHECK_THROWS_AS(deserialize_checkpoint(flipped), DataError);

        const std::vector<unsigned char> cut(bytes.begin(), bytes.end() - 9);
        CHECK_THROWS_AS(deserialize_checkpoint(cut), DataError);

        auto extra = bytes;
        extra.push_back(0);
        CHECK_THROWS_AS(deserialize_checkpoint(extra), DataError);

        auto version = bytes;
        version[8] = '2';
        CHECK_THROWS_AS(deserialize_checkpoint(version), DataError);

        CHECK_THROWS_AS(deserialize_checkpoint({'h', 'i'}), DataError);
        CHECK_THROWS_AS(load_checkpoint(dir / "missing.dqn"), DataError);
    }
}

TEST_CASE("bloch SVG") {
    const auto data = testing::random_dataset(30, 2, 2, 82);
    const auto rec = record_trajectory(init_model(2, 1, 83), data, 20);
    const auto svg = render_bloch_svg(rec, {"malignant", "benign <&>"});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("epoch 20") != std::string::npos);
    CHECK(svg.find("benign &lt;&amp;&gt;") != std::string::npos);
    // two sphere panels x (pre + post) per sample, plus the two sphere outlines
    std::size_t circles = 0;
    for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
    CHECK(circles == 2 + 4 * data.size());
    CHECK(render_bloch_svg(TrajectoryRecord{}, {}).find("</svg>") != std::string::npos);
}
