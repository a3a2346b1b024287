#include "dqn/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dqn/error.hpp"
#include "dqn/rng.hpp"

namespace dqn {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string join_errors(const std::string& title, const std::vector<std::string>& errors) {
    std::string msg = title;
    for (const auto& e : errors) msg += "\n  " + e;
    return msg;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename T>
std::string format_list(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

// Typed lookups that append to an error list instead of throwing, so that one
// pass over a document reports every problem.
class Reader {
public:
    Reader(const ConfigDocument& doc, std::vector<std::string>& errors) : doc_(doc), errors_(errors) {}

    std::optional<std::string> text(std::string_view key) const {
        const auto it = doc_.find(key);
        if (it == doc_.end()) return std::nullopt;
        return it->second;
    }

    template <typename T>
    void number(std::string_view key, T& out) const {
        if (auto v = text(key)) {
            if (auto parsed = parse<T>(key, *v)) out = *parsed;
        }
    }

    template <typename T>
    void optional_number(std::string_view key, std::optional<T>& out) const {
        if (auto v = text(key)) {
            if (v->empty()) {
                out.reset();
            } else if (auto parsed = parse<T>(key, *v)) {
                out = *parsed;
            }
        }
    }

    void list(std::string_view key, std::vector<std::size_t>& out) const {
        const auto v = text(key);
        if (!v) return;
        out.clear();
        std::string_view rest = *v;
        while (!trim(rest).empty()) {
            const auto comma = rest.find(',');
            const auto item = trim(rest.substr(0, comma));
            if (auto parsed = parse<std::size_t>(key, item)) out.push_back(*parsed);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }

    template <typename Enum, typename Parser>
    void choice(std::string_view key, Enum& out, Parser parse_fn) const {
        if (auto v = text(key)) {
            try {
                out = parse_fn(*v);
            } catch (const ConfigError& e) {
                errors_.push_back(std::string(key) + ": " + e.what());
            }
        }
    }

private:
    template <typename T>
    std::optional<T> parse(std::string_view key, std::string_view v) const {
        T value{};
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
        if (ec != std::errc() || ptr != v.data() + v.size()) {
            errors_.push_back(std::string(key) + ": cannot parse '" + std::string(v) + "' as " +
                              (std::is_floating_point_v<T> ? "a number" : "a non-negative integer"));
            return std::nullopt;
        }
        return value;
    }

    const ConfigDocument& doc_;
    std::vector<std::string>& errors_;
};

std::size_t dataset_classes(std::string_view dataset) {
    if (dataset == "iris") return 3;
    if (dataset == "abalone") return kAbaloneClasses;
    return 2;  // wbc, mnist digit-vs-rest
}

}  // namespace

// --- Documents ---------------------------------------------------------------------

ConfigDocument parse_config_document(std::string_view text, std::string_view origin) {
    ConfigDocument doc;
    std::vector<std::string> errors;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = std::string(origin) + ":" + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            errors.push_back(where + ": expected 'key = value', got '" + std::string(line) + "'");
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) {
            errors.push_back(where + ": missing key before '='");
            continue;
        }
        if (!doc.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
            errors.push_back(where + ": key '" + key + "' given twice");
        }
    }
    if (!errors.empty()) throw ConfigError(join_errors("malformed configuration:", errors));
    return doc;
}

ConfigDocument read_config_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_document(ss.str(), path.string());
}

void apply_override(ConfigDocument& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    const auto key = eq == std::string_view::npos ? std::string_view{} : trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
    doc[std::string(key)] = std::string(trim(assignment.substr(eq + 1)));
}

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys{
        "dataset",          "dataset_dir",        "data_file",          "mnist.digit",
        "mnist.train_per_class", "mnist.test_per_class", "mnist.train_images", "mnist.train_labels",
        "mnist.test_images", "mnist.test_labels", "split.strategy",     "split.train_per_class",
        "split.test_per_class", "split.train_fraction", "split.train_count", "split_seed",
        "normalization",    "loss",               "optimizer",          "learning_rate",
        "adam.beta1",       "adam.beta2",         "rmsprop.rho",        "optimizer_epsilon",
        "epochs",           "fd_step",            "init.weight_scale",  "init.su2_scale",
        "backend",          "shots",              "noise.preset",       "noise.depol_per_gate",
        "noise.amp_damp_gamma", "noise.phase_damp_lambda", "noise.readout_eps0", "noise.readout_eps1",
        "seed",             "stream_seed",        "threshold",          "snapshot_epochs",
    };
    return keys;
}

// --- Typed configuration -----------------------------------------------------------

ExecutionBackend RunConfig::execution_backend() const {
    switch (backend) {
        case BackendMode::analytic: return ExecutionBackend::analytic();
        case BackendMode::statevector: return ExecutionBackend::statevector();
        case BackendMode::shots: return ExecutionBackend::sampled(shots, stream_seed);
        case BackendMode::noisy: return ExecutionBackend::noisy(noise, shots, stream_seed);
    }
    return ExecutionBackend::analytic();
}

TrainConfig RunConfig::train_config() const {
    TrainConfig c;
    c.epochs = epochs;
    c.optimizer = optimizer;
    c.hyper = hyper;
    c.fd_step = fd_step;
    c.backend = execution_backend();
    c.seed = stream_seed;
    c.loss = loss;
    c.threshold = threshold;
    return c;
}

RunConfig build_run_config(const ConfigDocument& doc) {
    std::vector<std::string> errors;
    const auto& known = known_config_keys();
    for (const auto& [key, value] : doc) {
        if (std::find(known.begin(), known.end(), key) == known.end()) errors.push_back("unknown key '" + key + "'");
    }

    const Reader r(doc, errors);
    RunConfig c;

    c.dataset = r.text("dataset").value_or("");
    if (c.dataset.empty()) {
        errors.push_back("dataset: required (iris, wbc, abalone or mnist)");
    } else if (c.dataset != "iris" && c.dataset != "wbc" && c.dataset != "abalone" && c.dataset != "mnist") {
        errors.push_back("dataset: unknown dataset '" + c.dataset + "' (expected iris, wbc, abalone or mnist)");
    }
    if (auto v = r.text("dataset_dir")) c.dataset_dir = *v;
    c.data_file = r.text("data_file").value_or(c.dataset + ".csv");

    r.number("mnist.digit", c.mnist_digit);
    r.optional_number("mnist.train_per_class", c.mnist_train_per_class);
    r.optional_number("mnist.test_per_class", c.mnist_test_per_class);
    if (auto v = r.text("mnist.train_images")) c.mnist_train_images = *v;
    if (auto v = r.text("mnist.train_labels")) c.mnist_train_labels = *v;
    if (auto v = r.text("mnist.test_images")) c.mnist_test_images = *v;
    if (auto v = r.text("mnist.test_labels")) c.mnist_test_labels = *v;

    if (auto v = r.text("split.strategy")) {
        if (*v == "per_class") {
            c.split.strategy = SplitSpec::Strategy::per_class_counts;
        } else if (*v == "fraction") {
            c.split.strategy = SplitSpec::Strategy::fraction_random;
        } else {
            errors.push_back("split.strategy: unknown strategy '" + *v + "' (expected per_class or fraction)");
        }
    }
    r.list("split.train_per_class", c.split.train_per_class);
    r.list("split.test_per_class", c.split.test_per_class);
    r.number("split.train_fraction", c.split.train_fraction);
    r.optional_number("split.train_count", c.split.train_count);

    r.choice("normalization", c.normalization, parse_normalization);
    r.choice("loss", c.loss, parse_loss_kind);
    r.choice("optimizer", c.optimizer, parse_optimizer_kind);
    r.number("learning_rate", c.hyper.learning_rate);
    r.number("adam.beta1", c.hyper.beta1);
    r.number("adam.beta2", c.hyper.beta2);
    r.number("rmsprop.rho", c.hyper.rho);
    r.number("optimizer_epsilon", c.hyper.epsilon);
    if (!r.text("epochs")) errors.push_back("epochs: required");
    r.number("epochs", c.epochs);
    r.number("fd_step", c.fd_step);
    r.number("init.weight_scale", c.init_weight_scale);
    r.number("init.su2_scale", c.init_su2_scale);

    r.choice("backend", c.backend, parse_backend_mode);
    r.number("shots", c.shots);
    if (auto v = r.text("noise.preset")) {
        try {
            c.noise = noise_preset(*v);
            c.noise_preset = *v;
        } catch (const ConfigError& e) {
            errors.push_back(std::string("noise.preset: ") + e.what());
        }
    }
    r.number("noise.depol_per_gate", c.noise.depol_per_gate);
    r.number("noise.amp_damp_gamma", c.noise.amp_damp_gamma);
    r.number("noise.phase_damp_lambda", c.noise.phase_damp_lambda);
    r.number("noise.readout_eps0", c.noise.readout_eps0);
    r.number("noise.readout_eps1", c.noise.readout_eps1);

    r.number("seed", c.seed);
    c.split_seed = c.seed;
    c.stream_seed = c.seed;
    r.number("split_seed", c.split_seed);
    r.number("stream_seed", c.stream_seed);
    c.split.seed = c.split_seed;
    r.number("threshold", c.threshold);
    r.list("snapshot_epochs", c.snapshot_epochs);

    // Semantic checks.
    if (c.epochs < 1) errors.push_back("epochs: must be >= 1");
    if (!(c.fd_step > 0.0)) errors.push_back("fd_step: must be > 0");
    if (!(c.hyper.learning_rate >= 0.0)) errors.push_back("learning_rate: must be >= 0");
    if (!(c.hyper.beta1 >= 0.0 && c.hyper.beta1 < 1.0)) errors.push_back("adam.beta1: must lie in [0, 1)");
    if (!(c.hyper.beta2 >= 0.0 && c.hyper.beta2 < 1.0)) errors.push_back("adam.beta2: must lie in [0, 1)");
    if (!(c.hyper.rho >= 0.0 && c.hyper.rho < 1.0)) errors.push_back("rmsprop.rho: must lie in [0, 1)");
    if (!(c.hyper.epsilon > 0.0)) errors.push_back("optimizer_epsilon: must be > 0");
    if (!(c.init_weight_scale >= 0.0)) errors.push_back("init.weight_scale: must be >= 0");
    if (!(c.init_su2_scale >= 0.0)) errors.push_back("init.su2_scale: must be >= 0");
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) errors.push_back("threshold: must lie in [0, 1]");
    if (c.mnist_digit > 9) errors.push_back("mnist.digit: must be 0..9");
    if (c.split.strategy == SplitSpec::Strategy::per_class_counts && c.split.train_per_class.empty()) {
        errors.push_back("split.train_per_class: required for the per_class strategy");
    }
    if (!(c.split.train_fraction > 0.0 && c.split.train_fraction < 1.0)) {
        errors.push_back("split.train_fraction: must lie in (0, 1)");
    }
    if ((c.backend == BackendMode::shots || c.backend == BackendMode::noisy) && c.shots == 0) {
        errors.push_back("shots: must be >= 1 for sampled backends");
    }
    try {
        c.noise.validate();
    } catch (const std::invalid_argument& e) {
        errors.push_back(std::string("noise: ") + e.what());
    }
    if (c.loss == LossKind::binary && !c.dataset.empty() && dataset_classes(c.dataset) != 2) {
        errors.push_back("loss: binary loss needs a two-class dataset, '" + c.dataset + "' has " +
                         std::to_string(dataset_classes(c.dataset)) + " classes");
    }

    if (!errors.empty()) throw ConfigError(join_errors("invalid configuration:", errors));
    return c;
}

ConfigDocument to_document(const RunConfig& c) {
    ConfigDocument d;
    d["dataset"] = c.dataset;
    d["dataset_dir"] = c.dataset_dir.string();
    d["data_file"] = c.data_file;
    d["mnist.digit"] = std::to_string(c.mnist_digit);
    d["mnist.train_per_class"] = c.mnist_train_per_class ? std::to_string(*c.mnist_train_per_class) : "";
    d["mnist.test_per_class"] = c.mnist_test_per_class ? std::to_string(*c.mnist_test_per_class) : "";
    d["mnist.train_images"] = c.mnist_train_images;
    d["mnist.train_labels"] = c.mnist_train_labels;
    d["mnist.test_images"] = c.mnist_test_images;
    d["mnist.test_labels"] = c.mnist_test_labels;
    d["split.strategy"] = c.split.strategy == SplitSpec::Strategy::per_class_counts ? "per_class" : "fraction";
    d["split.train_per_class"] = format_list(c.split.train_per_class);
    d["split.test_per_class"] = format_list(c.split.test_per_class);
    d["split.train_fraction"] = format_double(c.split.train_fraction);
    d["split.train_count"] = c.split.train_count ? std::to_string(*c.split.train_count) : "";
    d["split_seed"] = std::to_string(c.split_seed);
    d["normalization"] = to_string(c.normalization);
    d["loss"] = to_string(c.loss);
    d["optimizer"] = to_string(c.optimizer);
    d["learning_rate"] = format_double(c.hyper.learning_rate);
    d["adam.beta1"] = format_double(c.hyper.beta1);
    d["adam.beta2"] = format_double(c.hyper.beta2);
    d["rmsprop.rho"] = format_double(c.hyper.rho);
    d["optimizer_epsilon"] = format_double(c.hyper.epsilon);
    d["epochs"] = std::to_string(c.epochs);
    d["fd_step"] = format_double(c.fd_step);
    d["init.weight_scale"] = format_double(c.init_weight_scale);
    d["init.su2_scale"] = format_double(c.init_su2_scale);
    d["backend"] = to_string(c.backend);
    d["shots"] = std::to_string(c.shots);
    d["noise.preset"] = c.noise_preset;
    d["noise.depol_per_gate"] = format_double(c.noise.depol_per_gate);
    d["noise.amp_damp_gamma"] = format_double(c.noise.amp_damp_gamma);
    d["noise.phase_damp_lambda"] = format_double(c.noise.phase_damp_lambda);
    d["noise.readout_eps0"] = format_double(c.noise.readout_eps0);
    d["noise.readout_eps1"] = format_double(c.noise.readout_eps1);
    d["seed"] = std::to_string(c.seed);
    d["stream_seed"] = std::to_string(c.stream_seed);
    d["threshold"] = format_double(c.threshold);
    d["snapshot_epochs"] = format_list(c.snapshot_epochs);
    return d;
}

std::string format_document(const ConfigDocument& doc) {
    std::string out;
    for (const auto& [key, value] : doc) out += key + " = " + value + "\n";
    return out;
}

// --- Data pipeline -----------------------------------------------------------------

PreparedData prepare_data(const RunConfig& c, const std::optional<FeatureScaler>& scaler) {
    Dataset train;
    Dataset test;
    if (c.dataset == "mnist") {
        const auto& dir = c.dataset_dir;
        const Dataset full_train = load_idx(dir / c.mnist_train_images, dir / c.mnist_train_labels, "mnist-train");
        const Dataset full_test = load_idx(dir / c.mnist_test_images, dir / c.mnist_test_labels, "mnist-test");
        train = balance_binary_mnist(full_train, c.mnist_digit, derive_seed(c.split_seed, 10), c.mnist_train_per_class);
        test = balance_binary_mnist(full_test, c.mnist_digit, derive_seed(c.split_seed, 11), c.mnist_test_per_class);
    } else {
        const Dataset all = load_csv(c.dataset_dir / c.data_file, schema_for(c.dataset));
        std::tie(train, test) = split(all, c.split);
    }
    PreparedData out{std::move(train), std::move(test), {}};
    out.scaler = scaler ? *scaler : FeatureScaler::fit(out.train, c.normalization);
    if (out.scaler.offset.size() != out.train.input_dim) {
        throw DataError("feature scaler covers " + std::to_string(out.scaler.offset.size()) +
                        " features, dataset has d=" + std::to_string(out.train.input_dim));
    }
    out.scaler.apply(out.train);
    out.scaler.apply(out.test);
    return out;
}

}  // namespace dqn
