#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dqn/data.hpp"
#include "dqn/noise.hpp"
#include "dqn/optim.hpp"

namespace dqn {

/// Raw `key = value` pairs of a run configuration, in key order.
using ConfigDocument = std::map<std::string, std::string, std::less<>>;

/// Parses `key = value` lines; `#` starts a comment, blank lines are ignored.
/// Throws ConfigError listing every malformed or duplicated line.
ConfigDocument parse_config_document(std::string_view text, std::string_view origin = "<config>");
ConfigDocument read_config_document(const std::filesystem::path& path);

/// Applies a `key=value` override (as given to --set) on top of a document.
void apply_override(ConfigDocument& doc, std::string_view assignment);

/// Everything one training run depends on. Seeds:
///   seed        -> model initialisation
///   split_seed  -> train/test selection and MNIST balancing (defaults to seed)
///   stream_seed -> shot sampling during training (defaults to seed)
struct RunConfig {
    std::string dataset;  ///< iris | wbc | abalone | mnist
    std::filesystem::path dataset_dir = "data";
    std::string data_file;  ///< CSV file name inside dataset_dir (defaults to <dataset>.csv)

    // MNIST digit-vs-rest
    std::size_t mnist_digit = 0;
    std::optional<std::size_t> mnist_train_per_class;  ///< empty: every image of the digit
    std::optional<std::size_t> mnist_test_per_class;
    std::string mnist_train_images = "mnist/train-images-idx3-ubyte.gz";
    std::string mnist_train_labels = "mnist/train-labels-idx1-ubyte.gz";
    std::string mnist_test_images = "mnist/t10k-images-idx3-ubyte.gz";
    std::string mnist_test_labels = "mnist/t10k-labels-idx1-ubyte.gz";

    SplitSpec split;
    Normalization normalization = Normalization::minmax;

    LossKind loss = LossKind::cross_entropy;
    OptimizerKind optimizer = OptimizerKind::adam;
    OptimizerHyper hyper;
    std::size_t epochs = 1;
    double fd_step = 1e-3;
    double init_weight_scale = 0.5;
    double init_su2_scale = 0.5;

    BackendMode backend = BackendMode::analytic;
    std::size_t shots = kDefaultShots;
    std::string noise_preset = "ideal";
    NoiseModel noise;

    std::uint64_t seed = 0;
    std::uint64_t split_seed = 0;
    std::uint64_t stream_seed = 0;
    double threshold = kDefaultThreshold;
    std::vector<std::size_t> snapshot_epochs{1, 20, 200};

    bool is_binary() const { return loss == LossKind::binary; }
    /// One qubit for binary-loss runs, otherwise one per class.
    std::size_t n_qubits(std::size_t n_classes) const { return is_binary() ? 1 : n_classes; }

    ExecutionBackend execution_backend() const;
    TrainConfig train_config() const;
};

/// Builds and validates a RunConfig; throws ConfigError listing every problem at once.
RunConfig build_run_config(const ConfigDocument& doc);

/// The fully resolved document (defaults filled in). Feeding it back through
/// build_run_config reproduces the same configuration.
ConfigDocument to_document(const RunConfig& config);
std::string format_document(const ConfigDocument& doc);

/// Keys accepted in a configuration document.
const std::vector<std::string>& known_config_keys();

struct PreparedData {
    Dataset train;  ///< normalized
    Dataset test;   ///< normalized with the scaler fitted on train
    FeatureScaler scaler;
};

/// Loads, splits (or balances) and normalizes the configured dataset. With
/// `scaler` given (e.g. restored from a checkpoint) it is applied instead of
/// fitting a new one. Throws DataError when files are missing or malformed.
PreparedData prepare_data(const RunConfig& config, const std::optional<FeatureScaler>& scaler = std::nullopt);

}  // namespace dqn
