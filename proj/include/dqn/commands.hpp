#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dqn/checkpoint.hpp"
#include "dqn/noise.hpp"
#include "dqn/run_config.hpp"

namespace dqn {

inline constexpr const char* kArtifactName = "dressed-qnet";
inline constexpr const char* kArtifactVersion = "1.0.0";

/// Command-line values that override the configuration document.
struct ConfigOverrides {
    std::vector<std::string> assignments;  ///< --set key=value, applied first
    std::optional<std::filesystem::path> dataset_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend;
    std::optional<std::size_t> shots;
};

/// Reads the configuration file and applies overrides; throws ConfigError.
RunConfig resolve_config(const std::filesystem::path& config_path, const ConfigOverrides& overrides);

/// Evaluation backend for eval and noise-check: analytic unless `mode` is given;
/// noise parameters and the shot count come from the configuration.
ExecutionBackend evaluation_backend(const RunConfig& config, std::optional<BackendMode> mode);

// --- train -------------------------------------------------------------------------

struct TrainOutcome {
    TrainResult result;
    double test_accuracy = 0.0;  ///< analytic backend, config threshold
    std::filesystem::path metrics_csv;
    std::filesystem::path manifest;
    std::filesystem::path final_checkpoint;
    std::vector<std::filesystem::path> snapshots;
};

/// Trains and writes into out_dir:
///   metrics.csv            epoch,loss,train_accuracy (one row per epoch, deterministic)
///   timings.csv            epoch,wall_time_ms
///   checkpoint_epoch_E.dqn after epoch E for each configured snapshot epoch
///   checkpoint_final.dqn   last good model
///   config.cfg             fully resolved configuration
///   manifest.json          configuration, seeds, versions, timings, outcome
/// Rows and snapshots are flushed as training goes, so an aborted run keeps them.
TrainOutcome cmd_train(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

// --- eval --------------------------------------------------------------------------

enum class SplitChoice { train, test };
SplitChoice parse_split_choice(std::string_view s);

struct EvalReport {
    std::string split;
    std::size_t samples = 0;
    std::vector<double> thresholds;
    std::vector<double> accuracies;
    std::string backend;
};

/// Accuracy at each c_t; optionally writes per-sample probability vectors.
/// Writes eval_report.json and accuracy.csv into out_dir.
EvalReport cmd_eval(const RunConfig& config, const std::filesystem::path& checkpoint, SplitChoice split,
                    const std::vector<double>& thresholds, const ExecutionBackend& backend,
                    const std::filesystem::path& out_dir, bool dump_probabilities, std::ostream& log);

// --- bloch-export ------------------------------------------------------------------

struct BlochExport {
    std::filesystem::path trajectory_csv;
    std::vector<std::filesystem::path> svgs;
    std::vector<TrajectoryRecord> records;
};

/// Trajectory CSV columns: epoch,sample_id,label,stage,x_tilde,q1,q2,q3 with
/// stage in {encoded, pre_su2, post_su2}; encoded rows fill x_tilde only, the
/// others q1..q3 only. One SVG per checkpoint (bloch_epoch_E.svg).
/// Multi-qubit checkpoints are rejected with ConfigError.
BlochExport cmd_bloch_export(const RunConfig& config, const std::vector<std::filesystem::path>& checkpoints,
                             SplitChoice split, const std::filesystem::path& out_dir, std::ostream& log);

// --- noise-check -------------------------------------------------------------------

struct NoiseCheckOptions {
    ExecutionBackend reference = ExecutionBackend::analytic();
    ExecutionBackend candidate;
    double tau1 = 1e-3;
    std::string tau2 = "10%";                 ///< minimum compared samples: "N" or a percentage of the training set
    std::optional<std::size_t> sample_count;  ///< random training samples to compare (default: all)
    std::uint64_t sample_seed = 0;
};

struct NoiseCheckOutcome {
    EquivalenceReport report;
    std::size_t samples = 0;
    std::string message;  ///< human-readable verdict, states any tau2 shortfall
};

/// Minimum sample count from "N" or "P%" (percentage of `population`, rounded up).
std::size_t parse_sample_requirement(std::string_view text, std::size_t population);

/// Compares forward passes of the checkpoint under two backends; writes noise_report.json.
NoiseCheckOutcome cmd_noise_check(const RunConfig& config, const std::filesystem::path& checkpoint,
                                  const NoiseCheckOptions& options, const std::filesystem::path& out_dir,
                                  std::ostream& log);

/// Loads a checkpoint and checks that it fits the dataset (DataError otherwise).
Checkpoint load_matching_checkpoint(const std::filesystem::path& path, const Dataset& data);

}  // namespace dqn
