#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dqn/data.hpp"
#include "dqn/loss.hpp"
#include "dqn/network.hpp"

namespace dqn {

// --- Flat parameter view ---------------------------------------------------------

/// Layout: encoder weights row-major (N x d), then (alpha1, alpha2, alpha3) per qubit.
struct ParamLayout {
    std::size_t n_qubits = 0;
    std::size_t input_dim = 0;

    std::size_t size() const { return n_qubits * input_dim + 3 * n_qubits; }
    std::size_t alpha_offset() const { return n_qubits * input_dim; }
    bool is_weight(std::size_t index) const { return index < alpha_offset(); }

    friend bool operator==(const ParamLayout&, const ParamLayout&) = default;
};

struct FlatParams {
    ParamLayout layout;
    std::vector<double> values;
};

FlatParams flatten(const DressedModel& model);
DressedModel unflatten(const ParamLayout& layout, std::span<const double> values);
inline DressedModel unflatten(const FlatParams& p) { return unflatten(p.layout, p.values); }

// --- Optimizers ------------------------------------------------------------------

enum class OptimizerKind { adam, rmsprop };

std::string to_string(OptimizerKind k);
OptimizerKind parse_optimizer_kind(std::string_view s);

struct OptimizerHyper {
    double learning_rate = 0.01;
    double beta1 = 0.9;    ///< Adam first-moment decay
    double beta2 = 0.999;  ///< Adam second-moment decay
    double rho = 0.9;      ///< RMSprop accumulator decay
    double epsilon = 1e-8;

    friend bool operator==(const OptimizerHyper&, const OptimizerHyper&) = default;
};

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::adam;
    OptimizerHyper hyper;
    std::uint64_t step = 0;
    std::vector<double> m;  ///< Adam first moment (empty for RMSprop)
    std::vector<double> v;  ///< second moment / squared-gradient accumulator

    static OptimizerState create(OptimizerKind kind, const OptimizerHyper& hyper, std::size_t n_params);

    friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

/// Bias-corrected Adam update of theta in place.
void adam_step(OptimizerState& state, std::span<double> theta, std::span<const double> grad);

/// v <- rho v + (1 - rho) g^2;  theta <- theta - lr g / (sqrt(v) + eps)
void rmsprop_step(OptimizerState& state, std::span<double> theta, std::span<const double> grad);

/// Dispatches on state.kind.
void optimizer_step(OptimizerState& state, std::span<double> theta, std::span<const double> grad);

// --- Gradients ---------------------------------------------------------------------

using LossFunction = std::function<double(std::span<const double>)>;

/// Forward differences (f(theta + eps e_i) - f(theta)) / eps. Calls loss_fn
/// exactly size + 1 times. Throws RuntimeAbort naming the coordinate when a value is not finite.
std::vector<double> finite_diff_grad(const LossFunction& loss_fn, std::span<const double> theta, double eps);

/// Summed loss of a model over a dataset, with cheap single-coordinate
/// perturbations: moving weight (j, i) only shifts x~_j by eps * x_i, and moving
/// an angle only touches one qubit, so a perturbed evaluation reuses the cached
/// encodings of the base point instead of redoing every dot product.
class DatasetObjective {
public:
    DatasetObjective(const Dataset& data, ParamLayout layout, LossKind loss, ExecutionBackend backend);

    /// Stream epoch used by sampled backends; fixed for one gradient so that
    /// finite differences see common random numbers.
    void set_epoch(std::uint64_t epoch) { epoch_ = epoch; }

    /// Full evaluation at theta; becomes the base point for perturbed_delta.
    double value(std::span<const double> theta);

    /// f(base + eps e_index) - f(base), accumulated per sample.
    double perturbed_delta(std::size_t index, double eps);

    const std::vector<ProbabilityVector>& base_outputs() const { return outputs_; }
    std::size_t evaluations() const { return evaluations_; }

private:
    const Dataset& data_;
    ParamLayout layout_;
    LossKind loss_;
    ExecutionBackend backend_;
    std::uint64_t epoch_ = 0;
    std::size_t evaluations_ = 0;

    DressedModel base_;
    std::vector<double> x_tilde_;  // sample-major, n_qubits per sample
    std::vector<double> terms_;
    std::vector<ProbabilityVector> outputs_;

    double term_with(std::size_t sample, std::size_t qubit, double p_plus) const;
};

// --- Training ---------------------------------------------------------------------

struct TrainConfig {
    std::size_t epochs = 1;
    OptimizerKind optimizer = OptimizerKind::adam;
    OptimizerHyper hyper;
    double fd_step = 1e-3;
    ExecutionBackend backend;
    std::uint64_t seed = 0;  ///< stream seed for sampled backends (replaces backend.rng_seed)
    LossKind loss = LossKind::cross_entropy;
    double threshold = kDefaultThreshold;

    /// Throws ConfigError listing every problem found.
    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;        ///< 1-based
    double loss = 0.0;            ///< summed loss at the parameters this epoch's gradient was taken at
    double train_accuracy = 0.0;  ///< at those same parameters, threshold from TrainConfig
    double wall_time_ms = 0.0;
    std::vector<double> params;   ///< snapshot of those parameters
};

struct History {
    ParamLayout layout;
    std::vector<EpochRecord> epochs;
    double final_loss = 0.0;             ///< after the last update
    double final_train_accuracy = 0.0;   ///< after the last update
    std::size_t loss_evaluations = 0;    ///< (P + 1) per epoch, plus one final evaluation
};

struct TrainResult {
    DressedModel model;
    OptimizerState optimizer;
    History history;
    std::optional<std::string> abort_reason;  ///< set when a non-finite loss stopped training
};

/// Called after each update with the epoch record and the post-update model.
using EpochCallback = std::function<void(const EpochRecord&, const DressedModel&, const OptimizerState&)>;

/// Full-batch training: every epoch sums the loss over all samples, takes one
/// forward-difference gradient and one optimizer step.
TrainResult train(DressedModel model, const Dataset& data, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace dqn
