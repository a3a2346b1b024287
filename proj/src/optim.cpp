#include "dqn/optim.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dqn/error.hpp"

namespace dqn {

// --- Flat parameter view ---------------------------------------------------------

FlatParams flatten(const DressedModel& model) {
    FlatParams out{{model.n_qubits(), model.input_dim()}, {}};
    out.values.reserve(out.layout.size());
    const auto w = model.encoder.weights();
    out.values.assign(w.begin(), w.end());
    for (const auto& p : model.su2) {
        out.values.push_back(p.alpha1);
        out.values.push_back(p.alpha2);
        out.values.push_back(p.alpha3);
    }
    return out;
}

DressedModel unflatten(const ParamLayout& layout, std::span<const double> values) {
    if (values.size() != layout.size()) {
        throw std::invalid_argument("parameter vector has " + std::to_string(values.size()) + " entries, layout needs " +
                                    std::to_string(layout.size()));
    }
    const auto split = static_cast<std::ptrdiff_t>(layout.alpha_offset());
    DressedModel m{EncodingLayer(layout.n_qubits, layout.input_dim,
                                 std::vector<double>(values.begin(), values.begin() + split)),
                   {}};
    m.su2.resize(layout.n_qubits);
    for (std::size_t j = 0; j < layout.n_qubits; ++j) {
        const std::size_t k = layout.alpha_offset() + 3 * j;
        m.su2[j] = {values[k], values[k + 1], values[k + 2]};
    }
    return m;
}

// --- Optimizers ------------------------------------------------------------------

std::string to_string(OptimizerKind k) { return k == OptimizerKind::rmsprop ? "rmsprop" : "adam"; }

OptimizerKind parse_optimizer_kind(std::string_view s) {
    if (s == "adam") return OptimizerKind::adam;
    if (s == "rmsprop") return OptimizerKind::rmsprop;
    throw ConfigError("unknown optimizer '" + std::string(s) + "' (expected adam or rmsprop)");
}

OptimizerState OptimizerState::create(OptimizerKind kind, const OptimizerHyper& hyper, std::size_t n_params) {
    OptimizerState s{kind, hyper, 0, {}, std::vector<double>(n_params, 0.0)};
    if (kind == OptimizerKind::adam) s.m.assign(n_params, 0.0);
    return s;
}

namespace {

void check_shapes(const OptimizerState& s, std::span<double> theta, std::span<const double> grad) {
    if (theta.size() != grad.size() || s.v.size() != theta.size() ||
        (s.kind == OptimizerKind::adam && s.m.size() != theta.size())) {
        throw std::invalid_argument("optimizer state, parameters and gradient differ in size");
    }
}

}  // namespace

void adam_step(OptimizerState& state, std::span<double> theta, std::span<const double> grad) {
    if (state.kind != OptimizerKind::adam) throw std::invalid_argument("adam_step on a non-Adam state");
    check_shapes(state, theta, grad);
    const OptimizerHyper& h = state.hyper;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double m_corr = 1.0 - std::pow(h.beta1, t);
    const double v_corr = 1.0 - std::pow(h.beta2, t);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        state.m[i] = h.beta1 * state.m[i] + (1.0 - h.beta1) * grad[i];
        state.v[i] = h.beta2 * state.v[i] + (1.0 - h.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / m_corr;
        const double v_hat = state.v[i] / v_corr;
        theta[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
}

void rmsprop_step(OptimizerState& state, std::span<double> theta, std::span<const double> grad) {
    if (state.kind != OptimizerKind::rmsprop) throw std::invalid_argument("rmsprop_step on a non-RMSprop state");
    check_shapes(state, theta, grad);
    const OptimizerHyper& h = state.hyper;
    ++state.step;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        state.v[i] = h.rho * state.v[i] + (1.0 - h.rho) * grad[i] * grad[i];
        theta[i] -= h.learning_rate * grad[i] / (std::sqrt(state.v[i]) + h.epsilon);
    }
}

void optimizer_step(OptimizerState& state, std::span<double> theta, std::span<const double> grad) {
    if (state.kind == OptimizerKind::adam) {
        adam_step(state, theta, grad);
    } else {
        rmsprop_step(state, theta, grad);
    }
}

// --- Gradients ---------------------------------------------------------------------

std::vector<double> finite_diff_grad(const LossFunction& loss_fn, std::span<const double> theta, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("finite difference step must be positive");
    std::vector<double> point(theta.begin(), theta.end());
    const double f0 = loss_fn(point);
    if (!std::isfinite(f0)) throw RuntimeAbort("loss is not finite at the base point");
    std::vector<double> grad(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        point[i] = theta[i] + eps;
        const double fi = loss_fn(point);
        point[i] = theta[i];
        if (!std::isfinite(fi)) {
            throw RuntimeAbort("loss is not finite when perturbing coordinate " + std::to_string(i));
        }
        grad[i] = (fi - f0) / eps;
    }
    return grad;
}

DatasetObjective::DatasetObjective(const Dataset& data, ParamLayout layout, LossKind loss, ExecutionBackend backend)
    : data_(data), layout_(layout), loss_(loss), backend_(std::move(backend)),
      base_(DressedModel::zeros(layout.n_qubits, layout.input_dim)) {
    if (data.input_dim != layout.input_dim) {
        throw DataError("dataset has d=" + std::to_string(data.input_dim) + ", model expects d=" +
                        std::to_string(layout.input_dim));
    }
    if (loss == LossKind::binary && layout.n_qubits != 1) {
        throw ConfigError("binary loss needs a single-qubit model");
    }
    backend_.validate();
}

double DatasetObjective::value(std::span<const double> theta) {
    ++evaluations_;
    base_ = unflatten(layout_, theta);
    const std::size_t n = layout_.n_qubits;
    x_tilde_.assign(data_.size() * n, 0.0);
    terms_.assign(data_.size(), 0.0);
    outputs_.assign(data_.size(), ProbabilityVector{});
    double total = 0.0;
    for (std::size_t s = 0; s < data_.size(); ++s) {
        const auto x = data_.row(s);
        ProbabilityVector& p = outputs_[s];
        p.probs.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double xt = encode_one(base_.encoder, j, x);
            x_tilde_[s * n + j] = xt;
            p.probs[j] = qubit_prob_plus(xt, base_.su2[j], backend_, {epoch_, s}, j);
        }
        terms_[s] = sample_loss(loss_, p, data_.labels[s]);
        total += terms_[s];
    }
    return total;
}

double DatasetObjective::term_with(std::size_t sample, std::size_t qubit, double p_plus) const {
    const std::size_t label = data_.labels[sample];
    if (loss_ == LossKind::binary) return binary_loss_term(p_plus, label);
    std::vector<double> p = outputs_[sample].probs;
    p[qubit] = p_plus;
    return cross_entropy(p, label);
}

double DatasetObjective::perturbed_delta(std::size_t index, double eps) {
    if (index >= layout_.size()) throw std::out_of_range("parameter index out of range");
    if (outputs_.size() != data_.size()) throw std::logic_error("perturbed_delta before value()");
    ++evaluations_;
    const std::size_t n = layout_.n_qubits;
    double delta = 0.0;
    if (layout_.is_weight(index)) {
        const std::size_t j = index / layout_.input_dim;
        const std::size_t i = index % layout_.input_dim;
        for (std::size_t s = 0; s < data_.size(); ++s) {
            const double xi = data_.features[s * layout_.input_dim + i];
            if (xi == 0.0) continue;
            const double xt = x_tilde_[s * n + j] + eps * xi;
            const double p = qubit_prob_plus(xt, base_.su2[j], backend_, {epoch_, s}, j);
            delta += term_with(s, j, p) - terms_[s];
        }
    } else {
        const std::size_t k = index - layout_.alpha_offset();
        const std::size_t j = k / 3;
        Su2Params moved = base_.su2[j];
        double* angle[] = {&moved.alpha1, &moved.alpha2, &moved.alpha3};
        *angle[k % 3] += eps;
        for (std::size_t s = 0; s < data_.size(); ++s) {
            const double p = qubit_prob_plus(x_tilde_[s * n + j], moved, backend_, {epoch_, s}, j);
            delta += term_with(s, j, p) - terms_[s];
        }
    }
    return delta;
}

// --- Training ---------------------------------------------------------------------

void TrainConfig::validate() const {
    std::ostringstream problems;
    if (epochs < 1) problems << "\n  epochs must be >= 1";
    if (!(fd_step > 0.0)) problems << "\n  fd_step must be > 0";
    if (!(hyper.learning_rate >= 0.0)) problems << "\n  learning_rate must be >= 0";
    if (!(hyper.epsilon > 0.0)) problems << "\n  optimizer epsilon must be > 0";
    if (!(threshold >= 0.0 && threshold <= 1.0)) problems << "\n  threshold must lie in [0, 1]";
    try {
        backend.validate();
    } catch (const std::invalid_argument& e) {
        problems << "\n  backend: " << e.what();
    }
    if (!problems.str().empty()) throw ConfigError("invalid training configuration:" + problems.str());
}

TrainResult train(DressedModel model, const Dataset& data, const TrainConfig& config, const EpochCallback& on_epoch) {
    config.validate();
    model.validate();
    if (data.empty()) throw DataError("training set is empty");

    FlatParams theta = flatten(model);
    const std::size_t n_params = theta.layout.size();
    ExecutionBackend backend = config.backend;
    backend.rng_seed = config.seed;
    DatasetObjective objective(data, theta.layout, config.loss, backend);

    TrainResult result{model, OptimizerState::create(config.optimizer, config.hyper, n_params), {}, std::nullopt};
    result.history.layout = theta.layout;
    std::vector<double> grad(n_params);

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        objective.set_epoch(epoch);
        const double loss = objective.value(theta.values);
        if (!std::isfinite(loss)) {
            result.abort_reason = "loss is not finite at epoch " + std::to_string(epoch);
            break;
        }
        const double acc = accuracy_at(objective.base_outputs(), data.labels, config.threshold);
        bool finite = true;
        for (std::size_t i = 0; i < n_params; ++i) {
            grad[i] = objective.perturbed_delta(i, config.fd_step) / config.fd_step;
            if (!std::isfinite(grad[i])) {
                result.abort_reason = "loss is not finite when perturbing coordinate " + std::to_string(i) +
                                      " at epoch " + std::to_string(epoch);
                finite = false;
                break;
            }
        }
        if (!finite) break;

        EpochRecord rec{epoch, loss, acc, 0.0, theta.values};
        optimizer_step(result.optimizer, theta.values, grad);
        result.model = unflatten(theta);
        rec.wall_time_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (on_epoch) on_epoch(rec, result.model, result.optimizer);
        result.history.epochs.push_back(std::move(rec));
    }

    objective.set_epoch(result.history.epochs.size() + 1);
    result.history.final_loss = objective.value(theta.values);
    result.history.final_train_accuracy = accuracy_at(objective.base_outputs(), data.labels, config.threshold);
    result.history.loss_evaluations = objective.evaluations();
    return result;
}

}  // namespace dqn
