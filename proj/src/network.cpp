#include "dqn/network.hpp"

#include <random>
#include <stdexcept>

#include "dqn/error.hpp"
#include "dqn/rng.hpp"

namespace dqn {

void DressedModel::validate() const {
    if (su2.size() != encoder.n_classes()) {
        throw std::invalid_argument("model has " + std::to_string(su2.size()) + " SU(2) blocks for " +
                                    std::to_string(encoder.n_classes()) + " encoder rows");
    }
}

DressedModel DressedModel::zeros(std::size_t n_qubits, std::size_t input_dim) {
    return {EncodingLayer(n_qubits, input_dim), std::vector<Su2Params>(n_qubits)};
}

DressedModel init_model(std::size_t input_dim, std::size_t n_qubits, std::uint64_t seed, double weight_scale,
                        double su2_scale) {
    DressedModel m{init_weights(input_dim, n_qubits, derive_seed(seed, 1), weight_scale), {}};
    std::mt19937_64 rng(derive_seed(seed, 2));
    std::uniform_real_distribution<double> dist(-su2_scale, su2_scale);
    m.su2.resize(n_qubits);
    for (auto& p : m.su2) {
        p.alpha1 = dist(rng);
        p.alpha2 = dist(rng);
        p.alpha3 = dist(rng);
    }
    return m;
}

std::string to_string(BackendMode m) {
    switch (m) {
        case BackendMode::analytic: return "analytic";
        case BackendMode::statevector: return "statevector";
        case BackendMode::shots: return "shots";
        case BackendMode::noisy: return "noisy";
    }
    return "analytic";
}

BackendMode parse_backend_mode(std::string_view s) {
    if (s == "analytic") return BackendMode::analytic;
    if (s == "statevector") return BackendMode::statevector;
    if (s == "shots") return BackendMode::shots;
    if (s == "noisy") return BackendMode::noisy;
    throw ConfigError("unknown backend '" + std::string(s) + "' (expected analytic, statevector, shots or noisy)");
}

void ExecutionBackend::validate() const {
    if (is_sampled() && shots == 0) throw std::invalid_argument("sampled backends need shots >= 1");
    if ((mode == BackendMode::noisy) != noise.has_value()) {
        throw std::invalid_argument("a noise model must be given exactly when the backend is noisy");
    }
    if (noise) noise->validate();
}

namespace {

double sample_frequency(double p, std::size_t shots, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::binomial_distribution<std::size_t> dist(shots, p);
    return static_cast<double>(dist(rng)) / static_cast<double>(shots);
}

}  // namespace

double qubit_prob_plus(double x_tilde, const Su2Params& p, const ExecutionBackend& backend, StreamKey key,
                       std::size_t qubit) {
    switch (backend.mode) {
        case BackendMode::analytic:
            return prob_plus(bloch_closed_form(x_tilde, p));
        case BackendMode::statevector:
            return prob_plus(bloch_of_state(apply_su2(prepare_qubit(x_tilde), p)));
        case BackendMode::shots:
            return sample_frequency(prob_plus(bloch_closed_form(x_tilde, p)), backend.shots,
                                    stream_seed(backend.rng_seed, key.epoch, key.sample, qubit));
        case BackendMode::noisy:
            return sample_frequency(noisy_prob_plus(x_tilde, p, *backend.noise), backend.shots,
                                    stream_seed(backend.rng_seed, key.epoch, key.sample, qubit));
    }
    return 0.0;
}

ProbabilityVector forward(const DressedModel& model, std::span<const double> x, const ExecutionBackend& backend,
                          StreamKey key) {
    if (x.size() != model.input_dim()) {
        throw DataError("input dimension mismatch: encoder expects d=" + std::to_string(model.input_dim()) +
                        ", got d=" + std::to_string(x.size()));
    }
    ProbabilityVector out;
    out.probs.resize(model.n_qubits());
    for (std::size_t j = 0; j < model.n_qubits(); ++j) {
        out.probs[j] = qubit_prob_plus(encode_one(model.encoder, j, x), model.su2[j], backend, key, j);
    }
    return out;
}

double forward_binary(const DressedModel& model, std::span<const double> x, const ExecutionBackend& backend,
                      StreamKey key) {
    if (model.n_qubits() != 1) {
        throw std::invalid_argument("forward_binary needs a single-qubit model, got N=" +
                                    std::to_string(model.n_qubits()));
    }
    return forward(model, x, backend, key)[0];
}

std::vector<ProbabilityVector> forward_all(const DressedModel& model, const Dataset& data,
                                           const ExecutionBackend& backend, std::uint64_t epoch) {
    std::vector<ProbabilityVector> out;
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out.push_back(forward(model, data.row(i), backend, {epoch, i}));
    return out;
}

TrajectoryRecord record_trajectory(const DressedModel& model, const Dataset& data, std::size_t epoch) {
    if (model.n_qubits() != 1) {
        throw std::invalid_argument(
            "Bloch trajectories are defined for single-qubit (binary) models only; this model has " +
            std::to_string(model.n_qubits()) + " qubits");
    }
    TrajectoryRecord rec;
    rec.epoch = epoch;
    rec.points.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double xt = encode(model.encoder, data.row(i))[0];
        const QubitState pre = prepare_qubit(xt);
        const QubitState post = apply_su2(pre, model.su2[0]);
        rec.points.push_back({data.ids[i], data.labels[i], xt, bloch_of_state(pre), bloch_of_state(post)});
    }
    return rec;
}

}  // namespace dqn
