#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dqn/data.hpp"
#include "dqn/encoder.hpp"
#include "dqn/noise.hpp"
#include "dqn/qstate.hpp"

namespace dqn {

/// Linear encoder feeding one independent single-qubit circuit per class.
/// The joint state is always a product state, so each qubit is simulated on its own.
struct DressedModel {
    EncodingLayer encoder;
    std::vector<Su2Params> su2;

    std::size_t n_qubits() const { return su2.size(); }
    std::size_t input_dim() const { return encoder.input_dim(); }
    /// N*d + 3N
    std::size_t parameter_count() const { return encoder.weights().size() + 3 * su2.size(); }

    /// Throws std::invalid_argument when su2 does not have one entry per encoder row.
    void validate() const;

    static DressedModel zeros(std::size_t n_qubits, std::size_t input_dim);

    friend bool operator==(const DressedModel&, const DressedModel&) = default;
};

/// Weights ~ U[-weight_scale, weight_scale], angles ~ U[-su2_scale, su2_scale].
DressedModel init_model(std::size_t input_dim, std::size_t n_qubits, std::uint64_t seed, double weight_scale = 0.5,
                        double su2_scale = 0.5);

/// Per-qubit sigma_z = +1 probabilities. Not a distribution: entries need not sum to 1.
struct ProbabilityVector {
    std::vector<double> probs;

    std::size_t size() const { return probs.size(); }
    double operator[](std::size_t i) const { return probs[i]; }
};

enum class BackendMode { analytic, statevector, shots, noisy };

std::string to_string(BackendMode m);
BackendMode parse_backend_mode(std::string_view s);

inline constexpr std::size_t kDefaultShots = 1024;

struct ExecutionBackend {
    BackendMode mode = BackendMode::analytic;
    std::size_t shots = kDefaultShots;
    std::optional<NoiseModel> noise;
    std::uint64_t rng_seed = 0;

    static ExecutionBackend analytic() { return {}; }
    static ExecutionBackend statevector() { return {BackendMode::statevector, kDefaultShots, std::nullopt, 0}; }
    static ExecutionBackend sampled(std::size_t shots, std::uint64_t seed) {
        return {BackendMode::shots, shots, std::nullopt, seed};
    }
    static ExecutionBackend noisy(const NoiseModel& noise, std::size_t shots, std::uint64_t seed) {
        return {BackendMode::noisy, shots, noise, seed};
    }

    bool is_sampled() const { return mode == BackendMode::shots || mode == BackendMode::noisy; }

    /// Throws std::invalid_argument: shots must be >= 1 for sampled modes, noise present iff noisy.
    void validate() const;
};

/// Identifies the random stream used by sampled backends for one forward pass.
struct StreamKey {
    std::uint64_t epoch = 0;
    std::uint64_t sample = 0;
};

/// P+ of one qubit given its encoded input. Sampled backends draw from the
/// stream (backend.rng_seed, key.epoch, key.sample, qubit).
double qubit_prob_plus(double x_tilde, const Su2Params& p, const ExecutionBackend& backend, StreamKey key,
                       std::size_t qubit);

ProbabilityVector forward(const DressedModel& model, std::span<const double> x, const ExecutionBackend& backend,
                          StreamKey key = {});

/// Scalar P+ for a single-qubit model. Throws std::invalid_argument if N != 1.
double forward_binary(const DressedModel& model, std::span<const double> x, const ExecutionBackend& backend,
                      StreamKey key = {});

/// Forward pass over a whole dataset; sample i uses stream key {epoch, i}.
std::vector<ProbabilityVector> forward_all(const DressedModel& model, const Dataset& data,
                                           const ExecutionBackend& backend, std::uint64_t epoch = 0);

struct TrajectoryPoint {
    std::size_t sample_id = 0;
    std::size_t label = 0;
    double x_tilde = 0.0;
    BlochVector pre_su2;
    BlochVector post_su2;
};

struct TrajectoryRecord {
    std::size_t epoch = 0;
    std::vector<TrajectoryPoint> points;
};

/// Bloch-sphere positions of every sample before and after the SU(2) layer of a
/// single-qubit model. Throws std::invalid_argument for N != 1.
TrajectoryRecord record_trajectory(const DressedModel& model, const Dataset& data, std::size_t epoch);

}  // namespace dqn
