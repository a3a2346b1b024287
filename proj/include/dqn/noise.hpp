#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dqn/qstate.hpp"

namespace dqn {

/// NISQ-style error model for one qubit.
///
/// Application order in a noisy circuit run:
///   1. depolarizing(depol_per_gate) after every gate (H, Rz(x~), Rz(a3), Ry(a2), Rz(a1))
///   2. amplitude damping then phase damping, once, before measurement
///   3. readout flips on the sigma_z = +1 probability
struct NoiseModel {
    double depol_per_gate = 0.0;
    double amp_damp_gamma = 0.0;
    double phase_damp_lambda = 0.0;
    double readout_eps0 = 0.0;  ///< P(read +1 | true -1)
    double readout_eps1 = 0.0;  ///< P(read -1 | true +1)

    /// Throws std::invalid_argument if any rate lies outside [0, 1].
    void validate() const;
    bool is_ideal() const;

    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// Named presets: "ideal", "nisq_low", "nisq_high", "heavy".
NoiseModel noise_preset(std::string_view name);
std::vector<std::string> noise_preset_names();

DensityMatrix apply_depolarizing(const DensityMatrix& rho, double p);
DensityMatrix apply_amplitude_damping(const DensityMatrix& rho, double gamma);
DensityMatrix apply_phase_damping(const DensityMatrix& rho, double lambda);
double apply_readout_error(double p_plus, double eps0, double eps1);

/// Density matrix after the full noisy circuit (steps 1 and 2 above; no readout).
DensityMatrix noisy_circuit_state(double x_tilde, const Su2Params& p, const NoiseModel& noise);

/// P(read +1) after the noisy circuit including readout error.
double noisy_prob_plus(double x_tilde, const Su2Params& p, const NoiseModel& noise);

/// Hellinger distance (1/sqrt 2) * || sqrt(p) - sqrt(q) ||_2 between two discrete distributions.
/// Throws std::invalid_argument on mismatched support or inputs that do not sum to 1 within 1e-9.
double hellinger(std::span<const double> p, std::span<const double> q);

struct EquivalenceReport {
    std::vector<double> distances;  ///< per compared sample
    double tau1 = 0.0;
    std::size_t tau2 = 0;
    bool pass = false;

    double max_distance() const;
};

/// Compares per-sample sigma_z = +1 probabilities from two platforms through the
/// Hellinger distance of the two-outcome distributions (P+, 1 - P+).
/// pass = every distance < tau1 and at least tau2 samples were compared.
EquivalenceReport equivalence_check(std::span<const double> p_plus_a, std::span<const double> p_plus_b, double tau1,
                                    std::size_t tau2);

}  // namespace dqn
