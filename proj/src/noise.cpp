#include "dqn/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dqn/error.hpp"

namespace dqn {

namespace {

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void NoiseModel::validate() const {
    check_unit(depol_per_gate, "depol_per_gate");
    check_unit(amp_damp_gamma, "amp_damp_gamma");
    check_unit(phase_damp_lambda, "phase_damp_lambda");
    check_unit(readout_eps0, "readout_eps0");
    check_unit(readout_eps1, "readout_eps1");
}

bool NoiseModel::is_ideal() const { return *this == NoiseModel{}; }

NoiseModel noise_preset(std::string_view name) {
    // Single-qubit gate errors bracket the 0.038%..0.412% range reported for
    // superconducting U2 gates; damping and readout are typical NISQ magnitudes.
    if (name == "ideal") return {};
    if (name == "nisq_low") return {0.00038, 0.001, 0.002, 0.01, 0.01};
    if (name == "nisq_high") return {0.00412, 0.01, 0.02, 0.03, 0.05};
    if (name == "heavy") return {0.2, 0.0, 0.0, 0.0, 0.0};
    throw ConfigError("unknown noise preset '" + std::string(name) + "'");
}

std::vector<std::string> noise_preset_names() { return {"ideal", "nisq_low", "nisq_high", "heavy"}; }

DensityMatrix apply_depolarizing(const DensityMatrix& rho, double p) {
    const Mat2& m = rho.entries();
    const Complex half_p{0.5 * p, 0.0};
    return DensityMatrix(Mat2{(1.0 - p) * m[0] + half_p, (1.0 - p) * m[1], (1.0 - p) * m[2], (1.0 - p) * m[3] + half_p});
}

DensityMatrix apply_amplitude_damping(const DensityMatrix& rho, double gamma) {
    // K0 = diag(1, sqrt(1-g)), K1 = sqrt(g) |0><1|
    const Mat2& m = rho.entries();
    const double s = std::sqrt(1.0 - gamma);
    return DensityMatrix(Mat2{m[0] + gamma * m[3], s * m[1], s * m[2], (1.0 - gamma) * m[3]});
}

DensityMatrix apply_phase_damping(const DensityMatrix& rho, double lambda) {
    const Mat2& m = rho.entries();
    const double s = std::sqrt(1.0 - lambda);
    return DensityMatrix(Mat2{m[0], s * m[1], s * m[2], m[3]});
}

double apply_readout_error(double p_plus, double eps0, double eps1) {
    return std::clamp(p_plus * (1.0 - eps1) + (1.0 - p_plus) * eps0, 0.0, 1.0);
}

DensityMatrix noisy_circuit_state(double x_tilde, const Su2Params& p, const NoiseModel& noise) {
    DensityMatrix rho;  // |0><0|
    const Mat2 circuit[] = {gates::hadamard(), gates::rz(x_tilde), gates::rz(p.alpha3), gates::ry(p.alpha2),
                            gates::rz(p.alpha1)};
    for (const Mat2& g : circuit) {
        rho = apply_depolarizing(rho.conjugated_by(g), noise.depol_per_gate);
    }
    rho = apply_amplitude_damping(rho, noise.amp_damp_gamma);
    return apply_phase_damping(rho, noise.phase_damp_lambda);
}

double noisy_prob_plus(double x_tilde, const Su2Params& p, const NoiseModel& noise) {
    const DensityMatrix rho = noisy_circuit_state(x_tilde, p, noise);
    const double p_plus = std::clamp(rho(0, 0).real(), 0.0, 1.0);
    return apply_readout_error(p_plus, noise.readout_eps0, noise.readout_eps1);
}

double hellinger(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size() || p.empty()) {
        throw std::invalid_argument("hellinger: distributions must share a non-empty support (sizes " +
                                    std::to_string(p.size()) + " and " + std::to_string(q.size()) + ")");
    }
    const double sp = std::accumulate(p.begin(), p.end(), 0.0);
    const double sq = std::accumulate(q.begin(), q.end(), 0.0);
    if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9) {
        throw std::invalid_argument("hellinger: inputs must each sum to 1");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0 || q[i] < 0.0) throw std::invalid_argument("hellinger: negative probability");
        const double diff = std::sqrt(p[i]) - std::sqrt(q[i]);
        acc += diff * diff;
    }
    return std::min(1.0, std::sqrt(0.5 * acc));
}

double EquivalenceReport::max_distance() const {
    return distances.empty() ? 0.0 : *std::max_element(distances.begin(), distances.end());
}

EquivalenceReport equivalence_check(std::span<const double> p_plus_a, std::span<const double> p_plus_b, double tau1,
                                    std::size_t tau2) {
    if (p_plus_a.empty() || p_plus_b.empty()) throw std::invalid_argument("equivalence_check: empty input");
    if (p_plus_a.size() != p_plus_b.size()) {
        throw std::invalid_argument("equivalence_check: outputs are not paired (" + std::to_string(p_plus_a.size()) +
                                    " vs " + std::to_string(p_plus_b.size()) + ")");
    }
    EquivalenceReport report;
    report.tau1 = tau1;
    report.tau2 = tau2;
    report.distances.reserve(p_plus_a.size());
    bool all_close = true;
    for (std::size_t i = 0; i < p_plus_a.size(); ++i) {
        const double a[2] = {p_plus_a[i], 1.0 - p_plus_a[i]};
        const double b[2] = {p_plus_b[i], 1.0 - p_plus_b[i]};
        const double h = hellinger(a, b);
        report.distances.push_back(h);
        all_close = all_close && h < tau1;
    }
    report.pass = all_close && report.distances.size() >= tau2;
    return report;
}

}  // namespace dqn
