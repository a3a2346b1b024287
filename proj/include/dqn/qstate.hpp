#pragma once

// Single-qubit state algebra: amplitudes, the gates of the dressed network
// circuit, Bloch vectors and 2x2 density matrices.
//
// Conventions:
//   Rz(t) = exp(i t sigma_z) = diag(e^{it}, e^{-it})
//   Ry(t) = exp(i t sigma_y) = cos t * I + i sin t * sigma_y = [[c, s], [-s, c]]
//   Q1 = 2 Re(a0 conj(a1)),  Q2 = -2 Im(a0 conj(a1)),  Q3 = |a0|^2 - |a1|^2

#include <array>
#include <complex>

namespace dqn {

using Complex = std::complex<double>;

/// 2x2 complex matrix in row-major order.
using Mat2 = std::array<Complex, 4>;

struct QubitState {
    Complex amp0{1.0, 0.0};
    Complex amp1{0.0, 0.0};

    static QubitState zero() { return {{1.0, 0.0}, {0.0, 0.0}}; }
    static QubitState one() { return {{0.0, 0.0}, {1.0, 0.0}}; }

    double norm_squared() const { return std::norm(amp0) + std::norm(amp1); }
};

struct BlochVector {
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;

    double norm() const;
};

/// Rotation angles of exp(i a1 Z) exp(i a2 Y) exp(i a3 Z); a3 acts first.
struct Su2Params {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;

    friend bool operator==(const Su2Params&, const Su2Params&) = default;
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(const Mat2& m) : m_(m) {}

    static DensityMatrix maximally_mixed();

    Complex operator()(int row, int col) const { return m_[static_cast<std::size_t>(2 * row + col)]; }
    const Mat2& entries() const { return m_; }

    Complex trace() const { return m_[0] + m_[3]; }
    /// Largest deviation from Hermiticity over the off-diagonal pair and the diagonal imaginary parts.
    double hermiticity_error() const;
    /// Eigenvalues of the Hermitian part, ascending.
    std::array<double, 2> eigenvalues() const;

    /// rho -> U rho U^dagger
    DensityMatrix conjugated_by(const Mat2& u) const;

    BlochVector bloch() const;

private:
    Mat2 m_{Complex{1.0, 0.0}, Complex{}, Complex{}, Complex{}};
};

namespace gates {
Mat2 hadamard();
Mat2 rz(double theta);
Mat2 ry(double theta);
/// exp(i a1 Z) exp(i a2 Y) exp(i a3 Z) as one matrix.
Mat2 su2(const Su2Params& p);
}  // namespace gates

Mat2 multiply(const Mat2& a, const Mat2& b);
Mat2 adjoint(const Mat2& a);

QubitState apply(const Mat2& u, const QubitState& s);
QubitState apply_hadamard(const QubitState& s);
QubitState apply_rz(const QubitState& s, double theta);
QubitState apply_ry(const QubitState& s, double theta);
/// Applies Rz(alpha3), then Ry(alpha2), then Rz(alpha1).
QubitState apply_su2(const QubitState& s, const Su2Params& p);

/// Rz(x_tilde) H |0>
QubitState prepare_qubit(double x_tilde);

BlochVector bloch_of_state(const QubitState& s);

/// Bloch vector of Rz(a1) Ry(a2) Rz(a3) Rz(x_tilde) H |0> from the closed-form
/// trigonometric expressions, without building the state.
BlochVector bloch_closed_form(double x_tilde, const Su2Params& p);

/// Probability of the sigma_z = +1 outcome, (1 + q3) / 2 clamped to [0, 1].
double prob_plus(const BlochVector& b);

DensityMatrix density_of_state(const QubitState& s);

/// Bloch vector to density matrix, (I + Q.sigma) / 2.
DensityMatrix density_of_bloch(const BlochVector& b);

}  // namespace dqn
