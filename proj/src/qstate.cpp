#include "dqn/qstate.hpp"

#include <algorithm>
#include <cmath>

namespace dqn {

namespace {

constexpr double kRenormTolerance = 1e-12;

QubitState renormalized(QubitState s) {
    const double n2 = s.norm_squared();
    if (std::abs(n2 - 1.0) > kRenormTolerance) {
        const double inv = 1.0 / std::sqrt(n2);
        s.amp0 *= inv;
        s.amp1 *= inv;
    }
    return s;
}

}  // namespace

double BlochVector::norm() const { return std::sqrt(q1 * q1 + q2 * q2 + q3 * q3); }

DensityMatrix DensityMatrix::maximally_mixed() {
    return DensityMatrix(Mat2{Complex{0.5, 0.0}, Complex{}, Complex{}, Complex{0.5, 0.0}});
}

double DensityMatrix::hermiticity_error() const {
    return std::max({std::abs(m_[1] - std::conj(m_[2])), std::abs(m_[0].imag()), std::abs(m_[3].imag())});
}

std::array<double, 2> DensityMatrix::eigenvalues() const {
    const double a = m_[0].real();
    const double d = m_[3].real();
    const Complex b = 0.5 * (m_[1] + std::conj(m_[2]));
    const double mean = 0.5 * (a + d);
    const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
    return {mean - half_gap, mean + half_gap};
}

DensityMatrix DensityMatrix::conjugated_by(const Mat2& u) const {
    return DensityMatrix(multiply(multiply(u, m_), adjoint(u)));
}

BlochVector DensityMatrix::bloch() const {
    // rho = (I + Q.sigma)/2  =>  rho01 = (Q1 - i Q2)/2
    return {2.0 * m_[1].real(), -2.0 * m_[1].imag(), (m_[0] - m_[3]).real()};
}

namespace gates {

Mat2 hadamard() {
    const double r = 1.0 / std::sqrt(2.0);
    return {Complex{r, 0.0}, Complex{r, 0.0}, Complex{r, 0.0}, Complex{-r, 0.0}};
}

Mat2 rz(double theta) {
    return {std::polar(1.0, theta), Complex{}, Complex{}, std::polar(1.0, -theta)};
}

Mat2 ry(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {Complex{c, 0.0}, Complex{s, 0.0}, Complex{-s, 0.0}, Complex{c, 0.0}};
}

Mat2 su2(const Su2Params& p) { return multiply(rz(p.alpha1), multiply(ry(p.alpha2), rz(p.alpha3))); }

}  // namespace gates

Mat2 multiply(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 adjoint(const Mat2& a) { return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}; }

QubitState apply(const Mat2& u, const QubitState& s) {
    return renormalized({u[0] * s.amp0 + u[1] * s.amp1, u[2] * s.amp0 + u[3] * s.amp1});
}

QubitState apply_hadamard(const QubitState& s) { return dqn::apply(gates::hadamard(), s); }

QubitState apply_rz(const QubitState& s, double theta) {
    return renormalized({s.amp0 * std::polar(1.0, theta), s.amp1 * std::polar(1.0, -theta)});
}

QubitState apply_ry(const QubitState& s, double theta) { return dqn::apply(gates::ry(theta), s); }

QubitState apply_su2(const QubitState& s, const Su2Params& p) {
    return apply_rz(apply_ry(apply_rz(s, p.alpha3), p.alpha2), p.alpha1);
}

QubitState prepare_qubit(double x_tilde) { return apply_rz(apply_hadamard(QubitState::zero()), x_tilde); }

BlochVector bloch_of_state(const QubitState& s) {
    const Complex c = s.amp0 * std::conj(s.amp1);
    return {2.0 * c.real(), -2.0 * c.imag(), std::norm(s.amp0) - std::norm(s.amp1)};
}

BlochVector bloch_closed_form(double x_tilde, const Su2Params& p) {
    const double c2 = std::cos(p.alpha2) * std::cos(p.alpha2);
    const double s2 = std::sin(p.alpha2) * std::sin(p.alpha2);
    const double sum = 2.0 * (p.alpha1 + p.alpha3 + x_tilde);
    const double diff = 2.0 * (p.alpha1 - p.alpha3 - x_tilde);
    return {
        c2 * std::cos(sum) - s2 * std::cos(diff),
        s2 * std::sin(diff) - c2 * std::sin(sum),
        std::sin(2.0 * p.alpha2) * std::cos(2.0 * (p.alpha3 + x_tilde)),
    };
}

double prob_plus(const BlochVector& b) { return std::clamp(0.5 * (1.0 + b.q3), 0.0, 1.0); }

DensityMatrix density_of_state(const QubitState& s) {
    return DensityMatrix(Mat2{s.amp0 * std::conj(s.amp0), s.amp0 * std::conj(s.amp1),
                              s.amp1 * std::conj(s.amp0), s.amp1 * std::conj(s.amp1)});
}

DensityMatrix density_of_bloch(const BlochVector& b) {
    return DensityMatrix(Mat2{Complex{0.5 * (1.0 + b.q3), 0.0}, Complex{0.5 * b.q1, -0.5 * b.q2},
                              Complex{0.5 * b.q1, 0.5 * b.q2}, Complex{0.5 * (1.0 - b.q3), 0.0}});
}

}  // namespace dqn
