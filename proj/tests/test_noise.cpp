#include <doctest.h>

#include <cmath>
#include <random>

#include "dqn/network.hpp"
#include "dqn/noise.hpp"
#include "support.hpp"

using namespace dqn;
using testing::max_abs_diff;

namespace {

double entry_diff(const DensityMatrix& a, const DensityMatrix& b) {
    double worst = 0.0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
    return worst;
}

// Mixed states as well as pure ones: shrink a random Bloch vector.
DensityMatrix random_density(std::mt19937_64& rng) {
    const auto b = bloch_of_state(testing::random_state(rng));
    const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return density_of_bloch({r * b.q1, r * b.q2, r * b.q3});
}

}  // namespace

TEST_CASE("depolarizing channel") {
    std::mt19937_64 rng(61);
    const auto rho = density_of_state(testing::random_state(rng));
    CHECK(entry_diff(apply_depolarizing(rho, 0.0), rho) < 1e-15);
    CHECK(entry_diff(apply_depolarizing(rho, 1.0), DensityMatrix::maximally_mixed()) < 1e-15);
    for (double p : {0.01, 0.3, 0.77}) {
        const auto b = rho.bloch();
        CHECK(max_abs_diff(apply_depolarizing(rho, p).bloch(), {(1 - p) * b.q1, (1 - p) * b.q2, (1 - p) * b.q3}) <
              1e-14);
    }
}

TEST_CASE("amplitude damping") {
    std::mt19937_64 rng(62);
    const auto rho = density_of_state(testing::random_state(rng));
    CHECK(entry_diff(apply_amplitude_damping(rho, 0.0), rho) < 1e-15);
    CHECK(entry_diff(apply_amplitude_damping(rho, 1.0), density_of_state(QubitState::zero())) < 1e-15);
    const auto one = density_of_state(QubitState::one());
    for (double g : {0.1, 0.5, 0.9}) {
        const auto out = apply_amplitude_damping(one, g);
        CHECK(out(0, 0).real() == doctest::Approx(g));
        CHECK(out(1, 1).real() == doctest::Approx(1 - g));
        CHECK(std::abs(out(0, 1)) < 1e-15);
    }
}

TEST_CASE("phase damping") {
    std::mt19937_64 rng(63);
    const auto rho = density_of_state(testing::random_state(rng));
    CHECK(entry_diff(apply_phase_damping(rho, 0.0), rho) < 1e-15);
    const auto full = apply_phase_damping(rho, 1.0);
    CHECK(std::abs(full(0, 1)) < 1e-15);
    CHECK(std::abs(full(0, 0) - rho(0, 0)) < 1e-15);
    const auto half = apply_phase_damping(rho, 0.36);
    CHECK(std::abs(half(0, 1) - rho(0, 1) * 0.8) < 1e-15);
    const auto diag = density_of_bloch({0, 0, 0.4});
    CHECK(entry_diff(apply_phase_damping(diag, 0.6), diag) < 1e-15);
}

TEST_CASE("readout error") {
    CHECK(apply_readout_error(0.3, 0.0, 0.0) == 0.3);
    CHECK(apply_readout_error(1.0, 0.0, 0.1) == doctest::Approx(0.9));
    for (double e : {0.0, 0.05, 0.5, 1.0}) CHECK(apply_readout_error(0.5, e, e) == doctest::Approx(0.5));
    CHECK(apply_readout_error(0.0, 0.2, 0.0) == doctest::Approx(0.2));
}

TEST_CASE("channels preserve trace and positivity") {
    std::mt19937_64 rng(64);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double trace_drift = 0.0;
    double min_eig = 1.0;
    for (int i = 0; i < 10000; ++i) {
        const auto rho = random_density(rng);
        for (const auto& out : {apply_depolarizing(rho, u(rng)), apply_amplitude_damping(rho, u(rng)),
                                apply_phase_damping(rho, u(rng))}) {
            trace_drift = std::max(trace_drift, std::abs(out.trace() - 1.0));
            min_eig = std::min(min_eig, out.eigenvalues()[0]);
            CHECK(out.hermiticity_error() < 1e-12);
        }
    }
    CHECK(trace_drift < 1e-12);
    CHECK(min_eig >= -1e-12);
}

TEST_CASE("noisy circuit") {
    std::mt19937_64 rng(65);
    SUBCASE("zero noise equals the statevector circuit") {
        for (int i = 0; i < 1000; ++i) {
            const double x = std::uniform_real_distribution<double>(-3, 3)(rng);
            const auto a = testing::random_su2(rng);
            const double exact = prob_plus(bloch_of_state(apply_su2(prepare_qubit(x), a)));
            CHECK(std::abs(noisy_prob_plus(x, a, NoiseModel{}) - exact) < 1e-10);
        }
    }
    SUBCASE("five depolarizing gates shrink the Bloch vector by (1-p)^5") {
        NoiseModel nm;
        nm.depol_per_gate = 0.1;
        const Su2Params a{0.2, -0.4, 1.1};
        const auto ideal = bloch_closed_form(0.7, a);
        const auto noisy = noisy_circuit_state(0.7, a, nm).bloch();
        const double k = std::pow(0.9, 5);
        CHECK(max_abs_diff(noisy, {k * ideal.q1, k * ideal.q2, k * ideal.q3}) < 1e-12);
    }
    SUBCASE("damping then readout") {
        NoiseModel nm;
        nm.amp_damp_gamma = 1.0;
        nm.readout_eps1 = 0.25;
        CHECK(noisy_prob_plus(0.3, {0.1, 0.2, 0.3}, nm) == doctest::Approx(0.75));
    }
    SUBCASE("noisy backend without shots noise tracks the exact noisy probability") {
        const auto nm = noise_preset("nisq_high");
        const auto m = init_model(2, 1, 66, 1.0, 1.0);
        const std::vector<double> x{0.3, 0.8};
        const double exact = noisy_prob_plus(encode_one(m.encoder, 0, x), m.su2[0], nm);
        const double est = forward_binary(m, x, ExecutionBackend::noisy(nm, 200000, 3));
        CHECK(std::abs(est - exact) < 0.005);
    }
}

TEST_CASE("noise presets and validation") {
    for (const auto& name : noise_preset_names()) CHECK_NOTHROW(noise_preset(name).validate());
    CHECK(noise_preset("ideal").is_ideal());
    CHECK_FALSE(noise_preset("nisq_low").is_ideal());
    CHECK_THROWS(noise_preset("nonsense"));
    // The per-gate error of the presets spans the quoted single-qubit range 0.038%..0.412%.
    CHECK(noise_preset("nisq_low").depol_per_gate == doctest::Approx(0.00038));
    CHECK(noise_preset("nisq_high").depol_per_gate == doctest::Approx(0.00412));
    NoiseModel bad;
    bad.readout_eps0 = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = {};
    bad.amp_damp_gamma = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("hellinger distance") {
    const std::vector<double> d{0.2, 0.3, 0.5};
    CHECK(hellinger(d, d) == 0.0);
    CHECK(hellinger(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == doctest::Approx(1.0));
    CHECK(hellinger(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}) == 0.0);
    // Binary closed form: H^2 = 1 - sqrt(pq) - sqrt((1-p)(1-q)).
    const double p = 0.3, q = 0.6;
    CHECK(hellinger(std::vector<double>{p, 1 - p}, std::vector<double>{q, 1 - q}) ==
          doctest::Approx(std::sqrt(1 - std::sqrt(p * q) - std::sqrt((1 - p) * (1 - q)))).epsilon(1e-12));
    CHECK_THROWS_AS(hellinger(d, std::vector<double>{0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(hellinger(std::vector<double>{0.5, 0.6}, std::vector<double>{0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("equivalence check") {
    const std::vector<double> a{0.1, 0.5, 0.93, 0.4};
    auto r = equivalence_check(a, a, 1e-6, 4);
    CHECK(r.pass);
    CHECK(r.max_distance() == 0.0);

    r = equivalence_check(a, a, 1e-6, 5);
    CHECK_FALSE(r.pass);  // too few samples, however close

    std::vector<double> b = a;
    b[2] = 0.94;
    r = equivalence_check(a, b, 1e-3, 1);
    CHECK_FALSE(r.pass);
    CHECK(r.distances.size() == 4);
    CHECK(r.distances[2] > 1e-3);

    CHECK_THROWS_AS(equivalence_check(std::vector<double>{}, std::vector<double>{}, 1e-3, 0), std::invalid_argument);
    CHECK_THROWS_AS(equivalence_check(a, std::vector<double>{0.1}, 1e-3, 0), std::invalid_argument);

    SUBCASE("analytic against a million shots") {
        // Binomial standard error at P = 0.5 is 5e-4; in Hellinger terms about 3.5e-4 per sample.
        const auto m = init_model(3, 1, 67, 1.0, 1.0);
        const auto data = testing::random_dataset(40, 3, 2, 68);
        const auto exact = forward_all(m, data, ExecutionBackend::analytic());
        const auto shots = forward_all(m, data, ExecutionBackend::sampled(1000000, 69));
        std::vector<double> pa, pb;
        for (std::size_t i = 0; i < data.size(); ++i) {
            pa.push_back(exact[i][0]);
            pb.push_back(shots[i][0]);
        }
        const auto rep = equivalence_check(pa, pb, 1e-3, 4);
        CHECK(rep.pass);
        CHECK(rep.max_distance() > 0.0);
    }
}
