#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>
#include <set>

#include "dqn/error.hpp"
#include "dqn/network.hpp"
#include "support.hpp"

using namespace dqn;

namespace {

DressedModel random_model(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    return init_model(d, n, rng(), 1.5, 3.0);
}

std::vector<double> random_input(std::mt19937_64& rng, std::size_t d) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(d);
    for (auto& v : x) v = u(rng);
    return x;
}

}  // namespace

TEST_CASE("parameter counts of the dataset shapes") {
    CHECK(DressedModel::zeros(3, 4).parameter_count() == 21);   // iris
    CHECK(DressedModel::zeros(1, 30).parameter_count() == 33);  // wbc, single qubit
    CHECK(DressedModel::zeros(6, 8).parameter_count() == 66);   // abalone
    CHECK(DressedModel::zeros(1, 784).parameter_count() == 787);
}

TEST_CASE("validate catches a missing SU(2) block") {
    auto m = DressedModel::zeros(3, 2);
    m.su2.pop_back();
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("forward on degenerate models") {
    const std::vector<double> x{0.4, -2.0, 7.0};
    SUBCASE("all-zero parameters sit on the equator") {
        const auto p = forward(DressedModel::zeros(4, 3), x, ExecutionBackend::analytic());
        CHECK(p.size() == 4);
        for (double v : p.probs) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(forward_binary(DressedModel::zeros(1, 3), x, ExecutionBackend::analytic()) ==
              doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("alpha2 = pi/4 rotates every qubit to |0>") {
        auto m = DressedModel::zeros(3, 3);
        for (auto& a : m.su2) a.alpha2 = std::numbers::pi / 4;
        for (double v : forward(m, x, ExecutionBackend::analytic()).probs) CHECK(v == doctest::Approx(1.0));
        for (double v : forward(m, x, ExecutionBackend::statevector()).probs) CHECK(v == doctest::Approx(1.0));
    }
}

TEST_CASE("dimension mismatches propagate from the encoder") {
    CHECK_THROWS_AS(forward(DressedModel::zeros(2, 3), std::vector<double>{1.0, 2.0}, ExecutionBackend::analytic()),
                    DataError);
}

TEST_CASE("forward_binary requires one qubit and matches forward") {
    std::mt19937_64 rng(21);
    CHECK_THROWS_AS(forward_binary(DressedModel::zeros(2, 2), std::vector<double>{0, 0}, ExecutionBackend::analytic()),
                    std::invalid_argument);
    const auto m = random_model(rng, 1, 5);
    const auto x = random_input(rng, 5);
    for (const auto& backend : {ExecutionBackend::analytic(), ExecutionBackend::statevector(),
                                ExecutionBackend::sampled(100, 7),
                                ExecutionBackend::noisy(noise_preset("nisq_high"), 100, 7)}) {
        const StreamKey key{3, 9};
        CHECK(forward_binary(m, x, backend, key) == forward(m, x, backend, key)[0]);
    }
}

TEST_CASE("analytic and statevector backends agree on random models") {
    std::mt19937_64 rng(22);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const std::size_t n = 1 + i % 4;
        const std::size_t d = 1 + i % 6;
        const auto m = random_model(rng, n, d);
        const auto x = random_input(rng, d);
        const auto a = forward(m, x, ExecutionBackend::analytic());
        const auto s = forward(m, x, ExecutionBackend::statevector());
        for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(a[j] - s[j]));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("shot sampling") {
    SUBCASE("four shots take only multiples of 1/4") {
        const auto m = DressedModel::zeros(1, 1);
        const std::set<double> support{0.0, 0.25, 0.5, 0.75, 1.0};
        for (std::uint64_t s = 0; s < 200; ++s) {
            const double p = forward_binary(m, std::vector<double>{0.0}, ExecutionBackend::sampled(4, 1), {0, s});
            CHECK(support.count(p) == 1);
        }
    }
    SUBCASE("1e5 shots converge to the analytic value") {
        std::mt19937_64 rng(23);
        const auto backend = ExecutionBackend::sampled(100000, 42);
        double worst = 0.0;
        for (std::uint64_t c = 0; c < 100; ++c) {
            const auto m = random_model(rng, 2, 3);
            const auto x = random_input(rng, 3);
            const auto exact = forward(m, x, ExecutionBackend::analytic());
            const auto est = forward(m, x, backend, {0, c});
            for (std::size_t j = 0; j < 2; ++j) worst = std::max(worst, std::abs(exact[j] - est[j]));
        }
        CHECK(worst < 0.01);
    }
    SUBCASE("streams are reproducible and keyed by epoch and sample") {
        std::mt19937_64 rng(24);
        const auto m = random_model(rng, 3, 2);
        const auto x = random_input(rng, 2);
        const auto backend = ExecutionBackend::sampled(1000, 5);
        CHECK(forward(m, x, backend, {1, 2}).probs == forward(m, x, backend, {1, 2}).probs);
        CHECK(forward(m, x, backend, {1, 2}).probs != forward(m, x, backend, {2, 2}).probs);
        CHECK(forward(m, x, backend, {1, 2}).probs != forward(m, x, backend, {1, 3}).probs);
    }
}

TEST_CASE("backend validation") {
    CHECK_NOTHROW(ExecutionBackend::analytic().validate());
    CHECK_THROWS_AS(ExecutionBackend::sampled(0, 1).validate(), std::invalid_argument);
    auto noisy_without_model = ExecutionBackend::noisy(NoiseModel{}, 10, 1);
    noisy_without_model.noise.reset();
    CHECK_THROWS_AS(noisy_without_model.validate(), std::invalid_argument);
    auto analytic_with_noise = ExecutionBackend::analytic();
    analytic_with_noise.noise = NoiseModel{};
    CHECK_THROWS_AS(analytic_with_noise.validate(), std::invalid_argument);

    for (auto mode : {BackendMode::analytic, BackendMode::statevector, BackendMode::shots, BackendMode::noisy})
        CHECK(parse_backend_mode(to_string(mode)) == mode);
    CHECK_THROWS(parse_backend_mode("qpu"));
}

TEST_CASE("permuting the classes permutes the outputs") {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = random_model(rng, 4, 3);
        const auto x = random_input(rng, 3);
        std::vector<std::size_t> perm{2, 0, 3, 1};
        DressedModel p = DressedModel::zeros(4, 3);
        for (std::size_t j = 0; j < 4; ++j) {
            p.su2[j] = m.su2[perm[j]];
            for (std::size_t i = 0; i < 3; ++i) p.encoder.weight(j, i) = m.encoder.weight(perm[j], i);
        }
        const auto a = forward(m, x, ExecutionBackend::analytic());
        const auto b = forward(p, x, ExecutionBackend::analytic());
        for (std::size_t j = 0; j < 4; ++j) CHECK(b[j] == a[perm[j]]);
    }
}

TEST_CASE("trajectory records") {
    std::mt19937_64 rng(26);
    const auto data = testing::random_dataset(40, 3, 2, 8);
    const auto m = random_model(rng, 1, 3);
    const auto rec = record_trajectory(m, data, 7);
    CHECK(rec.epoch == 7);
    REQUIRE(rec.points.size() == data.size());
    for (std::size_t i = 0; i < rec.points.size(); ++i) {
        const auto& pt = rec.points[i];
        CHECK(pt.sample_id == data.ids[i]);
        CHECK(pt.label == data.labels[i]);
        CHECK(pt.x_tilde == doctest::Approx(encode_one(m.encoder, 0, data.row(i))));
        CHECK(std::abs(pt.pre_su2.q3) < 1e-10);
        CHECK(std::abs(pt.pre_su2.norm() - 1.0) < 1e-9);
        CHECK(std::abs(pt.post_su2.norm() - 1.0) < 1e-9);
        const auto rotated = density_of_bloch(pt.pre_su2).conjugated_by(gates::su2(m.su2[0])).bloch();
        CHECK(testing::max_abs_diff(rotated, pt.post_su2) < 1e-10);
    }
    CHECK_THROWS_AS(record_trajectory(DressedModel::zeros(2, 3), data, 0), std::invalid_argument);
}
