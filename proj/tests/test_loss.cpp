#include <doctest.h>

#include <cmath>
#include <random>

#include "dqn/loss.hpp"

using namespace dqn;

namespace {
std::vector<ProbabilityVector> as_outputs(const std::vector<std::vector<double>>& rows) {
    std::vector<ProbabilityVector> out;
    for (const auto& r : rows) out.push_back({r});
    return out;
}
}  // namespace

TEST_CASE("target vectors are one-hot") {
    CHECK(target_vector(3, 1) == std::vector<double>{0, 1, 0});
    CHECK(target_vector(1, 0) == std::vector<double>{1});
    CHECK_THROWS(target_vector(3, 3));
}

TEST_CASE("softmax") {
    const std::vector<double> zero{0.0, 0.0};
    CHECK(softmax(zero) == std::vector<double>{0.5, 0.5});

    const std::vector<double> flat{0.3, 0.3, 0.3, 0.3};
    for (double v : softmax(flat)) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

    const double e = std::exp(1.0);
    const auto s = softmax(std::vector<double>{1.0, 0.0});
    CHECK(std::abs(s[0] - e / (e + 1.0)) < 1e-15);
    CHECK(std::abs(s[1] - 1.0 / (e + 1.0)) < 1e-15);
    CHECK(s[0] == doctest::Approx(0.7311).epsilon(1e-4));

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> p(1 + i % 7), shifted;
        for (auto& v : p) v = u(rng);
        const double c = u(rng) * 100.0;
        for (double v : p) shifted.push_back(v + c);
        const auto a = softmax(p), b = softmax(shifted);
        double sum = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            CHECK(a[k] > 0.0);
            CHECK(std::abs(a[k] - b[k]) < 1e-12);
            sum += a[k];
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("cross entropy of probabilities") {
    const double e = std::exp(1.0);
    const double floor2 = -std::log(e / (e + 1.0));
    CHECK(cross_entropy(std::vector<double>{1.0, 0.0}, 0) == doctest::Approx(floor2).epsilon(1e-14));
    CHECK(cross_entropy(std::vector<double>{1.0, 0.0}, 0) == doctest::Approx(0.3133).epsilon(1e-4));
    CHECK(cross_entropy(std::vector<double>{0.5, 0.5}, 0) == doctest::Approx(std::log(2.0)));
    CHECK(cross_entropy(std::vector<double>{0.5, 0.5}, 1) == doctest::Approx(std::log(2.0)));

    SUBCASE("decreases as the true-class probability rises") {
        double prev = cross_entropy(std::vector<double>{0.0, 0.4, 0.7}, 0);
        for (double p = 0.05; p <= 1.0; p += 0.05) {
            const double now = cross_entropy(std::vector<double>{p, 0.4, 0.7}, 0);
            CHECK(now < prev);
            prev = now;
        }
    }
    SUBCASE("bounded below for two classes") {
        std::mt19937_64 rng(32);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 2000; ++i) {
            const std::vector<double> p{u(rng), u(rng)};
            CHECK(cross_entropy(p, i % 2) >= floor2 - 1e-15);
        }
    }
}

TEST_CASE("binary loss") {
    const std::vector<std::size_t> labels{0, 0, 1, 1, 1};
    CHECK(binary_loss(std::vector<double>{1, 1, 0, 0, 0}, labels) == 0.0);
    CHECK(binary_loss(std::vector<double>(5, 0.5), labels) == doctest::Approx(2.5));
    CHECK(binary_loss(std::vector<double>{0.9}, std::vector<std::size_t>{0}) == doctest::Approx(0.1));
    CHECK_THROWS_AS(binary_loss(std::vector<double>{0.9}, labels), std::invalid_argument);
    CHECK_THROWS_AS(binary_loss(std::vector<double>{0.9}, std::vector<std::size_t>{2}), std::invalid_argument);

    SUBCASE("slope in P+ is exactly -1 for class 0 and +1 for class 1") {
        for (double p : {0.1, 0.37, 0.8}) {
            CHECK(binary_loss_term(p + 0.125, 0) - binary_loss_term(p, 0) == doctest::Approx(-0.125).epsilon(1e-14));
            CHECK(binary_loss_term(p + 0.125, 1) - binary_loss_term(p, 1) == doctest::Approx(0.125).epsilon(1e-14));
        }
    }
    SUBCASE("two-qubit cross entropy and one-qubit binary loss pull the true class the same way") {
        // Two-qubit formulation: P = (P+, 1 - P+) for a class-0 sample; moving P+ up lowers both losses.
        const double h = 1e-6;
        for (double p : {0.2, 0.5, 0.9}) {
            const double ce_slope = (cross_entropy(std::vector<double>{p + h, 1 - p - h}, 0) -
                                     cross_entropy(std::vector<double>{p, 1 - p}, 0)) / h;
            const double bl_slope = (binary_loss_term(p + h, 0) - binary_loss_term(p, 0)) / h;
            CHECK(ce_slope < 0.0);
            CHECK(bl_slope < 0.0);
        }
    }
}

TEST_CASE("classification with a confidence threshold") {
    auto d = classify(std::vector<double>{0.7, 0.3}, 0.5);
    CHECK(d.predicted_class == std::optional<std::size_t>{0});
    CHECK(d.confident);

    d = classify(std::vector<double>{0.55, 0.45}, 0.6);
    CHECK(d.predicted_class == std::optional<std::size_t>{0});
    CHECK_FALSE(d.confident);

    for (double ct : {0.0, 0.3, 0.5, 0.9}) CHECK_FALSE(classify(std::vector<double>{0.5, 0.5}, ct).confident);
    // A tie below the maximum does not matter.
    CHECK(classify(std::vector<double>{0.2, 0.2, 0.9}, 0.5).confident);
    // Exceed means strictly greater.
    CHECK_FALSE(classify(std::vector<double>{0.5, 0.1}, 0.5).confident);
}

TEST_CASE("single-qubit decision scores") {
    const auto s = decision_scores({{0.8}});
    REQUIRE(s.size() == 2);
    CHECK(s[0] == 0.8);
    CHECK(s[1] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(decision_scores({{0.1, 0.7}}) == std::vector<double>{0.1, 0.7});
}

TEST_CASE("accuracy") {
    const std::vector<std::size_t> labels{0, 1, 1};
    const std::vector<ClassificationDecision> right{{0, true}, {1, true}, {1, true}};
    CHECK(accuracy(right, labels) == 1.0);
    const std::vector<ClassificationDecision> unsure{{0, false}, {1, false}, {1, false}};
    CHECK(accuracy(unsure, labels) == 0.0);
    const std::vector<ClassificationDecision> mixed{{0, true}, {0, true}, {1, false}};
    CHECK(accuracy(mixed, labels) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(accuracy(right, std::vector<std::size_t>{0}), std::invalid_argument);

    SUBCASE("non-increasing in c_t") {
        std::mt19937_64 rng(33);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<ProbabilityVector> outputs;
        std::vector<std::size_t> ys;
        for (int i = 0; i < 300; ++i) {
            outputs.push_back({{u(rng), u(rng), u(rng)}});
            ys.push_back(static_cast<std::size_t>(i % 3));
        }
        double prev = 1.0;
        for (double ct = 0.0; ct <= 1.0; ct += 0.05) {
            const double a = accuracy_at(outputs, ys, ct);
            CHECK(a <= prev);
            prev = a;
        }
        const auto binary = as_outputs({{0.9}, {0.6}, {0.3}, {0.05}});
        const std::vector<std::size_t> by{0, 0, 1, 1};
        CHECK(accuracy_at(binary, by, 0.5) == 1.0);
        CHECK(accuracy_at(binary, by, 0.65) == 0.75);
        CHECK(accuracy_at(binary, by, 0.92) == 0.25);
    }
}

TEST_CASE("loss kinds") {
    CHECK(parse_loss_kind(to_string(LossKind::binary)) == LossKind::binary);
    CHECK(parse_loss_kind(to_string(LossKind::cross_entropy)) == LossKind::cross_entropy);
    CHECK_THROWS(parse_loss_kind("hinge"));
    CHECK(sample_loss(LossKind::binary, {{0.9}}, 0) == doctest::Approx(0.1));
    CHECK(sample_loss(LossKind::cross_entropy, {{0.5, 0.5}}, 1) == doctest::Approx(std::log(2.0)));
}
