#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "dqn/data.hpp"
#include "dqn/qstate.hpp"

namespace dqn::testing {

inline std::filesystem::path data_dir() { return std::filesystem::path(DQN_SOURCE_DIR) / "data"; }
inline std::filesystem::path config_dir() { return std::filesystem::path(DQN_SOURCE_DIR) / "configs"; }

/// Fresh scratch directory under the build tree, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto p = std::filesystem::path(DQN_BINARY_DIR) / "test_scratch" / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline double max_abs_diff(const BlochVector& a, const BlochVector& b) {
    return std::max({std::abs(a.q1 - b.q1), std::abs(a.q2 - b.q2), std::abs(a.q3 - b.q3)});
}

inline QubitState random_state(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    QubitState s{{n(rng), n(rng)}, {n(rng), n(rng)}};
    const double norm = std::sqrt(s.norm_squared());
    s.amp0 /= norm;
    s.amp1 /= norm;
    return s;
}

inline Su2Params random_su2(std::mt19937_64& rng, double range = 3.2) {
    std::uniform_real_distribution<double> u(-range, range);
    return {u(rng), u(rng), u(rng)};
}

/// Small synthetic dataset with features in [0, 1).
inline Dataset random_dataset(std::size_t n, std::size_t d, std::size_t classes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dataset ds;
    ds.name = "synthetic";
    ds.input_dim = d;
    ds.n_classes = classes;
    for (std::size_t c = 0; c < classes; ++c) ds.class_names.push_back("c" + std::to_string(c));
    std::vector<double> x(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x) v = u(rng);
        ds.add(x, i % classes, i);
    }
    return ds;
}

}  // namespace dqn::testing
