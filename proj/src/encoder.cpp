#include "dqn/encoder.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "dqn/error.hpp"

namespace dqn {

EncodingLayer::EncodingLayer(std::size_t n_classes, std::size_t input_dim)
    : EncodingLayer(n_classes, input_dim, std::vector<double>(n_classes * input_dim, 0.0)) {}

EncodingLayer::EncodingLayer(std::size_t n_classes, std::size_t input_dim, std::vector<double> weights)
    : n_classes_(n_classes), input_dim_(input_dim), weights_(std::move(weights)) {
    if (n_classes_ == 0 || input_dim_ == 0) {
        throw std::invalid_argument("encoding layer needs at least one class and one input feature");
    }
    if (weights_.size() != n_classes_ * input_dim_) {
        throw std::invalid_argument("encoding layer expects " + std::to_string(n_classes_ * input_dim_) +
                                    " weights, got " + std::to_string(weights_.size()));
    }
    for (double w : weights_) {
        if (!std::isfinite(w)) throw std::invalid_argument("encoding layer weights must be finite");
    }
}

std::span<const double> EncodingLayer::row(std::size_t cls) const {
    return std::span<const double>(weights_).subspan(cls * input_dim_, input_dim_);
}

double encode_one(const EncodingLayer& layer, std::size_t cls, std::span<const double> x) {
    const auto w = layer.row(cls);
    return std::inner_product(w.begin(), w.end(), x.begin(), 0.0);
}

std::vector<double> encode(const EncodingLayer& layer, std::span<const double> x) {
    if (x.size() != layer.input_dim()) {
        throw DataError("input dimension mismatch: encoder expects d=" + std::to_string(layer.input_dim()) +
                        ", got d=" + std::to_string(x.size()));
    }
    std::vector<double> out(layer.n_classes());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = encode_one(layer, j, x);
    return out;
}

EncodingLayer init_weights(std::size_t input_dim, std::size_t n_classes, std::uint64_t seed, double scale) {
    if (input_dim == 0 || n_classes == 0) {
        throw std::invalid_argument("init_weights: d and n_classes must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    std::vector<double> w(input_dim * n_classes);
    for (auto& v : w) v = dist(rng);
    return EncodingLayer(n_classes, input_dim, std::move(w));
}

}  // namespace dqn
