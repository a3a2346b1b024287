#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dqn {

/// Linear map from d input features to one scalar per class qubit:
/// x_tilde[j] = sum_i weights[j][i] * x[i]. No bias, no activation.
class EncodingLayer {
public:
    /// Empty placeholder (0 x 0); only useful as a target for assignment.
    EncodingLayer() = default;
    EncodingLayer(std::size_t n_classes, std::size_t input_dim);
    /// Row-major N x d weights. Throws std::invalid_argument on a size mismatch or non-finite entry.
    EncodingLayer(std::size_t n_classes, std::size_t input_dim, std::vector<double> weights);

    std::size_t n_classes() const { return n_classes_; }
    std::size_t input_dim() const { return input_dim_; }

    double weight(std::size_t cls, std::size_t feature) const { return weights_[cls * input_dim_ + feature]; }
    double& weight(std::size_t cls, std::size_t feature) { return weights_[cls * input_dim_ + feature]; }
    std::span<const double> row(std::size_t cls) const;

    std::span<const double> weights() const { return weights_; }
    std::span<double> weights() { return weights_; }

    friend bool operator==(const EncodingLayer&, const EncodingLayer&) = default;

private:
    std::size_t n_classes_ = 0;
    std::size_t input_dim_ = 0;
    std::vector<double> weights_;
};

/// Throws DataError naming the expected and actual input dimension on mismatch.
std::vector<double> encode(const EncodingLayer& layer, std::span<const double> x);

/// Single-row variant used on the hot path; no allocation.
double encode_one(const EncodingLayer& layer, std::size_t cls, std::span<const double> x);

/// Weights drawn i.i.d. from U[-scale, scale], deterministic in `seed`.
EncodingLayer init_weights(std::size_t input_dim, std::size_t n_classes, std::uint64_t seed, double scale = 0.5);

}  // namespace dqn
