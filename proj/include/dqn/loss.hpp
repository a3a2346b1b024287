#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dqn/network.hpp"

namespace dqn {

enum class LossKind { cross_entropy, binary };

std::string to_string(LossKind k);
LossKind parse_loss_kind(std::string_view s);

inline constexpr double kDefaultThreshold = 0.5;

/// One-hot target for class k over N outputs.
std::vector<double> target_vector(std::size_t n, std::size_t k);

/// exp(p_s) / sum exp(p_s'), computed with a max shift.
std::vector<double> softmax(std::span<const double> p);

/// -ln softmax(p)[true_class]. Applied to probabilities as-is, so for N = 2 the
/// loss never drops below -ln(e / (e + 1)).
double cross_entropy(std::span<const double> p, std::size_t true_class);

/// Single-qubit loss: (1 - P+) for class-0 samples plus P+ for class-1 samples.
/// Throws std::invalid_argument if the lists differ in length or a label is not 0/1.
double binary_loss(std::span<const double> p_plus, std::span<const std::size_t> labels);

/// Per-sample term of binary_loss.
double binary_loss_term(double p_plus, std::size_t label);

struct ClassificationDecision {
    std::optional<std::size_t> predicted_class;
    bool confident = false;
};

/// argmax with threshold: confident iff the maximum is unique and exceeds c_t.
ClassificationDecision classify(std::span<const double> p, double c_t = kDefaultThreshold);

/// Scores compared for a model's output: P itself for N >= 2, (P+, 1 - P+) for a
/// single-qubit model (class 0 wins when P+ is high).
std::vector<double> decision_scores(const ProbabilityVector& p);

/// Fraction of samples that are confident and correct. Throws std::invalid_argument on length mismatch.
double accuracy(std::span<const ClassificationDecision> decisions, std::span<const std::size_t> labels);

/// Convenience: classify every output at c_t and score against labels.
double accuracy_at(std::span<const ProbabilityVector> outputs, std::span<const std::size_t> labels, double c_t);

/// Loss contribution of one sample for the given loss kind.
double sample_loss(LossKind kind, const ProbabilityVector& p, std::size_t label);

}  // namespace dqn
