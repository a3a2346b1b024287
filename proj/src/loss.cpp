#include "dqn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dqn/error.hpp"

namespace dqn {

std::string to_string(LossKind k) { return k == LossKind::binary ? "binary" : "cross_entropy"; }

LossKind parse_loss_kind(std::string_view s) {
    if (s == "cross_entropy") return LossKind::cross_entropy;
    if (s == "binary") return LossKind::binary;
    throw ConfigError("unknown loss '" + std::string(s) + "' (expected cross_entropy or binary)");
}

std::vector<double> target_vector(std::size_t n, std::size_t k) {
    if (k >= n) throw std::invalid_argument("target class out of range");
    std::vector<double> t(n, 0.0);
    t[k] = 1.0;
    return t;
}

std::vector<double> softmax(std::span<const double> p) {
    std::vector<double> out(p.size());
    if (p.empty()) return out;
    const double shift = *std::max_element(p.begin(), p.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = std::exp(p[i] - shift);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

double cross_entropy(std::span<const double> p, std::size_t true_class) {
    if (true_class >= p.size()) throw std::invalid_argument("cross_entropy: class index out of range");
    // -ln softmax_k = logsumexp(p) - p_k
    const double shift = *std::max_element(p.begin(), p.end());
    double sum = 0.0;
    for (double v : p) sum += std::exp(v - shift);
    return shift + std::log(sum) - p[true_class];
}

double binary_loss_term(double p_plus, std::size_t label) {
    if (label > 1) throw std::invalid_argument("binary loss labels must be 0 or 1");
    return label == 0 ? 1.0 - p_plus : p_plus;
}

double binary_loss(std::span<const double> p_plus, std::span<const std::size_t> labels) {
    if (p_plus.size() != labels.size()) {
        throw std::invalid_argument("binary_loss: " + std::to_string(p_plus.size()) + " probabilities for " +
                                    std::to_string(labels.size()) + " labels");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < p_plus.size(); ++i) total += binary_loss_term(p_plus[i], labels[i]);
    return total;
}

ClassificationDecision classify(std::span<const double> p, double c_t) {
    if (p.empty()) return {};
    const auto best = std::max_element(p.begin(), p.end());
    const auto k = static_cast<std::size_t>(best - p.begin());
    const bool unique = std::count(p.begin(), p.end(), *best) == 1;
    return {k, unique && *best > c_t};
}

std::vector<double> decision_scores(const ProbabilityVector& p) {
    if (p.size() == 1) return {p[0], 1.0 - p[0]};
    return p.probs;
}

double accuracy(std::span<const ClassificationDecision> decisions, std::span<const std::size_t> labels) {
    if (decisions.size() != labels.size()) {
        throw std::invalid_argument("accuracy: " + std::to_string(decisions.size()) + " decisions for " +
                                    std::to_string(labels.size()) + " labels");
    }
    if (decisions.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        if (decisions[i].confident && decisions[i].predicted_class == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(decisions.size());
}

double accuracy_at(std::span<const ProbabilityVector> outputs, std::span<const std::size_t> labels, double c_t) {
    std::vector<ClassificationDecision> decisions;
    decisions.reserve(outputs.size());
    for (const auto& p : outputs) decisions.push_back(classify(decision_scores(p), c_t));
    return accuracy(decisions, labels);
}

double sample_loss(LossKind kind, const ProbabilityVector& p, std::size_t label) {
    if (kind == LossKind::binary) {
        if (p.size() != 1) throw std::invalid_argument("binary loss needs a single-qubit model");
        return binary_loss_term(p[0], label);
    }
    return cross_entropy(p.probs, label);
}

}  // namespace dqn
