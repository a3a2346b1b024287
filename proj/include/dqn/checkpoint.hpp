#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dqn/data.hpp"
#include "dqn/network.hpp"
#include "dqn/optim.hpp"

namespace dqn {

/// A trained (or partially trained) model with everything needed to resume or
/// evaluate it: optimizer moments, the number of completed epochs and the
/// feature scaler fitted on the training split.
///
/// Byte layout: docs/checkpoint_format.md.
struct Checkpoint {
    DressedModel model;
    OptimizerState optimizer;
    std::uint64_t epoch = 0;  ///< completed epochs; the model is the state after that many updates
    FeatureScaler scaler;
    std::string dataset;

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<unsigned char> serialize_checkpoint(const Checkpoint& c);

/// Throws DataError on a bad header, unsupported version, truncation or checksum mismatch.
Checkpoint deserialize_checkpoint(const std::vector<unsigned char>& bytes, const std::string& origin = "<memory>");

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dqn
