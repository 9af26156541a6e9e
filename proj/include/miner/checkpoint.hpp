#pragma once

#include <string>

#include "miner/model.hpp"

namespace miner {

// Single-file archive: 8-byte format tag, JSON metadata (model config, label
// inventory, vocabulary), then named float64 tensors with shapes, row-major.
// load_checkpoint rebuilds the model skeleton from the metadata and verifies
// every tensor's name and shape against it.
void save_checkpoint(const std::string& path, const Model& model);
Model load_checkpoint(const std::string& path);

} // namespace miner
