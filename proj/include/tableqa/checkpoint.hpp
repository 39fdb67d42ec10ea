#pragma once

#include <string>

#include "tableqa/model.hpp"
#include "tableqa/vocab.hpp"

namespace tableqa::nn {

struct LoadedModel {
  ModelParams params;
  Vocab vocab;
};

/// Single-file binary checkpoint: magic + version, config echo, vocabulary,
/// then named parameter arrays as little-endian 32-bit floats. Loading
/// validates the magic, version, and every array name and size.
void save_checkpoint(const std::string& path, const ModelParams& params, const Vocab& vocab);
LoadedModel load_checkpoint(const std::string& path);

}  // namespace tableqa::nn
