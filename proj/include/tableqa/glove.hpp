#pragma once

#include <string>

#include "tableqa/model.hpp"
#include "tableqa/vocab.hpp"

namespace tableqa::nn {

/// Text format: `token v1 ... vd` per line. In-vocab rows are overwritten;
/// everything else keeps its random init. Returns the number of vocabulary
/// hits.
int load_word_vectors(const std::string& path, const Vocab& vocab, Tensor& word_emb);

}  // namespace tableqa::nn
