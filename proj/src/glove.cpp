#include "tableqa/glove.hpp"

#include <fstream>
#include <sstream>

#include "tableqa/error.hpp"

namespace tableqa::nn {

int load_word_vectors(const std::string& path, const Vocab& vocab, Tensor& word_emb) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word vector file: " + path);
  const int dim = word_emb.cols;
  std::string line;
  int hits = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    std::vector<double> vec;
    vec.reserve(dim);
    double x;
    while (ss >> x) vec.push_back(x);
    if (static_cast<int>(vec.size()) != dim)
      throw DataError(path + ": line " + std::to_string(lineno) + ": expected " +
                      std::to_string(dim) + " values, got " + std::to_string(vec.size()));
    auto it = vocab.word_index.find(token);
    if (it == vocab.word_index.end()) continue;
    std::copy(vec.begin(), vec.end(), word_emb.row_ptr(it->second));
    ++hits;
  }
  return hits;
}

}  // namespace tableqa::nn
