#pragma once

#include <map>
#include <string>

#include "tableqa/lf.hpp"

namespace tableqa::para {

/// Surface phrases for operators and builtin relations. Must be total over
/// the operators a tree uses; a missing entry raises a DataError naming the
/// key. A lexicon loaded from a file contains only the file's entries.
struct Lexicon {
  std::map<std::string, std::string> entries;

  static Lexicon defaults();
  /// Plain `key=phrase` lines; '#' starts a comment. Phrases are lowercased.
  static Lexicon load(const std::string& path);

  const std::string& get(const std::string& key) const;
};

/// Deterministic recursive rendering of a logical form as a single-space
/// joined token sequence. Reverse and lambda nodes are transparent.
std::string paraphrase(const lf::Node& n, const Lexicon& lex);
std::string paraphrase(const lf::LogicalForm& z, const Lexicon& lex);
std::string paraphrase(const lf::LogicalForm& z);

}  // namespace tableqa::para
