#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace tableqa {

/// Lowercase, split on whitespace and punctuation; a digit run with internal
/// separators (.,:/-) stays one token, so numbers and dates survive intact.
std::vector<std::string> tokenize(const std::string& text);

/// Word and character (byte) tables with reserved PAD and UNK entries.
/// Lookups are total: anything unseen maps to UNK.
struct Vocab {
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  std::vector<std::string> words;  // index -> word; [0],[1] reserved
  std::map<std::string, int> word_index;
  std::vector<unsigned char> char_bytes;  // bytes for ids >= 2
  std::array<int, 256> char_index{};      // byte -> id (kUnk default)

  Vocab();

  int word_count() const { return static_cast<int>(words.size()); }
  int char_count() const { return static_cast<int>(char_bytes.size()) + 2; }
  int word_id(const std::string& w) const;
  int char_id(unsigned char c) const { return char_index[c]; }

  void add_word(const std::string& w);
  void add_chars_of(const std::string& w);

  /// Deterministic: words and bytes are sorted, independent of text order.
  static Vocab build(const std::vector<std::string>& texts);
};

}  // namespace tableqa
