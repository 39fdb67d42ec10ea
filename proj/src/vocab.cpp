#include "tableqa/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace tableqa {

namespace {

bool letter_like(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
bool digit_sep(unsigned char c) {
  return c == '.' || c == ',' || c == ':' || c == '/' || c == '-';
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    unsigned char c = text[i];
    if (std::isspace(c)) { ++i; continue; }
    if (std::isdigit(c)) {
      std::string tok(1, static_cast<char>(c));
      ++i;
      while (i < n) {
        unsigned char d = text[i];
        if (std::isdigit(d)) { tok.push_back(static_cast<char>(d)); ++i; continue; }
        if (digit_sep(d) && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
          tok.push_back(static_cast<char>(d));
          ++i;
          continue;
        }
        break;
      }
      out.push_back(tok);
      continue;
    }
    if (letter_like(c)) {
      std::string tok;
      while (i < n && letter_like(static_cast<unsigned char>(text[i]))) {
        tok.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
        ++i;
      }
      out.push_back(tok);
      continue;
    }
    out.push_back(std::string(1, static_cast<char>(c)));
    ++i;
  }
  return out;
}

Vocab::Vocab() {
  words = {"<pad>", "<unk>"};
  word_index["<pad>"] = kPad;
  word_index["<unk>"] = kUnk;
  char_index.fill(kUnk);
}

int Vocab::word_id(const std::string& w) const {
  auto it = word_index.find(w);
  return it == word_index.end() ? kUnk : it->second;
}

void Vocab::add_word(const std::string& w) {
  if (word_index.count(w)) return;
  word_index[w] = static_cast<int>(words.size());
  words.push_back(w);
}

void Vocab::add_chars_of(const std::string& w) {
  for (unsigned char c : w) {
    if (char_index[c] != kUnk) continue;
    char_index[c] = static_cast<int>(char_bytes.size()) + 2;
    char_bytes.push_back(c);
  }
}

Vocab Vocab::build(const std::vector<std::string>& texts) {
  std::set<std::string> word_set;
  std::set<unsigned char> byte_set;
  for (const auto& t : texts) {
    for (const auto& tok : tokenize(t)) {
      word_set.insert(tok);
      for (unsigned char c : tok) byte_set.insert(c);
    }
  }
  Vocab v;
  for (const auto& w : word_set) v.add_word(w);
  for (unsigned char c : byte_set) {
    v.char_index[c] = static_cast<int>(v.char_bytes.size()) + 2;
    v.char_bytes.push_back(c);
  }
  return v;
}

}  // namespace tableqa
