#include "tableqa/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <map>

#include "tableqa/error.hpp"

namespace tableqa::nn {

namespace {

constexpr char kMagic[8] = {'T', 'Q', 'A', 'C', 'K', 'P', 'T', '1'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

void put_u64(std::ostream& out, uint64_t v) {
  put_u32(out, static_cast<uint32_t>(v & 0xffffffffu));
  put_u32(out, static_cast<uint32_t>(v >> 32));
}

void put_i32(std::ostream& out, int32_t v) { put_u32(out, static_cast<uint32_t>(v)); }
void put_f32(std::ostream& out, float v) { put_u32(out, std::bit_cast<uint32_t>(v)); }
void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

void put_str(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t get_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError(path + ": truncated checkpoint");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

uint64_t get_u64(std::istream& in, const std::string& path) {
  uint64_t lo = get_u32(in, path);
  uint64_t hi = get_u32(in, path);
  return lo | (hi << 32);
}

int32_t get_i32(std::istream& in, const std::string& path) {
  return static_cast<int32_t>(get_u32(in, path));
}
float get_f32(std::istream& in, const std::string& path) {
  return std::bit_cast<float>(get_u32(in, path));
}
double get_f64(std::istream& in, const std::string& path) {
  return std::bit_cast<double>(get_u64(in, path));
}

std::string get_str(std::istream& in, const std::string& path) {
  uint32_t len = get_u32(in, path);
  std::string s(len, '\0');
  if (len && !in.read(s.data(), len)) throw DataError(path + ": truncated checkpoint");
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params, const Vocab& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kMagic, 8);
  put_u32(out, kVersion);

  const ModelConfig& cfg = params.cfg;
  put_i32(out, cfg.word_dim);
  put_i32(out, cfg.char_dim);
  put_i32(out, cfg.char_filters);
  put_i32(out, cfg.sent_filters);
  put_i32(out, cfg.fc_hidden);
  out.put(cfg.use_char_emb ? 1 : 0);
  out.put(static_cast<char>(cfg.mode));
  put_f64(out, cfg.dropout_keep);
  put_f64(out, params.alpha);
  put_u32(out, static_cast<uint32_t>(cfg.char_widths.size()));
  for (int w : cfg.char_widths) put_i32(out, w);
  put_u32(out, static_cast<uint32_t>(cfg.sent_widths.size()));
  for (int w : cfg.sent_widths) put_i32(out, w);

  put_u32(out, static_cast<uint32_t>(vocab.words.size() - 2));
  for (size_t i = 2; i < vocab.words.size(); ++i) put_str(out, vocab.words[i]);
  put_u32(out, static_cast<uint32_t>(vocab.char_bytes.size()));
  for (unsigned char c : vocab.char_bytes) out.put(static_cast<char>(c));

  uint32_t count = 0;
  for_each_param(params, [&count](const std::string&, const double*, size_t) { ++count; });
  put_u32(out, count);
  for_each_param(params, [&out](const std::string& name, const double* data, size_t n) {
    put_str(out, name);
    put_u64(out, n);
    for (size_t i = 0; i < n; ++i) put_f32(out, static_cast<float>(data[i]));
  });
  if (!out) throw DataError("failed writing checkpoint: " + path);
}

LoadedModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kMagic))
    throw DataError(path + ": not a checkpoint file");
  uint32_t version = get_u32(in, path);
  if (version != kVersion)
    throw DataError(path + ": unsupported checkpoint version " + std::to_string(version));

  ModelConfig cfg;
  cfg.word_dim = get_i32(in, path);
  cfg.char_dim = get_i32(in, path);
  cfg.char_filters = get_i32(in, path);
  cfg.sent_filters = get_i32(in, path);
  cfg.fc_hidden = get_i32(in, path);
  cfg.use_char_emb = in.get() != 0;
  cfg.mode = static_cast<SimMode>(in.get());
  cfg.dropout_keep = get_f64(in, path);
  double alpha = get_f64(in, path);
  cfg.char_widths.clear();
  uint32_t ncw = get_u32(in, path);
  for (uint32_t i = 0; i < ncw; ++i) cfg.char_widths.push_back(get_i32(in, path));
  cfg.sent_widths.clear();
  uint32_t nsw = get_u32(in, path);
  for (uint32_t i = 0; i < nsw; ++i) cfg.sent_widths.push_back(get_i32(in, path));

  LoadedModel lm;
  uint32_t nwords = get_u32(in, path);
  for (uint32_t i = 0; i < nwords; ++i) lm.vocab.add_word(get_str(in, path));
  uint32_t nchars = get_u32(in, path);
  for (uint32_t i = 0; i < nchars; ++i) {
    int c = in.get();
    if (c < 0) throw DataError(path + ": truncated checkpoint");
    auto byte = static_cast<unsigned char>(c);
    lm.vocab.char_index[byte] = static_cast<int>(lm.vocab.char_bytes.size()) + 2;
    lm.vocab.char_bytes.push_back(byte);
  }

  lm.params = init_params(cfg, lm.vocab, 0);
  std::map<std::string, std::pair<double*, size_t>> slots;
  for_each_param(lm.params, [&slots](const std::string& name, double* data, size_t n) {
    slots[name] = {data, n};
  });

  uint32_t count = get_u32(in, path);
  std::map<std::string, bool> seen;
  for (uint32_t a = 0; a < count; ++a) {
    std::string name = get_str(in, path);
    uint64_t n = get_u64(in, path);
    auto it = slots.find(name);
    if (it == slots.end())
      throw DataError(path + ": unexpected parameter array '" + name + "'");
    if (it->second.second != n)
      throw DataError(path + ": size mismatch for '" + name + "': file has " +
                      std::to_string(n) + ", config expects " +
                      std::to_string(it->second.second));
    for (uint64_t i = 0; i < n; ++i) it->second.first[i] = get_f32(in, path);
    seen[name] = true;
  }
  for (const auto& [name, slot] : slots)
    if (!seen.count(name))
      throw DataError(path + ": missing parameter array '" + name + "'");
  (void)alpha;  // the header echo; the trainable value arrives via the arrays
  return lm;
}

}  // namespace tableqa::nn
