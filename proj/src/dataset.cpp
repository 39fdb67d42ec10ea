#include "tableqa/dataset.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tableqa/error.hpp"

namespace tableqa {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t p = s.find(sep, start);
    if (p == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

std::string decode_escapes(const std::string& raw, const std::string& where) {
  std::string out;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '\\') { out.push_back(raw[i]); continue; }
    if (i + 1 >= raw.size()) throw DataError(where + ": trailing backslash");
    char c = raw[++i];
    if (c == 't') out.push_back('\t');
    else if (c == 'n') out.push_back('\n');
    else if (c == 'p') out.push_back('|');
    else if (c == '\\') out.push_back('\\');
    else throw DataError(where + ": unknown escape \\" + std::string(1, c));
  }
  return out;
}

}  // namespace

std::vector<QAExample> load_examples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open examples file: " + path);
  std::string line;
  std::vector<QAExample> out;
  int lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (!saw_header) {
      if (cols.size() < 4 || cols[0] != "id")
        throw DataError(path + ": expected header 'id\\tutterance\\tcontext\\ttargetValue'");
      saw_header = true;
      continue;
    }
    if (cols.size() < 4)
      throw DataError(path + ": line " + std::to_string(lineno) + ": expected 4 columns, got " +
                      std::to_string(cols.size()));
    QAExample ex;
    ex.id = cols[0];
    ex.question = decode_escapes(cols[1], path + ":" + std::to_string(lineno));
    ex.table_ref = cols[2];
    // split on unescaped pipes first; \p inside a part is a literal pipe
    for (const auto& part : split(cols[3], '|')) {
      if (part.empty()) continue;
      ex.gold.push_back(normalize_value(decode_escapes(part, path + ":" + std::to_string(lineno))));
    }
    if (ex.gold.empty())
      throw DataError(path + ": line " + std::to_string(lineno) + ": empty gold answer for id " + ex.id);
    out.push_back(std::move(ex));
  }
  if (!saw_header) throw DataError(path + ": empty examples file");
  return out;
}

std::vector<CandidateRecord> load_candidates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open candidates file: " + path);
  std::vector<CandidateRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path + ": line " + std::to_string(lineno) + ": " + e.what());
    }
    CandidateRecord r;
    try {
      r.id = j.at("id").get<std::string>();
      if (j.contains("question")) r.question = j["question"].get<std::string>();
      if (j.contains("table")) r.table_ref = j["table"].get<std::string>();
      if (j.contains("gold"))
        for (const auto& g : j["gold"]) r.gold_strings.push_back(g.get<std::string>());
      for (const auto& c : j.at("candidates")) r.lf_texts.push_back(c.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_candidates(const std::string& path, const std::vector<CandidateRecord>& recs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write candidates file: " + path);
  for (const auto& r : recs) {
    nlohmann::json j;
    j["id"] = r.id;
    j["question"] = r.question;
    j["table"] = r.table_ref;
    j["gold"] = r.gold_strings;
    j["candidates"] = r.lf_texts;
    out << j.dump() << "\n";
  }
}

}  // namespace tableqa
