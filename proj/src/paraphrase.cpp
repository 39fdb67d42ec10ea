#include "tableqa/paraphrase.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "tableqa/error.hpp"

namespace tableqa::para {

namespace {

std::string join_phrases(std::initializer_list<std::string> parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

std::string spaces_for_underscores(const std::string& s) {
  std::string out = s;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

const char* agg_key(lf::AggOp op) {
  switch (op) {
    case lf::AggOp::Count: return "count";
    case lf::AggOp::Max: return "max";
    case lf::AggOp::Min: return "min";
    case lf::AggOp::Sum: return "sum";
    case lf::AggOp::Avg: return "avg";
  }
  return "count";
}

const char* cmp_key(lf::CmpOp op) {
  switch (op) {
    case lf::CmpOp::Lt: return "lt";
    case lf::CmpOp::Le: return "le";
    case lf::CmpOp::Gt: return "gt";
    case lf::CmpOp::Ge: return "ge";
    case lf::CmpOp::Ne: return "ne";
  }
  return "lt";
}

bool is_relation_named(const lf::Node& n, const char* name) {
  return n.kind == lf::Kind::Relation && n.name == name;
}

bool is_cast_relation(const lf::Node& n) {
  return n.kind == lf::Kind::Relation &&
         (n.name == lf::kNumberCast || n.name == lf::kDateCast);
}

// Unwrap transparent Reverse/Lambda wrappers.
const lf::Node& unwrap(const lf::Node& n) {
  if ((n.kind == lf::Kind::Reverse || n.kind == lf::Kind::Lambda) && n.a) return unwrap(*n.a);
  return n;
}

class Renderer {
 public:
  explicit Renderer(const Lexicon& lex) : lex_(lex) {}

  std::string render(const lf::Node& n) {
    switch (n.kind) {
      case lf::Kind::Value:
        return n.value.display();
      case lf::Kind::Var:
        return {};
      case lf::Kind::Relation:
        return render_relation(n);
      case lf::Kind::Reverse:
      case lf::Kind::Lambda:
        return render(*n.a);
      case lf::Kind::Aggregation:
        return join_phrases({lex_.get(agg_key(n.agg)), render(*n.a)});
      case lf::Kind::Arithmetic:
        return join_phrases({render(*n.a),
                             lex_.get(n.arith == lf::ArithOp::Plus ? "plus" : "minus"),
                             render(*n.b)});
      case lf::Kind::Merge:
        return join_phrases({render(*n.a),
                             lex_.get(n.merge == lf::MergeOp::And ? "and" : "or"),
                             render(*n.b)});
      case lf::Kind::Comparison:
        return join_phrases({lex_.get(cmp_key(n.cmp)), render(*n.a)});
      case lf::Kind::Superlative:
        return render_superlative(n);
      case lf::Kind::Join:
        return render_join(n);
    }
    return {};
  }

 private:
  const Lexicon& lex_;

  std::string render_relation(const lf::Node& n) {
    if (n.name == lf::kIndex) return lex_.get("index");
    if (n.name == lf::kNext) return lex_.get("next");
    if (n.name == lf::kAllRows) return lex_.get("allrows");
    if (n.name == lf::kNumberCast) return lex_.get("number");
    if (n.name == lf::kDateCast) return lex_.get("date");
    return spaces_for_underscores(n.name);
  }

  std::string render_join(const lf::Node& n) {
    // Direct cast relations read as a type annotation: "as number", "as date".
    if (is_cast_relation(*n.a))
      return join_phrases({lex_.get("join_as"), render(*n.a), render(*n.b)});
    std::string rel = render(*n.a);
    std::string child = render(*n.b);
    if (child.empty()) return rel;
    if (rel.empty()) return child;
    // A cast or comparison child glues on without a connective.
    bool glued = (n.b->kind == lf::Kind::Join && is_cast_relation(*n.b->a)) ||
                 n.b->kind == lf::Kind::Comparison;
    if (glued) return join_phrases({rel, child});
    if (n.a->kind == lf::Kind::Reverse) return join_phrases({rel, lex_.get("join_of"), child});
    return join_phrases({rel, lex_.get("join_is"), child});
  }

  std::string render_superlative(const lf::Node& n) {
    bool over_index = is_relation_named(unwrap(*n.b), lf::kIndex);
    bool all_rows = is_relation_named(unwrap(*n.a), lf::kAllRows);
    std::string value_text =
        all_rows ? lex_.get("allrows_superlative")
                 : join_phrases({lex_.get("superlative_row_prefix"), render(*n.a)});
    if (over_index) {
      const char* key = n.sup == lf::SupOp::ArgMax ? "argmax_index" : "argmin_index";
      return join_phrases({lex_.get(key), value_text});
    }
    const char* key = n.sup == lf::SupOp::ArgMax ? "argmax" : "argmin";
    return join_phrases({value_text, lex_.get(key), render(*n.b)});
  }
};

}  // namespace

Lexicon Lexicon::defaults() {
  Lexicon lex;
  lex.entries = {
      {"count", "count"},
      {"max", "highest"},
      {"min", "lowest"},
      {"sum", "sum of"},
      {"avg", "average of"},
      {"plus", "plus"},
      {"minus", "minus"},
      {"and", "and"},
      {"or", "or"},
      {"lt", "<"},
      {"le", "<="},
      {"gt", ">"},
      {"ge", ">="},
      {"ne", "!="},
      {"argmax_index", "last"},
      {"argmin_index", "first"},
      {"argmax", "with highest"},
      {"argmin", "with lowest"},
      {"superlative_row_prefix", "table row where"},
      {"allrows", "all rows"},
      {"allrows_superlative", "row"},
      {"join_is", "is"},
      {"join_of", "of"},
      {"join_as", "as"},
      {"index", "index"},
      {"next", "row before"},
      {"number", "number"},
      {"date", "date"},
  };
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path);
  Lexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(path + ": line " + std::to_string(lineno) + ": expected key=phrase");
    std::string key = line.substr(0, eq);
    std::string phrase = line.substr(eq + 1);
    for (auto& c : phrase) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    lex.entries[key] = phrase;
  }
  return lex;
}

const std::string& Lexicon::get(const std::string& key) const {
  auto it = entries.find(key);
  if (it == entries.end()) throw DataError("lexicon entry missing for '" + key + "'");
  return it->second;
}

std::string paraphrase(const lf::Node& n, const Lexicon& lex) {
  Renderer r(lex);
  return r.render(n);
}

std::string paraphrase(const lf::LogicalForm& z, const Lexicon& lex) {
  if (!z.root) throw DataError("empty logical form");
  return paraphrase(*z.root, lex);
}

std::string paraphrase(const lf::LogicalForm& z) {
  static const Lexicon lex = Lexicon::defaults();
  return paraphrase(z, lex);
}

}  // namespace tableqa::para
