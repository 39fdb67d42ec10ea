#include <algorithm>
#include <cctype>
#include <vector>

#include "tableqa/lf.hpp"
#include "tableqa/table.hpp"

namespace tableqa::lf {

namespace {

struct Tok {
  enum K { Ident, Number, Str, Dot, Comma, LParen, RParen, LBracket, RBracket, Cmp, Lam, End };
  K k;
  std::string text;
  size_t off;
};

bool ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

std::vector<Tok> lex(const std::string& s) {
  std::vector<Tok> out;
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') { ++i; continue; }
    size_t off = i;
    if (c == 0xCE && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xBB) {
      out.push_back({Tok::Lam, "\xce\xbb", off});
      i += 2;
      continue;
    }
    if (c == '.') { out.push_back({Tok::Dot, ".", off}); ++i; continue; }
    if (c == ',') { out.push_back({Tok::Comma, ",", off}); ++i; continue; }
    if (c == '(') { out.push_back({Tok::LParen, "(", off}); ++i; continue; }
    if (c == ')') { out.push_back({Tok::RParen, ")", off}); ++i; continue; }
    if (c == '[') { out.push_back({Tok::LBracket, "[", off}); ++i; continue; }
    if (c == ']') { out.push_back({Tok::RBracket, "]", off}); ++i; continue; }
    if (c == '<' || c == '>') {
      std::string op(1, static_cast<char>(c));
      ++i;
      if (i < s.size() && s[i] == '=') { op.push_back('='); ++i; }
      out.push_back({Tok::Cmp, op, off});
      continue;
    }
    if (c == '!') {
      if (i + 1 >= s.size() || s[i + 1] != '=')
        throw LfParseError("expected '=' after '!'", off);
      out.push_back({Tok::Cmp, "!=", off});
      i += 2;
      continue;
    }
    if (c == '"') {
      std::string text;
      ++i;
      bool closed = false;
      while (i < s.size()) {
        char d = s[i];
        if (d == '"') { closed = true; ++i; break; }
        if (d == '\\') {
          if (i + 1 >= s.size()) throw LfParseError("trailing backslash in string", i);
          char e = s[++i];
          if (e == 'n') text.push_back('\n');
          else if (e == 't') text.push_back('\t');
          else if (e == '"' || e == '\\') text.push_back(e);
          else throw LfParseError(std::string("unknown escape \\") + e, i - 1);
          ++i;
          continue;
        }
        text.push_back(d);
        ++i;
      }
      if (!closed) throw LfParseError("unterminated string", off);
      out.push_back({Tok::Str, text, off});
      continue;
    }
    bool neg = (c == '-' || c == '+') && i + 1 < s.size() &&
               std::isdigit(static_cast<unsigned char>(s[i + 1]));
    if (std::isdigit(c) || neg) {
      std::string text(1, static_cast<char>(c));
      ++i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) text.push_back(s[i++]);
      if (i + 1 < s.size() && s[i] == '.' && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
        text.push_back(s[i++]);
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) text.push_back(s[i++]);
      }
      out.push_back({Tok::Number, text, off});
      continue;
    }
    if (std::isalpha(c) || c == '_' || c >= 0x80) {
      std::string text;
      while (i < s.size() && ident_char(s[i])) text.push_back(s[i++]);
      out.push_back({Tok::Ident, text, off});
      continue;
    }
    throw LfParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", off);
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

std::string lower(const std::string& s) {
  std::string out = s;
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// "RollingStones" -> "rolling stones"; underscores become spaces. Word
// boundaries are only inferred for identifiers that carry uppercase letters,
// so already-normalized names ("c0", "original_air_date") pass through.
std::string camel_words(const std::string& raw) {
  bool has_upper = std::any_of(raw.begin(), raw.end(),
                               [](unsigned char c) { return std::isupper(c); });
  std::string out;
  auto lowc = [](unsigned char c) { return std::islower(c) || c >= 0x80; };
  for (size_t i = 0; i < raw.size(); ++i) {
    unsigned char c = raw[i];
    if (c == '_') { out.push_back(' '); continue; }
    if (has_upper && i > 0 && !out.empty() && out.back() != ' ') {
      unsigned char prev = raw[i - 1];
      bool boundary = (std::isupper(c) && lowc(prev)) ||
                      (std::isdigit(c) && std::isalpha(prev)) ||
                      (std::isalpha(c) && std::isdigit(prev));
      if (boundary) out.push_back(' ');
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return normalize_text(out);
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  LogicalForm run() {
    NodePtr root = parse_chain(false, false);
    if (cur().k != Tok::End) throw LfParseError("unexpected trailing input", cur().off);
    return LogicalForm(std::move(root));
  }

 private:
  std::vector<Tok> toks_;
  size_t p_ = 0;
  std::vector<std::string> bound_;

  const Tok& cur() const { return toks_[p_]; }
  const Tok& peek(size_t n) const { return toks_[std::min(p_ + n, toks_.size() - 1)]; }

  void expect(Tok::K k, const char* what) {
    if (cur().k != k) throw LfParseError(std::string("expected ") + what, cur().off);
    ++p_;
  }

  NodePtr parse_chain(bool relation_slot, bool under_reverse) {
    std::vector<NodePtr> elems;
    elems.push_back(parse_element(relation_slot, under_reverse));
    while (cur().k == Tok::Dot) {
      ++p_;
      elems.push_back(parse_element(relation_slot, false));
    }
    NodePtr acc = std::move(elems.back());
    elems.pop_back();
    while (!elems.empty()) {
      acc = join(std::move(elems.back()), std::move(acc));
      elems.pop_back();
    }
    return acc;
  }

  NodePtr parse_lambda(bool under_reverse, size_t off) {
    if (!under_reverse)
      throw LfParseError("lambda only allowed directly under R[...]", off);
    if (cur().k != Tok::Ident) throw LfParseError("expected variable symbol", cur().off);
    std::string sym = lower(cur().text);
    ++p_;
    bound_.push_back(sym);
    NodePtr body;
    if (cur().k == Tok::LBracket) {
      ++p_;
      body = parse_chain(false, false);
      expect(Tok::RBracket, "']'");
    } else {
      expect(Tok::Comma, "','");
      body = parse_chain(false, false);
      expect(Tok::RParen, "')'");
    }
    bound_.pop_back();
    return lambda(sym, std::move(body));
  }

  NodePtr parse_date_value(size_t off) {
    auto component = [&]() -> std::optional<int> {
      if (cur().k != Tok::Number) throw LfParseError("expected integer in date(...)", cur().off);
      int v = std::atoi(cur().text.c_str());
      ++p_;
      if (v == -1) return std::nullopt;
      return v;
    };
    expect(Tok::LParen, "'('");
    Date d;
    d.year = component();
    expect(Tok::Comma, "','");
    d.month = component();
    expect(Tok::Comma, "','");
    d.day = component();
    expect(Tok::RParen, "')'");
    if (!d.any()) throw LfParseError("date(...) needs at least one component", off);
    if (d.year && (*d.year < 1000 || *d.year > 9999))
      throw LfParseError("year out of range in date(...)", off);
    if (d.month && (*d.month < 1 || *d.month > 12))
      throw LfParseError("month out of range in date(...)", off);
    if (d.day && (*d.day < 1 || *d.day > 31))
      throw LfParseError("day out of range in date(...)", off);
    return value(CellValue::make_date(d));
  }

  NodePtr parse_value_atom() {
    const Tok& t = cur();
    if (t.k == Tok::Number) {
      ++p_;
      return value(CellValue::number(std::strtod(t.text.c_str(), nullptr), t.text));
    }
    if (t.k == Tok::Str) {
      ++p_;
      return value(CellValue::text(t.text));
    }
    if (t.k == Tok::Ident) {
      std::string low = lower(t.text);
      if (low == "date" && peek(1).k == Tok::LParen) {
        ++p_;
        return parse_date_value(t.off);
      }
      ++p_;
      for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
        if (*it == low) return var(low);
      return value(normalize_value(camel_words(t.text)));
    }
    throw LfParseError("expected value", t.off);
  }

  NodePtr parse_leaf_ident(const Tok& t, bool relation_like) {
    std::string low = lower(t.text);
    if (is_builtin_relation(low)) return relation(low);
    if (relation_like) return relation(normalize_column_name(camel_words(t.text)));
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
      if (*it == low) return var(low);
    if (t.text.size() == 1 && std::isalpha(static_cast<unsigned char>(t.text[0])))
      throw LfParseError("unbound variable '" + low + "'", t.off);
    return value(normalize_value(camel_words(t.text)));
  }

  NodePtr parse_element(bool relation_slot, bool under_reverse) {
    const Tok& t = cur();
    switch (t.k) {
      case Tok::Lam: {
        ++p_;
        return parse_lambda(under_reverse, t.off);
      }
      case Tok::Str:
        ++p_;
        return value(CellValue::text(t.text));
      case Tok::Number:
        ++p_;
        return value(CellValue::number(std::strtod(t.text.c_str(), nullptr), t.text));
      case Tok::Cmp: {
        ++p_;
        CmpOp op = t.text == "<" ? CmpOp::Lt
                 : t.text == "<=" ? CmpOp::Le
                 : t.text == ">" ? CmpOp::Gt
                 : t.text == ">=" ? CmpOp::Ge
                                  : CmpOp::Ne;
        return comparison(op, parse_value_atom());
      }
      case Tok::Ident: {
        std::string low = lower(t.text);
        if (peek(1).k == Tok::LParen) {
          return parse_call(low, t.off, under_reverse);
        }
        if (low == "r" && peek(1).k == Tok::LBracket) {
          p_ += 2;
          NodePtr child = parse_chain(true, true);
          expect(Tok::RBracket, "']'");
          return reverse(std::move(child));
        }
        ++p_;
        bool relation_here = relation_slot || cur().k == Tok::Dot;
        return parse_leaf_ident(t, relation_here);
      }
      default:
        throw LfParseError("unexpected token '" + t.text + "'", t.off);
    }
  }

  NodePtr parse_call(const std::string& low, size_t off, bool under_reverse) {
    auto agg_of = [&](const std::string& s) -> std::optional<AggOp> {
      if (s == "count") return AggOp::Count;
      if (s == "max") return AggOp::Max;
      if (s == "min") return AggOp::Min;
      if (s == "sum") return AggOp::Sum;
      if (s == "avg") return AggOp::Avg;
      return std::nullopt;
    };
    if (auto op = agg_of(low)) {
      p_ += 2;
      NodePtr child = parse_chain(false, false);
      expect(Tok::RParen, "')'");
      return aggregation(*op, std::move(child));
    }
    if (low == "join") {
      p_ += 2;
      NodePtr rel = parse_chain(true, false);
      expect(Tok::Comma, "','");
      NodePtr child = parse_chain(false, false);
      expect(Tok::RParen, "')'");
      return join(std::move(rel), std::move(child));
    }
    if (low == "lambda") {
      p_ += 2;
      return parse_lambda(under_reverse, off);
    }
    if (low == "plus" || low == "minus") {
      p_ += 2;
      NodePtr a = parse_chain(false, false);
      expect(Tok::Comma, "','");
      NodePtr b = parse_chain(false, false);
      expect(Tok::RParen, "')'");
      return arithmetic(low == "plus" ? ArithOp::Plus : ArithOp::Minus, std::move(a), std::move(b));
    }
    if (low == "and" || low == "or") {
      p_ += 2;
      NodePtr a = parse_chain(false, false);
      expect(Tok::Comma, "','");
      NodePtr b = parse_chain(false, false);
      expect(Tok::RParen, "')'");
      return merge(low == "and" ? MergeOp::And : MergeOp::Or, std::move(a), std::move(b));
    }
    if (low == "argmax" || low == "argmin") {
      p_ += 2;
      NodePtr a = parse_chain(false, false);
      expect(Tok::Comma, "','");
      NodePtr b = parse_chain(true, false);
      expect(Tok::RParen, "')'");
      return superlative(low == "argmax" ? SupOp::ArgMax : SupOp::ArgMin, std::move(a),
                         std::move(b));
    }
    if (low == "date") {
      ++p_;
      return parse_date_value(off);
    }
    throw LfParseError("unknown operator '" + low + "'", off);
  }
};

}  // namespace

LogicalForm parse_lf(const std::string& text) {
  Parser parser(text);
  return parser.run();
}

}  // namespace tableqa::lf
