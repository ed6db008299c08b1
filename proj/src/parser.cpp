#include <utility>

#include "falcon/ontology.hpp"

namespace falcon {

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, LParen, RParen, Dot, Colon, Comma, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto ident_char = [](char ch) {
    return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') ||
           ch == '_';
  };
  while (i < line.size()) {
    char ch = line[i];
    if (ch == '#') break;
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
      continue;
    }
    std::size_t col = i + 1;
    switch (ch) {
      case '(': out.push_back({Tok::LParen, "(", col}); ++i; continue;
      case ')': out.push_back({Tok::RParen, ")", col}); ++i; continue;
      case '.': out.push_back({Tok::Dot, ".", col}); ++i; continue;
      case ':': out.push_back({Tok::Colon, ":", col}); ++i; continue;
      case ',': out.push_back({Tok::Comma, ",", col}); ++i; continue;
      default: break;
    }
    if (!ident_char(ch)) throw ParseError("unexpected character '" + std::string(1, ch) + "'", line_no, col);
    std::size_t j = i;
    while (j < line.size() && ident_char(line[j])) ++j;
    std::string word(line.substr(i, j - i));
    if (!is_identifier(word)) throw ParseError("malformed identifier '" + word + "'", line_no, col);
    out.push_back({Tok::Ident, std::move(word), col});
    i = j;
  }
  out.push_back({Tok::End, "", line.size() + 1});
  return out;
}

bool is_keyword(std::string_view w) {
  return w == "Thing" || w == "Nothing" || w == "not" || w == "and" || w == "or" || w == "some" ||
         w == "only" || w == "SubClassOf" || w == "concept" || w == "relation" ||
         w == "individual";
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, std::size_t line_no)
      : toks_(std::move(toks)), line_(line_no) {}

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::Ident) && peek().text == w; }

  [[noreturn]] void fail(const std::string& msg) const {
    const auto& t = peek();
    std::string got = t.kind == Tok::End ? "end of line" : "'" + t.text + "'";
    throw ParseError(msg + ", got " + got, line_, t.column);
  }

  Token expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return toks_[pos_++];
  }

  std::string expect_name(const char* what) {
    if (!at(Tok::Ident) || is_keyword(peek().text)) fail(std::string("expected ") + what);
    return toks_[pos_++].text;
  }

  void expect_end() {
    if (!at(Tok::End)) fail("expected end of line");
  }

  ConceptPtr concept_expr() {
    if (at(Tok::LParen)) {
      ++pos_;
      ConceptPtr lhs = concept_expr();
      if (at(Tok::RParen)) {
        ++pos_;
        return lhs;
      }
      if (!at_word("and") && !at_word("or")) fail("expected 'and', 'or' or ')'");
      const std::string op = peek().text;
      while (at_word(op)) {
        ++pos_;
        ConceptPtr rhs = concept_expr();
        lhs = op == "and" ? conj(std::move(lhs), std::move(rhs)) : disj(std::move(lhs), std::move(rhs));
      }
      if (at_word("and") || at_word("or")) fail("mixed 'and'/'or' need explicit parentheses");
      expect(Tok::RParen, "')'");
      return lhs;
    }
    if (!at(Tok::Ident)) fail("expected concept expression");
    const std::string word = peek().text;
    if (word == "Thing") {
      ++pos_;
      return top();
    }
    if (word == "Nothing") {
      ++pos_;
      return bottom();
    }
    if (word == "not") {
      ++pos_;
      return negate(concept_expr());
    }
    if (word == "some" || word == "only") {
      ++pos_;
      std::string rel = expect_name("relation name");
      expect(Tok::Dot, "'.'");
      ConceptPtr body = concept_expr();
      return word == "some" ? some(std::move(rel), std::move(body)) : only(std::move(rel), std::move(body));
    }
    return name(expect_name("concept expression"));
  }

  std::size_t line() const { return line_; }
  std::size_t pos_ = 0;

 private:
  std::vector<Token> toks_;
  std::size_t line_;
};

enum class LineKind { Blank, Declaration, Axiom };

struct ParsedLine {
  LineKind kind = LineKind::Blank;
  SymbolKind decl_kind = SymbolKind::Concept;
  std::vector<std::string> declared;
  std::optional<Axiom> axiom;
};

ParsedLine parse_line(std::string_view text, std::size_t line_no) {
  LineParser p(tokenize(text, line_no), line_no);
  ParsedLine out;
  if (p.at(Tok::End)) return out;

  if (p.at_word("concept") || p.at_word("relation") || p.at_word("individual")) {
    const std::string kw = p.peek().text;
    ++p.pos_;
    out.kind = LineKind::Declaration;
    out.decl_kind = kw == "concept"    ? SymbolKind::Concept
                    : kw == "relation" ? SymbolKind::Relation
                                       : SymbolKind::Individual;
    if (p.at(Tok::End)) p.fail("expected at least one name");
    while (!p.at(Tok::End)) out.declared.push_back(p.expect_name("name"));
    return out;
  }

  out.kind = LineKind::Axiom;
  if (p.at(Tok::Ident) && !is_keyword(p.peek().text)) {
    if (p.peek(1).kind == Tok::Colon) {
      std::string ind = p.expect_name("individual name");
      ++p.pos_;
      ConceptPtr c = p.concept_expr();
      p.expect_end();
      out.axiom = ConceptAssertion{std::move(c), std::move(ind)};
      return out;
    }
    if (p.peek(1).kind == Tok::LParen) {
      std::string rel = p.expect_name("relation name");
      ++p.pos_;
      std::string a = p.expect_name("individual name");
      p.expect(Tok::Comma, "','");
      std::string b = p.expect_name("individual name");
      p.expect(Tok::RParen, "')'");
      p.expect_end();
      out.axiom = RoleAssertion{std::move(rel), std::move(a), std::move(b)};
      return out;
    }
  }
  ConceptPtr sub = p.concept_expr();
  if (!p.at_word("SubClassOf")) p.fail("expected 'SubClassOf'");
  ++p.pos_;
  ConceptPtr sup = p.concept_expr();
  p.expect_end();
  out.axiom = Subsumption{std::move(sub), std::move(sup)};
  return out;
}

void check_declared(const Signature& sig, const Axiom& ax) {
  Signature probe = sig;
  register_symbols(probe, ax);
  if (!(probe == sig)) {
    for (auto kind : {SymbolKind::Concept, SymbolKind::Relation, SymbolKind::Individual})
      for (const auto& n : probe.names(kind))
        if (!sig.has(kind, n))
          throw SymbolError("undeclared " + std::string(to_string(kind)) + " '" + n + "'");
  }
}

}  // namespace

Ontology parse_ontology(std::string_view text, const ParseOptions& opts) {
  Ontology onto;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto parsed = parse_line(text.substr(start, end - start), line_no);
    try {
      if (parsed.kind == LineKind::Declaration) {
        for (const auto& n : parsed.declared) onto.signature.add(parsed.decl_kind, n);
      } else if (parsed.kind == LineKind::Axiom) {
        if (opts.strict) check_declared(onto.signature, *parsed.axiom);
        onto.add(*parsed.axiom);
      }
    } catch (const SymbolError& e) {
      throw SymbolError("line " + std::to_string(line_no) + ": " + e.what());
    }
    start = end + 1;
  }
  return onto;
}

ConceptPtr parse_concept(std::string_view text) {
  LineParser p(tokenize(text, 1), 1);
  ConceptPtr c = p.concept_expr();
  p.expect_end();
  return c;
}

Axiom parse_axiom(std::string_view text) {
  auto parsed = parse_line(text, 1);
  if (parsed.kind != LineKind::Axiom) throw ParseError("expected an axiom", 1, 1);
  return *parsed.axiom;
}

}  // namespace falcon
