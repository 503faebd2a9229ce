#include "blobgraph/query/lexer.hpp"

#include <array>
#include <cctype>

#include "blobgraph/common/error.hpp"

namespace blobgraph::query {

namespace {

constexpr std::array<std::string_view, 13> kKeywords = {
    "MATCH", "WHERE", "CREATE", "RETURN", "AND", "OR", "NOT",
    "SET", "DELETE", "DETACH", "AS", "TRUE", "FALSE"};

struct Sym {
  std::string_view text;
  Tok kind;
};

// Longest first so that maximal munch falls out of a linear scan.
constexpr std::array<Sym, 26> kSymbols = {{
    {"..", Tok::DotDot},     {"->", Tok::Arrow},      {"<-", Tok::LeftArrow},
    {"<>", Tok::Neq},        {"<=", Tok::Le},         {">=", Tok::Ge},
    {"::", Tok::Similarity}, {"~:", Tok::Similar},    {"!:", Tok::NotSimilar},
    {"<:", Tok::ContainedIn}, {">:", Tok::Contains},  {"(", Tok::LParen},
    {")", Tok::RParen},      {"[", Tok::LBracket},    {"]", Tok::RBracket},
    {"{", Tok::LBrace},      {"}", Tok::RBrace},      {",", Tok::Comma},      {";", Tok::Semicolon},
    {".", Tok::Dot},         {":", Tok::Colon},       {"*", Tok::Star},
    {"|", Tok::Pipe},        {"-", Tok::Minus},       {"=", Tok::Eq},
    {"<", Tok::Lt},
}};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

const char* tok_name(Tok t) noexcept {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Keyword: return "keyword";
    case Tok::Integer: return "integer";
    case Tok::Float: return "float";
    case Tok::String: return "string";
    case Tok::Param: return "parameter";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semicolon: return "';'";
    case Tok::Dot: return "'.'";
    case Tok::DotDot: return "'..'";
    case Tok::Colon: return "':'";
    case Tok::Star: return "'*'";
    case Tok::Pipe: return "'|'";
    case Tok::Minus: return "'-'";
    case Tok::Arrow: return "'->'";
    case Tok::LeftArrow: return "'<-'";
    case Tok::Eq: return "'='";
    case Tok::Neq: return "'<>'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Similarity: return "'::'";
    case Tok::Similar: return "'~:'";
    case Tok::NotSimilar: return "'!:'";
    case Tok::ContainedIn: return "'<:'";
    case Tok::Contains: return "'>:'";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool is_keyword(std::string_view upper) {
  for (auto k : kKeywords)
    if (k == upper) return true;
  return false;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::uint32_t line = 1, col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto fail = [&](const std::string& what) {
    raise(ErrorCode::LexError, std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  };
  auto prev_is = [&](std::initializer_list<Tok> kinds) {
    if (out.empty()) return false;
    for (Tok k : kinds)
      if (out.back().kind == k) return true;
    return false;
  };

  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::End, {}, {}, line, col, i};

    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      std::string upper;
      for (char ch : word) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      if (!prev_is({Tok::Dot, Tok::Arrow}) && is_keyword(upper)) {
        t.kind = Tok::Keyword;
        t.text = upper;
        t.raw = word;
      } else {
        t.kind = Tok::Ident;
        t.text = word;
      }
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }

    if (c == '`') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '`') ++j;
      if (j >= text.size()) fail("unterminated quoted identifier");
      t.kind = Tok::Ident;
      t.text = std::string(text.substr(i + 1, j - i - 1));
      if (t.text.empty()) fail("empty quoted identifier");
      advance(j + 1 - i);
      out.push_back(std::move(t));
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      bool is_float = false;
      // "1..3" is Integer DotDot Integer; only ".<digit>" makes a float.
      if (j + 1 < text.size() && text[j] == '.' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        is_float = true;
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          is_float = true;
          j = k;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
      }
      if (j < text.size() && ident_char(text[j])) fail("malformed number");
      t.kind = is_float ? Tok::Float : Tok::Integer;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }

    if (c == '\'' || c == '"') {
      std::string s;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < text.size()) {
        char d = text[j];
        if (d == c) {
          closed = true;
          ++j;
          break;
        }
        if (d == '\\') {
          if (j + 1 >= text.size()) break;
          char e = text[j + 1];
          switch (e) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            case '\\': s += '\\'; break;
            case '\'': s += '\''; break;
            case '"': s += '"'; break;
            default:
              advance(j - i);
              fail(std::string("unknown escape \\") + e);
          }
          j += 2;
          continue;
        }
        s += d;
        ++j;
      }
      if (!closed) fail("unterminated string literal");
      t.kind = Tok::String;
      t.text = std::move(s);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }

    if (c == '$') {
      std::size_t j = i + 1;
      if (j >= text.size() || !ident_start(text[j])) fail("expected parameter name after '$'");
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = Tok::Param;
      t.text = std::string(text.substr(i + 1, j - i - 1));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }

    bool matched = false;
    for (const auto& sym : kSymbols) {
      if (text.substr(i, sym.text.size()) != sym.text) continue;
      if (sym.kind == Tok::Colon && !prev_is({Tok::Ident, Tok::Keyword, Tok::LParen, Tok::LBracket})) {
        fail("unexpected ':'");
      }
      t.kind = sym.kind;
      t.text = std::string(sym.text);
      advance(sym.text.size());
      out.push_back(std::move(t));
      matched = true;
      break;
    }
    if (matched) continue;
    if (c == '>') {
      t.kind = Tok::Gt;
      t.text = ">";
      advance(1);
      out.push_back(std::move(t));
      continue;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
  return out;
}

}  // namespace blobgraph::query
