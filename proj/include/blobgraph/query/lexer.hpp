#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace blobgraph::query {

enum class Tok : std::uint8_t {
  Ident,
  Keyword,  // text holds the upper-cased keyword
  Integer,
  Float,
  String,  // text holds the unescaped contents
  Param,   // text holds the name without '$'
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Semicolon,
  Dot,
  DotDot,
  Colon,
  Star,
  Pipe,
  Minus,
  Arrow,      // ->
  LeftArrow,  // <-
  Eq,
  Neq,  // <>
  Lt,
  Le,
  Gt,
  Ge,
  Similarity,  // ::
  Similar,     // ~:
  NotSimilar,  // !:
  ContainedIn, // <:
  Contains,    // >:
  End,
};

const char* tok_name(Tok t) noexcept;

struct Token {
  Tok kind;
  std::string text;
  std::string raw;  // source spelling of a keyword
  std::uint32_t line = 1;
  std::uint32_t col = 1;
  std::size_t offset = 0;
};

bool is_keyword(std::string_view upper);

// Keywords are case-insensitive; multi-character symbols use maximal munch.
// A bare ':' is only legal after a word, '(' or '[' (label and type
// positions). Words after '.' or '->' are identifiers even if they spell a
// keyword. No End token is appended. LexError on bad input, as line:col.
std::vector<Token> tokenize(std::string_view text);

}  // namespace blobgraph::query
