#pragma once

#include <string_view>
#include <vector>

#include "blobgraph/query/ast.hpp"
#include "blobgraph/query/lexer.hpp"

namespace blobgraph::query {

// Query := (MATCH Pattern (',' Pattern)*)* (WHERE Expr)?
//          (CREATE Pattern (',' Pattern)* | SET SetItems | [DETACH] DELETE Vars)*
//          (RETURN Item (',' Item)*)?
// Expr precedence, loosest first: OR, AND, NOT, comparisons; '.' and '->'
// postfixes bind tightest. Comparisons do not chain.
//
// ParseError messages carry line:col and the set of tokens that would have
// been accepted. Variable-length relationships are only accepted inside
// shortestPath(...). A string literal that spells "$name" stays a string; the
// executor treats it as a parameter placeholder when such a parameter is bound.
Ast parse(const std::vector<Token>& tokens);
Ast parse_query(std::string_view text);

}  // namespace blobgraph::query
